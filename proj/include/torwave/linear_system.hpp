#pragma once

#include <torwave/rational.hpp>

#include <algorithm>
#include <optional>
#include <utility>

namespace torwave {

// Exact linear constraint a.x REL c over d rational variables.
enum class Rel { LE, LT, EQ };

struct LinCon {
    RatVec a;
    Rat c;
    Rel rel = Rel::LE;
};

// A conjunction of linear constraints. Feasibility, variable elimination
// (Fourier-Motzkin with equality substitution) and witness extraction are
// exact; strictness propagates through combinations.
struct LinSys {
    int nvars = 0;
    std::vector<LinCon> rows;

    explicit LinSys(int n = 0) : nvars(n) {}

    void add(RatVec a, Rat c, Rel rel) { rows.push_back({std::move(a), std::move(c), rel}); }

    // a.x <= c convenience with sparse coefficients.
    void add_le(std::initializer_list<std::pair<int, Rat>> terms, Rat c) {
        RatVec a(nvars, 0);
        for (auto& [i, v] : terms) a[i] = v;
        add(std::move(a), std::move(c), Rel::LE);
    }
};

namespace detail {

// Scales a row by a positive rational so coefficients and rhs become coprime
// integers; keeps numbers small through eliminations.
inline void normalize_row(LinCon& r) {
    Int den_lcm = 1, num_gcd = 0;
    auto absorb = [&](const Rat& v) {
        den_lcm = lcm(den_lcm, rat_den(v));
        num_gcd = gcd(num_gcd, rat_num(v));
    };
    for (const auto& v : r.a) absorb(v);
    absorb(r.c);
    if (num_gcd == 0) return;  // everything zero
    Rat scale(den_lcm, num_gcd);
    if (scale < 0) scale = -scale;
    for (auto& v : r.a) v *= scale;
    r.c *= scale;
}

inline bool row_trivial(const LinCon& r) {
    for (const auto& v : r.a)
        if (v != 0) return false;
    return true;
}

// For an all-zero coefficient row: does 0 REL c hold?
inline bool trivial_holds(const LinCon& r) {
    switch (r.rel) {
        case Rel::LE: return r.c >= 0;
        case Rel::LT: return r.c > 0;
        case Rel::EQ: return r.c == 0;
    }
    return false;
}

inline int cmp_rat(const Rat& x, const Rat& y) { return x < y ? -1 : (y < x ? 1 : 0); }

inline bool row_less(const LinCon& x, const LinCon& y) {
    if (x.rel != y.rel) return x.rel < y.rel;
    if (int c = cmp_rat(x.c, y.c)) return c < 0;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        if (int c = cmp_rat(x.a[i], y.a[i])) return c < 0;
    return false;
}

inline bool row_eq(const LinCon& x, const LinCon& y) {
    return !row_less(x, y) && !row_less(y, x);
}

}  // namespace detail

class FourierMotzkin {
  public:
    // Hard cap on intermediate row count; exceeded only by adversarial input.
    static constexpr std::size_t kRowCap = 200000;

    // Removes variable j. Returns false if a contradiction became manifest.
    static bool eliminate(LinSys& s, int j) {
        // Prefer substitution through an equality involving j.
        for (std::size_t i = 0; i < s.rows.size(); ++i) {
            if (s.rows[i].rel == Rel::EQ && s.rows[i].a[j] != 0) {
                substitute(s, i, j);
                return simplify(s);
            }
        }
        std::vector<LinCon> pos, neg, rest;
        for (auto& r : s.rows) {
            if (r.a[j] > 0) pos.push_back(std::move(r));
            else if (r.a[j] < 0) neg.push_back(std::move(r));
            else rest.push_back(std::move(r));
        }
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                LinCon row;
                row.a.resize(s.nvars);
                Rat cp = p.a[j], cn = -n.a[j];
                for (int k = 0; k < s.nvars; ++k) row.a[k] = p.a[k] * cn + n.a[k] * cp;
                row.c = p.c * cn + n.c * cp;
                row.rel = (p.rel == Rel::LT || n.rel == Rel::LT) ? Rel::LT : Rel::LE;
                rest.push_back(std::move(row));
                if (rest.size() > kRowCap) throw std::overflow_error("fourier-motzkin blowup");
            }
        }
        s.rows = std::move(rest);
        return simplify(s);
    }

    // Drops trivial rows, dedupes; false iff contradiction found.
    static bool simplify(LinSys& s) {
        std::vector<LinCon> keep;
        for (auto& r : s.rows) {
            detail::normalize_row(r);
            if (detail::row_trivial(r)) {
                if (!detail::trivial_holds(r)) return false;
                continue;
            }
            keep.push_back(std::move(r));
        }
        std::sort(keep.begin(), keep.end(), detail::row_less);
        keep.erase(std::unique(keep.begin(), keep.end(), detail::row_eq), keep.end());
        s.rows = std::move(keep);
        return true;
    }

    static bool feasible(LinSys s) {
        if (!simplify(s)) return false;
        for (int j = 0; j < s.nvars; ++j) {
            if (!uses(s, j)) continue;
            if (!eliminate(s, j)) return false;
        }
        return true;
    }

    // Exact satisfying point, midpoint-of-interval choices (lands in the
    // relative interior whenever the system has one). nullopt if infeasible.
    static std::optional<RatVec> witness(LinSys s) {
        if (!simplify(s)) return std::nullopt;
        std::vector<std::pair<int, LinSys>> stack;
        for (int j = 0; j < s.nvars; ++j) {
            if (!uses(s, j)) continue;
            stack.emplace_back(j, s);
            if (!eliminate(s, j)) return std::nullopt;
        }
        RatVec x(s.nvars, 0);
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            auto& [j, sys] = *it;
            if (!assign_var(sys, j, x)) return std::nullopt;
        }
        return x;
    }

    // Projection onto the variables marked true in `keep` (others eliminated).
    // Result still has nvars slots; eliminated slots have zero coefficients.
    static std::optional<LinSys> project(LinSys s, const std::vector<bool>& keep) {
        if (!simplify(s)) return std::nullopt;
        for (int j = 0; j < s.nvars; ++j) {
            if (keep[j] || !uses(s, j)) continue;
            if (!eliminate(s, j)) return std::nullopt;
        }
        return s;
    }

    struct Interval {
        std::optional<Rat> lo, hi;  // nullopt = unbounded
        bool lo_strict = false, hi_strict = false;
        bool empty = false;
    };

    // Exact range of variable j over the solution set (empty flag if none).
    static Interval var_bounds(LinSys s, int j) {
        Interval out;
        std::vector<bool> keep(s.nvars, false);
        keep[j] = true;
        auto proj = project(std::move(s), keep);
        if (!proj) {
            out.empty = true;
            return out;
        }
        for (const auto& r : proj->rows) {
            const Rat& aj = r.a[j];
            if (aj == 0) continue;
            Rat b = r.c / aj;
            if (r.rel == Rel::EQ) {
                tighten_lo(out, b, false);
                tighten_hi(out, b, false);
            } else if (aj > 0) {
                tighten_hi(out, b, r.rel == Rel::LT);
            } else {
                tighten_lo(out, b, r.rel == Rel::LT);
            }
        }
        if (out.lo && out.hi) {
            if (*out.lo > *out.hi || (*out.lo == *out.hi && (out.lo_strict || out.hi_strict)))
                out.empty = true;
        }
        return out;
    }

  private:
    static bool uses(const LinSys& s, int j) {
        for (const auto& r : s.rows)
            if (r.a[j] != 0) return true;
        return false;
    }

    static void substitute(LinSys& s, std::size_t eq_idx, int j) {
        LinCon eq = s.rows[eq_idx];
        s.rows.erase(s.rows.begin() + static_cast<std::ptrdiff_t>(eq_idx));
        Rat aj = eq.a[j];
        // x_j = (eq.c - sum_{k != j} eq.a[k] x_k) / aj
        for (auto& r : s.rows) {
            Rat f = r.a[j] / aj;
            if (f == 0) continue;
            for (int k = 0; k < s.nvars; ++k) r.a[k] -= f * eq.a[k];
            r.a[j] = 0;
            r.c -= f * eq.c;
        }
    }

    static void tighten_lo(Interval& iv, const Rat& v, bool strict) {
        if (!iv.lo || v > *iv.lo || (v == *iv.lo && strict)) {
            iv.lo = v;
            iv.lo_strict = strict;
        }
    }
    static void tighten_hi(Interval& iv, const Rat& v, bool strict) {
        if (!iv.hi || v < *iv.hi || (v == *iv.hi && strict)) {
            iv.hi = v;
            iv.hi_strict = strict;
        }
    }

    // Picks a value for variable j consistent with `sys` given that all
    // variables eliminated after j already carry values in x.
    static bool assign_var(const LinSys& sys, int j, RatVec& x) {
        Interval iv;
        std::optional<Rat> pinned;
        for (const auto& r : sys.rows) {
            const Rat& aj = r.a[j];
            if (aj == 0) continue;
            Rat rest = r.c;
            for (int k = 0; k < sys.nvars; ++k)
                if (k != j && r.a[k] != 0) rest -= r.a[k] * x[k];
            Rat b = rest / aj;
            if (r.rel == Rel::EQ) pinned = b;
            else if (aj > 0) tighten_hi(iv, b, r.rel == Rel::LT);
            else tighten_lo(iv, b, r.rel == Rel::LT);
        }
        if (pinned) {
            x[j] = *pinned;
            return true;
        }
        if (iv.lo && iv.hi) {
            if (*iv.lo > *iv.hi) return false;
            if (*iv.lo == *iv.hi) {
                if (iv.lo_strict || iv.hi_strict) return false;
                x[j] = *iv.lo;
            } else {
                x[j] = (*iv.lo + *iv.hi) / 2;
            }
        } else if (iv.lo) {
            x[j] = *iv.lo + 1;
        } else if (iv.hi) {
            x[j] = *iv.hi - 1;
        } else {
            x[j] = 0;
        }
        return true;
    }
};

}  // namespace torwave
