#pragma once

#include <torwave/intlat.hpp>
#include <torwave/linear_system.hpp>

#include <set>
#include <string>

namespace torwave {

// Utilities for maintaining a finite union of convex cells (LinSys values over
// a common variable space) under subtraction of convex regions, hyperplane
// refinement, and closed-face enumeration. Everything is exact.

namespace detail {

inline RatVec negated(const RatVec& a) {
    RatVec b(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) b[j] = -a[j];
    return b;
}

inline std::string system_key(LinSys s) {
    FourierMotzkin::simplify(s);
    std::string key;
    for (const auto& r : s.rows) {
        key += (r.rel == Rel::EQ ? 'e' : (r.rel == Rel::LT ? 't' : 'l'));
        for (const auto& x : r.a) {
            key += format_rational(x);
            key += ',';
        }
        key += '|';
        key += format_rational(r.c);
        key += ';';
    }
    return key;
}

}  // namespace detail

// cells minus region, cell by cell: cell \ (r_1 & ... & r_k) decomposes as the
// union over i of cell & r_1 & ... & r_{i-1} & not(r_i).
inline std::vector<LinSys> subtract_region(const std::vector<LinSys>& cells, const LinSys& region,
                                           std::size_t cap) {
    std::vector<LinSys> out;
    for (const auto& cell : cells) {
        LinSys both = cell;
        for (const auto& r : region.rows) both.rows.push_back(r);
        if (!FourierMotzkin::feasible(both)) {
            out.push_back(cell);
            continue;
        }
        std::vector<LinCon> prefix;
        auto push_child = [&](const LinCon& neg) {
            LinSys child = cell;
            for (const auto& p : prefix) child.rows.push_back(p);
            child.rows.push_back(neg);
            if (!FourierMotzkin::feasible(child)) return;
            FourierMotzkin::simplify(child);
            out.push_back(std::move(child));
            if (out.size() > cap) throw std::overflow_error("cell list blowup during subtraction");
        };
        for (const auto& r : region.rows) {
            if (r.rel == Rel::EQ) {
                push_child(LinCon{r.a, r.c, Rel::LT});
                push_child(LinCon{detail::negated(r.a), -r.c, Rel::LT});
            } else {
                push_child(LinCon{detail::negated(r.a), -r.c, r.rel == Rel::LE ? Rel::LT : Rel::LE});
            }
            prefix.push_back(r);
        }
    }
    return out;
}

// Split every cell properly crossed by the hyperplane a.x = c into its two
// closed halves.
inline void refine_by_plane(std::vector<LinSys>& cells, const RatVec& a, const Rat& c,
                            std::size_t cap) {
    std::vector<LinSys> out;
    for (const auto& cell : cells) {
        LinSys lt = cell, gt = cell;
        lt.add(a, c, Rel::LT);
        gt.add(detail::negated(a), -c, Rel::LT);
        if (FourierMotzkin::feasible(lt) && FourierMotzkin::feasible(gt)) {
            LinSys le = cell, ge = cell;
            le.add(a, c, Rel::LE);
            ge.add(detail::negated(a), -c, Rel::LE);
            FourierMotzkin::simplify(le);
            FourierMotzkin::simplify(ge);
            out.push_back(std::move(le));
            out.push_back(std::move(ge));
        } else {
            out.push_back(cell);
        }
        if (out.size() > cap) throw std::overflow_error("cell list blowup during refinement");
    }
    cells = std::move(out);
}

struct FaceInfo {
    LinSys sys;  // equalities pin the affine hull of the face
    int dim = 0;
};

namespace detail {

// Convert every row that cannot be strict into an equality.
inline void saturate_equalities(LinSys& s) {
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        if (s.rows[i].rel == Rel::EQ) continue;
        LinSys strict = s;
        strict.rows[i].rel = Rel::LT;
        if (!FourierMotzkin::feasible(strict)) s.rows[i].rel = Rel::EQ;
    }
}

inline std::string hull_key(const LinSys& s) {
    RatMat aug;
    for (const auto& r : s.rows)
        if (r.rel == Rel::EQ) {
            RatVec row = r.a;
            row.push_back(r.c);
            aug.push_back(std::move(row));
        }
    if (aug.empty()) return "full";
    return subspace_signature(std::move(aug));
}

inline int hull_dim(const LinSys& s, int ambient_dim) {
    RatMat eqs;
    for (const auto& r : s.rows)
        if (r.rel == Rel::EQ) eqs.push_back(r.a);
    return ambient_dim - (eqs.empty() ? 0 : rat_rank(eqs));
}

}  // namespace detail

// All nonempty closed faces of the closure of a cell (the cell itself
// included), deduplicated by affine hull. `ambient_dim` is the number of
// meaningful coordinates (inert zero columns excluded).
inline std::vector<FaceInfo> closed_faces(const LinSys& cell, int ambient_dim, std::size_t cap) {
    std::vector<FaceInfo> out;
    std::set<std::string> seen;
    std::vector<LinSys> queue{cell};
    while (!queue.empty()) {
        LinSys cur = std::move(queue.back());
        queue.pop_back();
        if (!FourierMotzkin::feasible(cur)) continue;
        detail::saturate_equalities(cur);
        if (!seen.insert(detail::hull_key(cur)).second) continue;
        if (out.size() + 1 > cap) throw std::overflow_error("face enumeration blowup");
        for (std::size_t i = 0; i < cur.rows.size(); ++i) {
            if (cur.rows[i].rel == Rel::EQ) continue;
            LinSys child = cur;
            child.rows[i].rel = Rel::EQ;
            queue.push_back(std::move(child));
        }
        out.push_back({std::move(cur), 0});
        out.back().dim = detail::hull_dim(out.back().sys, ambient_dim);
    }
    return out;
}

}  // namespace torwave
