#pragma once

#include <torwave/linear_system.hpp>
#include <torwave/torus.hpp>

#include <map>
#include <string>

namespace torwave {

// One face {X : n.X <= c}. The damped side is n.X <= c; -n is the outward
// normal of the polyhedron across this face.
struct HalfSpace {
    RatVec n;
    Rat c;
};

// Closed convex polyhedron as an intersection of half-spaces.
struct Polyhedron {
    std::vector<HalfSpace> faces;

    int dim() const { return faces.empty() ? 0 : static_cast<int>(faces[0].n.size()); }
};

// Damping = sum of indicator functions of the pieces; value in {0,1} once the
// pieces have pairwise disjoint interiors (enforced by validate_scene).
struct Scene {
    FlatTorus torus;
    std::vector<Polyhedron> pieces;
    std::string name;

    // Exact per-axis coordinate ranges of each piece, filled by make_scene.
    std::vector<std::vector<FourierMotzkin::Interval>> boxes;
};

inline LinSys poly_system(const Polyhedron& P, Rel rel) {
    LinSys s(P.dim());
    for (const auto& f : P.faces) s.add(f.n, f.c, rel);
    return s;
}

inline bool poly_contains_closed(const Polyhedron& P, const RatVec& X) {
    for (const auto& f : P.faces)
        if (dot(f.n, X) > f.c) return false;
    return true;
}

// Indices of faces satisfied with equality at X (X assumed inside closed P).
inline std::vector<int> poly_active_faces(const Polyhedron& P, const RatVec& X) {
    std::vector<int> out;
    for (std::size_t i = 0; i < P.faces.size(); ++i)
        if (dot(P.faces[i].n, X) == P.faces[i].c) out.push_back(static_cast<int>(i));
    return out;
}

inline std::optional<RatVec> poly_interior_point(const Polyhedron& P) {
    return FourierMotzkin::witness(poly_system(P, Rel::LT));
}

inline Scene make_scene(FlatTorus torus, std::vector<Polyhedron> pieces, std::string name = "") {
    Scene sc{std::move(torus), std::move(pieces), std::move(name), {}};
    sc.boxes.reserve(sc.pieces.size());
    for (const auto& P : sc.pieces) {
        std::vector<FourierMotzkin::Interval> box;
        for (int j = 0; j < sc.torus.dim(); ++j)
            box.push_back(FourierMotzkin::var_bounds(poly_system(P, Rel::LE), j));
        sc.boxes.push_back(std::move(box));
    }
    return sc;
}

// ---------------------------------------------------------------------------
// Point classification against the closure of the union of the pieces.

enum class PointClass { Interior, Boundary, Exterior };

struct FaceContact {
    int piece = -1;
    std::vector<int> faces;  // active face indices, ascending
};

struct PointClassResult {
    PointClass cls = PointClass::Exterior;
    std::vector<FaceContact> contacts;  // nonempty for Boundary
};

namespace detail {

// Integer lattice shifts k such that folded.x + k*A_j can lie within [lo, hi].
inline std::pair<Int, Int> shift_range(const FourierMotzkin::Interval& iv, const Rat& x,
                                       const Rat& A) {
    if (iv.empty || !iv.lo || !iv.hi) throw std::invalid_argument("scene piece unbounded or empty");
    return {rat_ceil((*iv.lo - x) / A), rat_floor((*iv.hi - x) / A)};
}

// Visits every lattice translate X + k.A of the folded point that can touch
// the piece's bounding box; fn receives the translated point.
template <typename Fn>
void for_each_translate(const Scene& sc, std::size_t piece, const RatVec& folded, Fn&& fn) {
    int d = sc.torus.dim();
    std::vector<Int> lo(d), hi(d), k(d);
    for (int j = 0; j < d; ++j) {
        auto [a, b] = shift_range(sc.boxes[piece][j], folded[j], sc.torus.periods[j]);
        if (a > b) return;
        lo[j] = a;
        hi[j] = b;
        k[j] = a;
    }
    RatVec Y(d);
    while (true) {
        for (int j = 0; j < d; ++j) Y[j] = folded[j] + Rat(k[j]) * sc.torus.periods[j];
        fn(Y);
        int j = 0;
        while (j < d && k[j] == hi[j]) k[j] = lo[j], ++j;
        if (j == d) return;
        ++k[j];
    }
}

}  // namespace detail

// Classifies X against supp(a) treated as the closed union of the pieces:
// abutting pieces merge, so points on shared faces interior to the union are
// Interior. A boundary point's complement direction exists iff some choice of
// one active face per containing piece is simultaneously strictly violable.
inline PointClassResult classify_point(const Scene& sc, const RatVec& X) {
    RatVec folded = fold_point(sc.torus, X);
    int d = sc.torus.dim();
    bool open_hit = false;
    std::vector<std::vector<int>> active_sets;  // per containing (piece,translate)
    std::vector<FaceContact> contacts;

    for (std::size_t i = 0; i < sc.pieces.size() && !open_hit; ++i) {
        detail::for_each_translate(sc, i, folded, [&](const RatVec& Y) {
            if (open_hit || !poly_contains_closed(sc.pieces[i], Y)) return;
            auto act = poly_active_faces(sc.pieces[i], Y);
            if (act.empty()) {
                open_hit = true;
                return;
            }
            active_sets.push_back(act);
            contacts.push_back({static_cast<int>(i), act});
        });
    }
    if (open_hit) return {PointClass::Interior, {}};
    if (active_sets.empty()) return {PointClass::Exterior, {}};

    // Tangent-cone coverage: X is interior to the union iff the closed cones
    // {v : n_f.v <= 0, f active} of the containing pieces cover all
    // directions v.
    std::vector<std::size_t> choice(active_sets.size(), 0);
    while (true) {
        LinSys s(d);
        for (std::size_t i = 0; i < active_sets.size(); ++i) {
            const auto& f = sc.pieces[contacts[i].piece].faces[active_sets[i][choice[i]]];
            RatVec a(d);
            for (int j = 0; j < d; ++j) a[j] = -f.n[j];
            s.add(std::move(a), 0, Rel::LT);  // n.v > 0: escapes piece i
        }
        if (FourierMotzkin::feasible(s)) {
            // dedupe contacts that repeat (same piece wrapped twice)
            std::vector<FaceContact> uniq;
            for (auto& c : contacts) {
                bool seen = false;
                for (auto& u : uniq)
                    if (u.piece == c.piece && u.faces == c.faces) seen = true;
                if (!seen) uniq.push_back(c);
            }
            return {PointClass::Boundary, uniq};
        }
        std::size_t i = 0;
        while (i < choice.size() && choice[i] + 1 == active_sets[i].size()) choice[i++] = 0;
        if (i == choice.size()) break;
        ++choice[i];
    }
    return {PointClass::Interior, {}};
}

// Membership in the closed support only (no Interior/Boundary distinction);
// the cheap path for rasterization.
inline bool in_closed_support(const Scene& sc, const RatVec& X) {
    RatVec folded = fold_point(sc.torus, X);
    for (std::size_t i = 0; i < sc.pieces.size(); ++i) {
        bool hit = false;
        detail::for_each_translate(sc, i, folded, [&](const RatVec& Y) {
            if (!hit && poly_contains_closed(sc.pieces[i], Y)) hit = true;
        });
        if (hit) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string message;
    std::optional<RatVec> witness;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_scene(const Scene& sc) {
    ValidationReport rep;
    int d = sc.torus.dim();
    if (d < 2 || d > 6) rep.violations.push_back({"torus dimension out of range [2,6]", {}});
    for (const auto& A : sc.torus.periods)
        if (A <= 0) rep.violations.push_back({"nonpositive torus period", {}});

    for (std::size_t i = 0; i < sc.pieces.size(); ++i) {
        const auto& P = sc.pieces[i];
        std::string tag = "piece " + std::to_string(i);
        if (P.faces.empty()) {
            rep.violations.push_back({tag + ": no half-spaces", {}});
            continue;
        }
        bool shaped = true;
        for (const auto& f : P.faces) {
            if (static_cast<int>(f.n.size()) != d) {
                rep.violations.push_back({tag + ": face dimension mismatch", {}});
                shaped = false;
                break;
            }
            bool zero = true;
            for (const auto& v : f.n)
                if (v != 0) zero = false;
            if (zero) {
                rep.violations.push_back({tag + ": zero face normal", {}});
                shaped = false;
                break;
            }
        }
        if (!shaped) continue;
        if (!poly_interior_point(P)) {
            rep.violations.push_back({tag + ": empty interior", {}});
            continue;
        }
        for (int j = 0; j < d; ++j) {
            const auto& iv = sc.boxes[i][j];
            if (!iv.lo || !iv.hi) {
                rep.violations.push_back({tag + ": unbounded along axis " + std::to_string(j), {}});
            } else if (*iv.hi - *iv.lo > sc.torus.periods[j]) {
                rep.violations.push_back(
                    {tag + ": wider than one period along axis " + std::to_string(j), {}});
            }
        }
    }
    if (!rep.ok()) return rep;

    // Pairwise (and self vs wrapped copy) interior disjointness.
    for (std::size_t i = 0; i < sc.pieces.size(); ++i) {
        for (std::size_t j = i; j < sc.pieces.size(); ++j) {
            std::vector<Int> lo(d), hi(d), k(d);
            bool skip = false;
            for (int ax = 0; ax < d; ++ax) {
                // k.A in [lo_i - hi_j, hi_i - lo_j]
                Rat a = (*sc.boxes[i][ax].lo - *sc.boxes[j][ax].hi) / sc.torus.periods[ax];
                Rat b = (*sc.boxes[i][ax].hi - *sc.boxes[j][ax].lo) / sc.torus.periods[ax];
                lo[ax] = rat_ceil(a);
                hi[ax] = rat_floor(b);
                if (lo[ax] > hi[ax]) skip = true;
                k[ax] = lo[ax];
            }
            if (skip) continue;
            while (true) {
                bool self_zero = (i == j);
                for (int ax = 0; ax < d && self_zero; ++ax)
                    if (k[ax] != 0) self_zero = false;
                if (!self_zero) {
                    LinSys s(d);
                    for (const auto& f : sc.pieces[i].faces) s.add(f.n, f.c, Rel::LT);
                    for (const auto& f : sc.pieces[j].faces) {
                        // f.n.(X - k.A) < f.c
                        Rat shift = 0;
                        for (int ax = 0; ax < d; ++ax)
                            shift += f.n[ax] * Rat(k[ax]) * sc.torus.periods[ax];
                        s.add(f.n, f.c + shift, Rel::LT);
                    }
                    if (auto w = FourierMotzkin::witness(s)) {
                        rep.violations.push_back({"pieces " + std::to_string(i) + " and " +
                                                      std::to_string(j) +
                                                      " have overlapping interiors",
                                                  fold_point(sc.torus, *w)});
                    }
                }
                int ax = 0;
                while (ax < d && k[ax] == hi[ax]) k[ax] = lo[ax], ++ax;
                if (ax == d) break;
                ++k[ax];
            }
        }
    }
    return rep;
}

}  // namespace torwave
