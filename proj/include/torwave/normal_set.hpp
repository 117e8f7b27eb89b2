#pragma once

#include <torwave/linear_system.hpp>
#include <torwave/trace.hpp>

#include <array>
#include <map>

namespace torwave {

enum class ComplementClass { Empty, FiniteSet, PositiveMeasure, Unknown };

inline const char* to_string(ComplementClass c) {
    switch (c) {
        case ComplementClass::Empty: return "Empty";
        case ComplementClass::FiniteSet: return "FiniteSet";
        case ComplementClass::PositiveMeasure: return "PositiveMeasure";
        default: return "Unknown";
    }
}

// One contact segment's contribution to the damped directions: the open cone
// of unit normals {Xi : nu . Xi > 0 for every inward normal nu of an active
// face}, intersected with the hyperplane orthogonal to the geodesic.
struct NormalCone {
    int piece = -1;
    std::vector<IntVec> inward;  // primitive inward normals, ambient coordinates
};

struct DampedNormalReport {
    std::vector<NormalCone> cones;
    ComplementClass complement = ComplementClass::Unknown;
    std::vector<IntVec> exceptional;               // undamped rays when FiniteSet
    std::vector<std::array<IntVec, 2>> fat_gaps;   // wedge witnesses when PositiveMeasure
};

namespace detail {

// Cyclic comparison of integer plane vectors by angle from (1,0), counterclockwise.
inline int ray_quadrant(const Int& s, const Int& c) {
    if (c == 0) return s > 0 ? 0 : 4;
    if (c > 0) return s > 0 ? 1 : (s == 0 ? 2 : 3);
    return s < 0 ? 5 : (s == 0 ? 6 : 7);
}

struct RayLess {
    bool operator()(const std::array<Int, 2>& a, const std::array<Int, 2>& b) const {
        int qa = ray_quadrant(a[0], a[1]), qb = ray_quadrant(b[0], b[1]);
        if (qa != qb) return qa < qb;
        return a[0] * b[1] - a[1] * b[0] > 0;
    }
};

}  // namespace detail

// Damped directions transverse to a closed geodesic, from its positive-length
// contact segments, and the classification of the undamped complement on the
// normal sphere. Punctual contacts carry no flux and are ignored.
inline DampedNormalReport damped_normal_set(const Scene& sc, const ClosedGeodesic& g,
                                            const std::vector<ContactSegment>& contacts) {
    int d = sc.torus.dim();
    RatVec vel = closed_velocity(sc.torus, g.n);
    DampedNormalReport rep;
    std::set<std::vector<IntVec>> seen;
    for (const auto& seg : contacts) {
        if (seg.punctual) continue;
        NormalCone cone;
        cone.piece = seg.piece;
        std::set<IntVec> inward;
        for (int f : seg.faces) {
            const auto& hs = sc.pieces[seg.piece].faces[f];
            if (dot(hs.n, vel) != 0)
                throw std::logic_error("contact face not parallel to the geodesic");
            RatVec nu(d);
            for (int j = 0; j < d; ++j) nu[j] = -hs.n[j];
            inward.insert(primitive_from_rational(nu));
        }
        cone.inward.assign(inward.begin(), inward.end());
        if (seen.insert(cone.inward).second) rep.cones.push_back(std::move(cone));
    }

    // basis of the lattice of integer vectors orthogonal to the direction
    IntMat W(1, primitive_from_rational(vel));
    IntMat B = integer_kernel(W);  // d-1 rows spanning the normal space

    auto to_ambient = [&](const std::vector<Int>& coeff) {
        IntVec v(d, 0);
        for (std::size_t i = 0; i < coeff.size(); ++i)
            for (int j = 0; j < d; ++j) v[j] += coeff[i] * B[i][j];
        return make_primitive(std::move(v));
    };

    if (rep.cones.empty()) {
        rep.complement = ComplementClass::PositiveMeasure;
        rep.fat_gaps.push_back({to_ambient({1}), to_ambient({1})});  // whole sphere
        return rep;
    }

    if (d == 2) {
        // the normal sphere is two points
        for (const Int& sgn : {Int(1), Int(-1)}) {
            IntVec xi(d);
            for (int j = 0; j < d; ++j) xi[j] = sgn * B[0][j];
            bool damped = false;
            for (const auto& cone : rep.cones) {
                bool all = true;
                for (const auto& nu : cone.inward)
                    if (dot_int(nu, xi) <= 0) all = false;
                if (all) damped = true;
            }
            if (!damped) rep.exceptional.push_back(xi);
        }
        std::sort(rep.exceptional.begin(), rep.exceptional.end());
        rep.complement = rep.exceptional.empty() ? ComplementClass::Empty : ComplementClass::FiniteSet;
        return rep;
    }

    if (d == 3) {
        // each inward normal nu acts on Xi = s B0 + c B1 through the exact
        // form p s + q c; the cone arrangement is a circle of rational rays
        std::vector<std::vector<std::array<Int, 2>>> forms;
        std::set<std::array<Int, 2>, detail::RayLess> rays;
        for (const auto& cone : rep.cones) {
            std::vector<std::array<Int, 2>> fs;
            for (const auto& nu : cone.inward) {
                Int p = dot_int(nu, B[0]), q = dot_int(nu, B[1]);
                if (p == 0 && q == 0) throw std::logic_error("inward normal parallel to the geodesic");
                Int gg = gcd(p, q);
                p /= gg;
                q /= gg;
                fs.push_back({p, q});
                rays.insert({-q, p});
                rays.insert({q, -p});
                rays.insert({p, q});
                rays.insert({-p, -q});
            }
            forms.push_back(std::move(fs));
        }
        auto covered = [&](const Int& s, const Int& c) {
            for (const auto& fs : forms) {
                bool all = true;
                for (const auto& f : fs)
                    if (f[0] * s + f[1] * c <= 0) {
                        all = false;
                        break;
                    }
                if (all) return true;
            }
            return false;
        };
        std::vector<std::array<Int, 2>> R(rays.begin(), rays.end());
        int m = static_cast<int>(R.size());
        bool fat = false;
        for (int i = 0; i < m; ++i) {
            const auto& a = R[i];
            const auto& b = R[(i + 1) % m];
            if (!covered(a[0], a[1])) rep.exceptional.push_back(to_ambient({a[0], a[1]}));
            if (!covered(a[0] + b[0], a[1] + b[1])) {  // arc midpoint; gaps are < pi
                fat = true;
                rep.fat_gaps.push_back({to_ambient({a[0], a[1]}), to_ambient({b[0], b[1]})});
            }
        }
        if (fat) {
            rep.complement = ComplementClass::PositiveMeasure;
            rep.exceptional.clear();
        } else {
            std::sort(rep.exceptional.begin(), rep.exceptional.end());
            rep.exceptional.erase(std::unique(rep.exceptional.begin(), rep.exceptional.end()),
                                  rep.exceptional.end());
            rep.complement =
                rep.exceptional.empty() ? ComplementClass::Empty : ComplementClass::FiniteSet;
        }
        return rep;
    }

    // d >= 4: the undamped set is the finite union, over one face choice per
    // cone, of the closed polyhedral cones {nu_choice . Xi <= 0 for all cones}
    // inside the normal space. Classify by the dimensions of those cones.
    std::size_t combos = 1;
    for (const auto& cone : rep.cones) {
        combos *= cone.inward.size();
        if (combos > 4096) {
            rep.complement = ComplementClass::Unknown;
            return rep;
        }
    }
    int nb = d - 1;
    std::set<IntVec> ex_rays;
    bool unknown = false;
    std::vector<std::size_t> pick(rep.cones.size(), 0);
    while (true) {
        LinSys sys(nb);
        for (std::size_t i = 0; i < rep.cones.size(); ++i) {
            const auto& nu = rep.cones[i].inward[pick[i]];
            RatVec row(nb);
            for (int j = 0; j < nb; ++j) row[j] = Rat(dot_int(nu, B[j]));
            sys.add(row, Rat(0), Rel::LE);
        }
        // implicit equalities: rows that cannot be made strict
        RatMat forced;
        for (std::size_t r = 0; r < sys.rows.size(); ++r) {
            LinSys strict = sys;
            strict.rows[r].rel = Rel::LT;
            if (!FourierMotzkin::feasible(strict)) forced.push_back(sys.rows[r].a);
        }
        int dim = nb - (forced.empty() ? 0 : rat_rank(forced));
        if (dim == nb) {
            rep.complement = ComplementClass::PositiveMeasure;
            LinSys strict = sys;
            for (auto& r : strict.rows) r.rel = Rel::LT;
            if (auto w = FourierMotzkin::witness(strict)) {
                IntVec y(nb);
                auto wp = primitive_from_rational(*w);
                for (int j = 0; j < nb; ++j) y[j] = wp[j];
                rep.fat_gaps.push_back({to_ambient(y), to_ambient(y)});
            }
            rep.exceptional.clear();
            return rep;
        }
        if (dim == 1) {
            // the cone is a ray or a line inside the forced subspace
            RatMat M = forced;
            IntMat kernel;
            {
                Int L = 1;
                for (const auto& row : M)
                    for (const auto& x : row) L = lcm(L, rat_den(x));
                IntMat Mi;
                for (const auto& row : M) {
                    IntVec r(nb);
                    for (int j = 0; j < nb; ++j) r[j] = rat_num(row[j] * L);
                    Mi.push_back(std::move(r));
                }
                kernel = integer_kernel(Mi);
            }
            for (const auto& dir0 : kernel) {
                for (const Int& sgn : {Int(1), Int(-1)}) {
                    IntVec y(nb);
                    for (int j = 0; j < nb; ++j) y[j] = sgn * dir0[j];
                    bool ok = true;
                    for (const auto& row : sys.rows) {
                        Rat v = 0;
                        for (int j = 0; j < nb; ++j) v += row.a[j] * y[j];
                        if (v > 0) ok = false;
                    }
                    if (ok) ex_rays.insert(to_ambient(y));
                }
            }
        } else if (dim > 1) {
            unknown = true;
        }
        std::size_t i = 0;
        while (i < pick.size() && pick[i] + 1 == rep.cones[i].inward.size()) pick[i++] = 0;
        if (i == pick.size()) break;
        ++pick[i];
    }
    if (unknown) {
        rep.complement = ComplementClass::Unknown;
        return rep;
    }
    rep.exceptional.assign(ex_rays.begin(), ex_rays.end());
    rep.complement = rep.exceptional.empty() ? ComplementClass::Empty : ComplementClass::FiniteSet;
    return rep;
}

}  // namespace torwave
