#pragma once

#include <torwave/intlat.hpp>
#include <torwave/torus.hpp>

#include <stdexcept>

namespace torwave {

// A closed geodesic t -> base + t * diag(periods) * n, periodic with t -> t+1.
struct ClosedGeodesic {
    RatVec base;
    IntVec n;  // primitive integer direction in unit-cube coordinates
};

// A geodesic with non-closed orbit; its closure is base + span(F) (mod the
// lattice). Rows of F are rational direction vectors in ambient coordinates.
struct DenseGeodesic {
    RatVec base;
    RatMat F;
};

struct DirectionClass {
    bool closed = true;
    IntVec n;   // set when closed
    RatMat F;   // spanning directions of the orbit closure otherwise
};

// Ambient velocity of the closed geodesic with winding vector n: one full
// period corresponds to parameter length 1.
inline RatVec closed_velocity(const FlatTorus& torus, const IntVec& n) {
    RatVec v(n.size());
    for (std::size_t j = 0; j < n.size(); ++j) v[j] = Rat(n[j]) * torus.periods[j];
    return v;
}

// Rational velocities always generate closed geodesics: the relation lattice
// {m in Z^d : m . v/A = 0} has full corank one. Orbits with smaller closure
// arise only from irrational direction data, which enters this library through
// explicit DenseGeodesic construction rather than through a velocity vector.
inline DirectionClass classify_direction(const FlatTorus& torus, const RatVec& velocity) {
    if (velocity.size() != torus.periods.size())
        throw std::invalid_argument("velocity dimension mismatch");
    RatVec u(velocity.size());
    bool zero = true;
    for (std::size_t j = 0; j < velocity.size(); ++j) {
        u[j] = velocity[j] / torus.periods[j];
        if (u[j] != 0) zero = false;
    }
    if (zero) throw std::invalid_argument("zero velocity has no direction");
    DirectionClass out;
    out.closed = true;
    out.n = primitive_from_rational(u);
    return out;
}

inline ClosedGeodesic make_closed_geodesic(const FlatTorus& torus, const RatVec& base,
                                           const IntVec& n) {
    if (base.size() != torus.periods.size() || n.size() != torus.periods.size())
        throw std::invalid_argument("geodesic dimension mismatch");
    return ClosedGeodesic{fold_point(torus, base), make_primitive(n)};
}

inline DenseGeodesic make_dense_geodesic(const FlatTorus& torus, const RatVec& base, RatMat F) {
    if (base.size() != torus.periods.size())
        throw std::invalid_argument("geodesic dimension mismatch");
    for (const auto& row : F)
        if (row.size() != torus.periods.size())
            throw std::invalid_argument("direction dimension mismatch");
    int k = rat_rank(F);
    if (k == 0 || k != static_cast<int>(F.size()))
        throw std::invalid_argument("directions must be independent and nonempty");
    return DenseGeodesic{fold_point(torus, base), std::move(F)};
}

}  // namespace torwave
