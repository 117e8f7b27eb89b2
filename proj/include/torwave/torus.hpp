#pragma once

#include <torwave/rational.hpp>

#include <stdexcept>

namespace torwave {

// Flat torus R^d / (A_1 Z x ... x A_d Z) with rational periods A_j > 0.
struct FlatTorus {
    RatVec periods;

    int dim() const { return static_cast<int>(periods.size()); }

    Rat volume() const {
        Rat v = 1;
        for (const auto& A : periods) v *= A;
        return v;
    }
};

inline FlatTorus make_torus(RatVec periods) {
    if (periods.empty()) throw std::invalid_argument("torus needs at least one period");
    for (const auto& A : periods)
        if (A <= 0) throw std::invalid_argument("torus periods must be positive");
    return FlatTorus{std::move(periods)};
}

// Representative of X in the fundamental cell [0, A_j) per axis.
inline RatVec fold_point(const FlatTorus& T, const RatVec& X) {
    RatVec out(X.size());
    for (std::size_t j = 0; j < X.size(); ++j) {
        const Rat& A = T.periods[j];
        out[j] = X[j] - Rat(rat_floor(X[j] / A)) * A;
    }
    return out;
}

}  // namespace torwave
