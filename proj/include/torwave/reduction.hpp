#pragma once

// Reduction of a rational closed geodesic on a flat torus to a coordinate
// axis.  A direction n in Z^d on the torus R^d / (A_1 Z x ... x A_d Z) is
// carried onto the last coordinate axis by a composition of plane rotations,
// one per coordinate pair (j, j+1).  Each rotation consolidates the winding
// pair carried by the two slots into the upper slot, whose new period is
//
//     S = sqrt((n_a A_a)^2 + (n_b A_b)^2),
//
// and leaves the lower slot with a residual translation identity: shifting it
// by alpha is equivalent to shifting the consolidated slot by -beta, where
// (alpha, beta) come from an integer lattice vector (p, q) of the two periods.
// The rotation angles are irrational in general, so every quantity whose
// vanishing matters is tracked through its exact rational square alongside
// the double.

#include <torwave/dense.hpp>
#include <torwave/intlat.hpp>
#include <torwave/rational.hpp>
#include <torwave/rng.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace torwave {

struct ReductionStep {
    int stage = 0;  // rotates the coordinate pair (stage, stage + 1), 1-based
    DMat F;         // full-size rotation, identity off the active pair
    double S = 0;   // period of the consolidated coordinate
    Rat S_sq = 0;
    long long p = 0, q = 0;  // lattice vector behind the residual translation
    double alpha = 0, beta = 0;
    Rat alpha_sq = 0, beta_sq = 0;  // exact squares backing the zero tests
};

struct ReductionResult {
    RatVec periods;  // input torus periods
    IntVec n;        // input winding vector (primitive)
    DMat F;          // composite rotation; columns are the new basis vectors
    std::vector<ReductionStep> steps;  // non-identity stages, in application order
    double length = 0;  // period of the final geodesic axis
    Rat length_sq = 0;
    DVec reduced_periods;  // clean periods of the torus still carrying the geodesic
};

struct PeriodicityReport {
    int trials = 0;
    double max_discrepancy = 0;
};

namespace detail {

struct PairFold {
    Rat S_sq, alpha_sq, beta_sq;
    double S = 0, alpha = 0, beta = 0;
    double ca = 0, cb = 0;  // direction cosines of the consolidated axis
    long long p = 0, q = 0;
};

// Core of one reduction stage on a single coordinate pair.  Role a is the
// slot that keeps (or receives) the direction, role b is the slot emptied
// into it; na, nb are the windings, pa_sq, pb_sq the exact squared periods.
// The residual lattice vector (p, q) must satisfy q*na - p*nb != 0, an exact
// integer condition equivalent to alpha != 0.
inline PairFold fold_pair(const Rat& pa_sq, const Int& na, const Rat& pb_sq, const Int& nb,
                          std::optional<std::pair<long long, long long>> pq) {
    if (na == 0 && nb == 0) throw std::invalid_argument("fold_pair: both windings vanish");
    PairFold f;
    f.S_sq = Rat(na * na) * pa_sq + Rat(nb * nb) * pb_sq;
    f.S = std::sqrt(to_double(f.S_sq));
    if (pq) {
        f.p = pq->first;
        f.q = pq->second;
        if (Int(f.q) * na - Int(f.p) * nb == 0)
            throw std::invalid_argument("degenerate (p, q): the residual translation vanishes");
    } else {
        static constexpr std::pair<int, int> kOrder[] = {{0, 1},  {1, 0},  {0, -1}, {-1, 0},
                                                         {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
        bool found = false;
        for (auto [p, q] : kOrder) {
            if (Int(q) * na - Int(p) * nb != 0) {
                f.p = p;
                f.q = q;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("fold_pair: no admissible (p, q)");
    }
    Int cross = Int(f.q) * na - Int(f.p) * nb;
    f.alpha_sq = pa_sq * pb_sq * Rat(cross * cross) / f.S_sq;
    f.alpha = std::sqrt(to_double(pa_sq * pb_sq)) * cross.convert_to<double>() / f.S;
    Rat beta_num = Rat(Int(f.p) * na) * pa_sq + Rat(Int(f.q) * nb) * pb_sq;
    f.beta_sq = beta_num * beta_num / f.S_sq;
    f.beta = to_double(beta_num) / f.S;
    f.ca = na.convert_to<double>() * std::sqrt(to_double(pa_sq)) / f.S;
    f.cb = nb.convert_to<double>() * std::sqrt(to_double(pb_sq)) / f.S;
    return f;
}

inline void check_torus(const RatVec& periods, const IntVec& n) {
    if (periods.empty() || periods.size() != n.size())
        throw std::invalid_argument("periods and winding vector must have equal nonzero size");
    for (const Rat& A : periods)
        if (A <= 0) throw std::invalid_argument("torus periods must be positive");
}

}  // namespace detail

// One stage acting on the last two coordinates: the winding pair
// (n_{d-1}, n_d) over periods (A_{d-1}, A_d) is rotated onto coordinate d-1.
// When n_{d-1} = 0 the direction already sits on an axis and the rotation is
// the identity (the period S and the residual pair are still meaningful).
// Passing an explicit (p, q) overrides the default search order
// (0,1), (1,0), (0,-1), (-1,0), (1,1), ... over |p|, |q| <= 1.
inline ReductionStep build_step(const RatVec& periods, const IntVec& n,
                                std::optional<std::pair<long long, long long>> pq = std::nullopt) {
    detail::check_torus(periods, n);
    int d = static_cast<int>(periods.size());
    if (d < 2) throw std::invalid_argument("build_step: need at least two coordinates");
    const Int& na = n[d - 2];
    const Int& nb = n[d - 1];
    auto f = detail::fold_pair(periods[d - 2] * periods[d - 2], na,
                               periods[d - 1] * periods[d - 1], nb, pq);
    ReductionStep st;
    st.stage = d - 1;
    st.F = dmat_identity(d);
    if (na != 0) {
        st.F[d - 2][d - 2] = f.ca;
        st.F[d - 1][d - 2] = f.cb;
        st.F[d - 2][d - 1] = -f.cb;
        st.F[d - 1][d - 1] = f.ca;
    }
    st.S = f.S;
    st.S_sq = f.S_sq;
    st.p = f.p;
    st.q = f.q;
    st.alpha = f.alpha;
    st.beta = f.beta;
    st.alpha_sq = f.alpha_sq;
    st.beta_sq = f.beta_sq;
    return st;
}

// Carries the closed geodesic of primitive winding n onto the last coordinate
// axis.  Stages run over the pairs (1,2), (2,3), ..., (d-1,d); stage j folds
// whatever winding slot j carries into slot j+1 and is skipped entirely when
// slot j carries none.  The composite F applies the recorded stages left to
// right, so F^{-1} maps the geodesic direction to the last canonical basis
// vector.  Later stages see the irrational period S of an earlier fold, which
// is why the folding core works on exact squared periods rather than reusing
// build_step verbatim.
inline ReductionResult reduce_geodesic(const RatVec& periods, const IntVec& n) {
    detail::check_torus(periods, n);
    if (gcd_vec(n) != 1) throw std::invalid_argument("winding vector must be primitive");
    int d = static_cast<int>(periods.size());

    ReductionResult res;
    res.periods = periods;
    res.n = n;
    res.F = dmat_identity(d);

    std::vector<Rat> psq(d);
    for (int j = 0; j < d; ++j) psq[j] = periods[j] * periods[j];
    IntVec m = n;

    for (int j = 0; j + 1 < d; ++j) {
        if (m[j] == 0) {  // nothing to fold: the slot keeps its clean period
            res.reduced_periods.push_back(std::sqrt(to_double(psq[j])));
            continue;
        }
        auto f = detail::fold_pair(psq[j + 1], m[j + 1], psq[j], m[j], std::nullopt);
        ReductionStep st;
        st.stage = j + 1;
        st.F = dmat_identity(d);
        st.F[j][j] = f.ca;
        st.F[j + 1][j] = -f.cb;
        st.F[j][j + 1] = f.cb;
        st.F[j + 1][j + 1] = f.ca;
        st.S = f.S;
        st.S_sq = f.S_sq;
        st.p = f.p;
        st.q = f.q;
        st.alpha = f.alpha;
        st.beta = f.beta;
        st.alpha_sq = f.alpha_sq;
        st.beta_sq = f.beta_sq;
        res.F = dmat_mul(res.F, st.F);
        res.steps.push_back(std::move(st));
        psq[j + 1] = f.S_sq;
        m[j + 1] = 1;
    }

    res.length_sq = Rat(m[d - 1] * m[d - 1]) * psq[d - 1];
    res.length = std::sqrt(to_double(res.length_sq));
    res.reduced_periods.push_back(res.length);
    return res;
}

// Empirical check of the residual translation identities.  For every recorded
// stage with active pair (lo, hi) and partial composite G, and every lattice
// shift k, a function u periodic on the original torus must satisfy
//
//   u(G(x + k_lo alpha e_lo + k_hi S e_hi + sum_l k_l P_l e_l))
//     = u(G(x - k_lo beta e_hi)),
//
// where l runs over the slots that still hold a clean period P_l.  The test
// function is a fixed trigonometric polynomial with three modes per axis plus
// cross modes on adjacent pairs; trials draw k in {-3,...,3}^d and x in
// [0,1)^d.  Reports the largest absolute discrepancy seen.
inline PeriodicityReport verify_periodicity(const ReductionResult& res, int trials) {
    if (trials < 1) throw std::invalid_argument("verify_periodicity: trials must be >= 1");
    int d = static_cast<int>(res.periods.size());
    DVec A(d);
    for (int j = 0; j < d; ++j) A[j] = to_double(res.periods[j]);

    std::vector<std::vector<int>> modes;
    for (int j = 0; j < d; ++j)
        for (int k = 1; k <= 3; ++k) {
            std::vector<int> mu(d, 0);
            mu[j] = k;
            modes.push_back(mu);
        }
    for (int j = 0; j + 1 < d; ++j) {
        std::vector<int> mu(d, 0);
        mu[j] = 1;
        mu[j + 1] = 1;
        modes.push_back(mu);
        mu[j] = 2;
        mu[j + 1] = -1;
        modes.push_back(mu);
    }
    Rng coeffs(0x7ab5u);
    DVec amp(modes.size()), phase(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        amp[i] = coeffs.uniform(0.3, 1.0);
        phase[i] = coeffs.uniform(0.0, 6.283185307179586476925286766559);
    }
    auto eval = [&](const DVec& x) {
        double s = 0;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            double arg = phase[i];
            for (int j = 0; j < d; ++j)
                if (modes[i][j]) arg += 6.283185307179586476925286766559 * modes[i][j] * x[j] / A[j];
            s += amp[i] * std::cos(arg);
        }
        return s;
    };

    PeriodicityReport rep;
    rep.trials = trials;
    Rng rng(0xfeedu);
    for (int t = 0; t < trials; ++t) {
        DVec x(d);
        for (int j = 0; j < d; ++j) x[j] = rng.uniform();
        std::vector<long long> k(d);
        for (int j = 0; j < d; ++j) k[j] = rng.uniform_int(-3, 3);

        DMat G = dmat_identity(d);
        std::vector<char> consumed(d, 0);
        for (const ReductionStep& st : res.steps) {
            int lo = st.stage - 1, hi = st.stage;
            G = dmat_mul(G, st.F);
            DVec y = x, z = x;
            y[lo] += static_cast<double>(k[lo]) * st.alpha;
            z[hi] -= static_cast<double>(k[lo]) * st.beta;
            y[hi] += static_cast<double>(k[hi]) * st.S;
            for (int l = hi + 1; l < d; ++l) y[l] += static_cast<double>(k[l]) * A[l];
            for (int l = 0; l < lo; ++l)
                if (!consumed[l]) y[l] += static_cast<double>(k[l]) * A[l];
            double diff = std::abs(eval(dmat_apply(G, y)) - eval(dmat_apply(G, z)));
            rep.max_discrepancy = std::max(rep.max_discrepancy, diff);
            consumed[lo] = 1;
        }
    }
    return rep;
}

}  // namespace torwave
