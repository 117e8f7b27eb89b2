#pragma once

#include <torwave/grid_field.hpp>

#include <cmath>
#include <functional>
#include <optional>

namespace torwave {

// Carriers must live on the frequency lattice, so a requested h is snapped to
// the nearest lattice mode k* = round(A_j / (2 pi h)) and the reported h is
// exactly 1/|xi_{k*}|. This keeps the carrier on the characteristic shell
// h^2 |xi|^2 = 1 to machine precision, as with exact plane-wave eigenmodes;
// without it a torus-periodic carrier at the requested h does not exist and
// an O(1) off-shell error would swamp the residual scaling.
struct QuasimodeField {
    GridField u;
    double h;           // effective semiclassical parameter, 1 / |xi_carrier|
    long long carrier;  // lattice mode index along the carrier axis
    int axis;
};

namespace detail {

inline long long snap_carrier(const FlatTorus& torus, int axis, double h_req,
                              const std::vector<int>& res) {
    double A = to_double(torus.periods[axis]);
    long long k = std::llround(A / (2.0 * M_PI * h_req));
    if (k < 1 || 2 * k >= res[axis])
        throw std::invalid_argument("h unresolvable on the grid: carrier mode out of range");
    return k;
}

inline double wrap_to_half(double s, double A) {
    double r = std::fmod(s, A);
    if (r > 0.5 * A) r -= A;
    if (r <= -0.5 * A) r += A;
    return r;
}

// Sum of Gaussian images exp(-(s + nA)^2 / (2h)) over the period lattice.
inline double periodized_gaussian(double s, double A, double h) {
    double s0 = wrap_to_half(s, A);
    int K = 1;
    while (std::exp(-((K - 0.5) * A) * ((K - 0.5) * A) / (2.0 * h)) >= 1e-20) ++K;
    double g = 0;
    for (int n = -K; n <= K; ++n) {
        double t = s0 + n * A;
        g += std::exp(-t * t / (2.0 * h));
    }
    return g;
}

}  // namespace detail

// (h^2 Lap + 1) u, applied spectrally: uhat_k <- (1 - h^2 |xi_k|^2) uhat_k.
inline GridField helmholtz_residual(const GridField& u, double h) {
    CVec c = coeffs(u);
    DVec xi2 = frequency_squares(u.torus, u.res);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= 1.0 - h * h * xi2[i];
    return field_from_coeffs(u.torus, u.res, std::move(c));
}

// Gaussian beam concentrated on the axis-aligned geodesic x_perp = center:
// carrier e^{i x_j / h} times a periodized transverse Gaussian of width
// sqrt(h), normalized to ||u|| = 1 (which absorbs the h^{-(d-1)/4} scaling).
inline QuasimodeField gaussian_beam(const FlatTorus& torus, int axis, const DVec& center,
                                    double h_req, std::vector<int> res) {
    GridField u = make_field(torus, std::move(res));
    int d = torus.dim();
    if (d < 2) throw std::invalid_argument("a beam needs a transverse direction");
    if (axis < 0 || axis >= d) throw std::invalid_argument("carrier axis out of range");
    if (static_cast<int>(center.size()) != d)
        throw std::invalid_argument("beam center dimension mismatch");
    if (h_req * u.res[axis] < 4.0)
        throw std::invalid_argument("h unresolvable on the grid: carrier aliased");
    long long k = detail::snap_carrier(torus, axis, h_req, u.res);
    double A_axis = to_double(torus.periods[axis]);
    double h = A_axis / (2.0 * M_PI * static_cast<double>(k));

    std::vector<CVec> factor(d);
    for (int j = 0; j < d; ++j) {
        double A = to_double(torus.periods[j]);
        factor[j].resize(u.res[j]);
        if (j == axis) {
            for (int i = 0; i < u.res[j]; ++i) {
                long long m = (k * i) % u.res[j];
                double ang = 2.0 * M_PI * static_cast<double>(m) / u.res[j];
                factor[j][i] = Cplx(std::cos(ang), std::sin(ang));
            }
        } else {
            if (std::sqrt(h) * u.res[j] < 2.0 * A)
                throw std::invalid_argument("h unresolvable on the grid: beam width aliased");
            for (int i = 0; i < u.res[j]; ++i)
                factor[j][i] =
                    detail::periodized_gaussian(i * A / u.res[j] - center[j], A, h);
        }
    }
    std::vector<int> idx(d, 0);
    for (long long i = 0; i < static_cast<long long>(u.samples.size()); ++i) {
        Cplx z = 1.0;
        for (int j = 0; j < d; ++j) z *= factor[j][idx[j]];
        u.samples[i] = z;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    invalidate_coeffs(u);
    scale_field(u, 1.0 / norm_l2(u));
    return QuasimodeField{std::move(u), h, k, axis};
}

// Transverse profile supported in the band |x_axis - center| <= halfwidth.
struct BandProfile {
    int axis = 0;
    double center = 0;
    double halfwidth = 0;
    std::function<double(double)> value;  // evaluated on the wrapped offset
};

// The standard compactly supported mollifier, normalized to bump(0) = 1.
inline double bump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// u = e^{i x_j / h} phi(x_b), the band quasimode whose residual is exactly
// h^2 e^{i x_j / h} phi'' once the carrier sits on the lattice shell.
inline QuasimodeField profile_quasimode(const FlatTorus& torus, int axis,
                                        const BandProfile& profile, double h_req,
                                        std::vector<int> res) {
    GridField u = make_field(torus, std::move(res));
    int d = torus.dim();
    if (axis < 0 || axis >= d) throw std::invalid_argument("carrier axis out of range");
    if (profile.axis < 0 || profile.axis >= d || profile.axis == axis)
        throw std::invalid_argument("band axis must be a transverse coordinate");
    if (!profile.value) throw std::invalid_argument("band profile needs a sampler");
    double A_band = to_double(torus.periods[profile.axis]);
    if (profile.halfwidth <= 0 || 2.0 * profile.halfwidth > A_band)
        throw std::invalid_argument("profile support exceeds the band");
    if (profile.halfwidth * u.res[profile.axis] < 4.0 * A_band)
        throw std::invalid_argument("band profile unresolved on the grid");
    if (h_req * u.res[axis] < 4.0)
        throw std::invalid_argument("h unresolvable on the grid: carrier aliased");
    long long k = detail::snap_carrier(torus, axis, h_req, u.res);
    double A_axis = to_double(torus.periods[axis]);
    double h = A_axis / (2.0 * M_PI * static_cast<double>(k));

    std::vector<CVec> factor(d);
    for (int j = 0; j < d; ++j) {
        double A = to_double(torus.periods[j]);
        factor[j].assign(u.res[j], Cplx(1.0));
        if (j == axis) {
            for (int i = 0; i < u.res[j]; ++i) {
                long long m = (k * i) % u.res[j];
                double ang = 2.0 * M_PI * static_cast<double>(m) / u.res[j];
                factor[j][i] = Cplx(std::cos(ang), std::sin(ang));
            }
        } else if (j == profile.axis) {
            for (int i = 0; i < u.res[j]; ++i) {
                double t = detail::wrap_to_half(i * A / u.res[j] - profile.center, A);
                factor[j][i] = std::abs(t) > profile.halfwidth ? 0.0 : profile.value(t);
            }
        }
    }
    std::vector<int> idx(d, 0);
    for (long long i = 0; i < static_cast<long long>(u.samples.size()); ++i) {
        Cplx z = 1.0;
        for (int j = 0; j < d; ++j) z *= factor[j][idx[j]];
        u.samples[i] = z;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    invalidate_coeffs(u);
    double n = norm_l2(u);
    if (n == 0) throw std::invalid_argument("band profile vanishes on the grid");
    scale_field(u, 1.0 / n);
    return QuasimodeField{std::move(u), h, k, axis};
}

// The bridging scale of the non-concentration estimate.
inline double epsilon_of_h(double h, double r) {
    if (h <= 0 || r < 0) throw std::invalid_argument("need h > 0 and a nonnegative residual");
    return std::max(std::pow(h, 1.0 / 6.0), std::pow(r / h, 1.0 / 6.0));
}

struct QuasimodeReport {
    double h = 0;
    double norm_u = 0;   // ||u||
    double norm_au = 0;  // ||a^{1/2} u||
    double norm_f = 0;   // ||(h^2 Lap + 1) u||
    double epsilon = 0;
    double obs_ratio = 0;  // ||u|| / (||a^{1/2} u|| + ||f|| / h)
};

inline QuasimodeReport quasimode_report(const QuasimodeField& q, const GridField& a) {
    QuasimodeReport rep;
    rep.h = q.h;
    rep.norm_u = norm_l2(q.u);
    rep.norm_au = weighted_norm(q.u, a);
    rep.norm_f = norm_l2(helmholtz_residual(q.u, q.h));
    rep.epsilon = epsilon_of_h(q.h, rep.norm_f);
    double denom = rep.norm_au + rep.norm_f / q.h;
    rep.obs_ratio = denom == 0 ? INFINITY : rep.norm_u / denom;
    return rep;
}

// Diagonal Helmholtz solve (h^2 Lap + 1) u = f with a resonance guard:
// modes with |1 - h^2 |xi|^2| < delta are zeroed and reported.
struct HelmholtzResult {
    GridField u;
    std::vector<long long> excluded;  // flat indices of guarded modes
    double guard = 0;
};

inline HelmholtzResult helmholtz_solve(const GridField& f, double h, double delta = 0) {
    if (h <= 0) throw std::invalid_argument("need h > 0");
    if (delta <= 0) delta = 10.0 * h * h;
    CVec c = coeffs(f);
    DVec xi2 = frequency_squares(f.torus, f.res);
    std::vector<long long> excluded;
    for (std::size_t i = 0; i < c.size(); ++i) {
        double sym = 1.0 - h * h * xi2[i];
        if (std::abs(sym) >= delta) {
            c[i] /= sym;
        } else {
            c[i] = 0.0;
            excluded.push_back(static_cast<long long>(i));
        }
    }
    if (excluded.size() == c.size())
        throw std::invalid_argument("resonance guard excluded every mode");
    return HelmholtzResult{field_from_coeffs(f.torus, f.res, std::move(c)), std::move(excluded),
                           delta};
}

namespace detail {

inline double overlap(double a, double b, double c, double d) {
    return std::max(0.0, std::min(b, d) - std::max(a, c));
}

// Fraction of the length of cell i (along one axis) lying in the band
// w_lo <= |x - center| <= w_hi of the periodic coordinate. Exact for
// piecewise-constant cell models, so constant-modulus fields integrate to
// the true band length; at cell boundaries this is the trapezoidal weight.
inline DVec band_weights(double A, int n, double center, double w_lo, double w_hi) {
    DVec wt(n, 0.0);
    double step = A / n;
    for (int i = 0; i < n; ++i) {
        double s = wrap_to_half(i * step - center, A);
        double lo = s - 0.5 * step, hi = s + 0.5 * step;
        double acc = 0;
        for (int img = -1; img <= 1; ++img) {
            double off = img * A;
            acc += overlap(lo, hi, off + w_lo, off + w_hi);
            acc += overlap(lo, hi, off - w_hi, off - w_lo);
        }
        wt[i] = acc / step;
    }
    return wt;
}

// L2 norm of u over the band w_lo <= |x_axis - center| <= w_hi.
inline double band_norm(const GridField& u, int axis, double center, double w_lo, double w_hi) {
    double A = to_double(u.torus.periods[axis]);
    DVec wt = band_weights(A, u.res[axis], center, w_lo, w_hi);
    int d = u.torus.dim();
    std::vector<int> idx(d, 0);
    double s = 0;
    for (long long i = 0; i < static_cast<long long>(u.samples.size()); ++i) {
        s += wt[idx[axis]] * std::norm(u.samples[i]);
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    return std::sqrt(s * field_volume(u) / static_cast<double>(u.samples.size()));
}

}  // namespace detail

// L2 mass of u on the slab |x_axis - center| <= w.
inline double slice_mass(const GridField& u, int axis, double center, double w) {
    if (axis < 0 || axis >= u.torus.dim()) throw std::invalid_argument("slab axis out of range");
    double A = to_double(u.torus.periods[axis]);
    if (w <= 0 || w > 0.5 * A) throw std::invalid_argument("slab width must lie in (0, A/2]");
    return detail::band_norm(u, axis, center, 0.0, w);
}

// Non-concentration probe: mass of the slab of width h^{1/2} eps^{-2} around
// the geodesic plane, against the eps^{1/2} bound.
struct NonconcReport {
    double h = 0, epsilon = 0, width = 0;
    double mass = 0, constant = 0;
    bool w_exceeds = false;  // slab wider than the torus: reported, not failed
    bool vacuous = false;    // residual branch saturates the bridging scale
    bool passed = true;
};

inline NonconcReport check_nonconcentration(const GridField& u, const GridField& f, double h,
                                            int axis, double center = 0, double c_max = 10.0,
                                            double eps_vacuous = 0.75) {
    NonconcReport rep;
    rep.h = h;
    rep.epsilon = epsilon_of_h(h, norm_l2(f));
    rep.vacuous = rep.epsilon >= eps_vacuous;
    rep.width = std::sqrt(h) / (rep.epsilon * rep.epsilon);
    double A = to_double(u.torus.periods[axis]);
    if (rep.width > 0.5 * A) {
        rep.w_exceeds = true;
        return rep;
    }
    rep.mass = slice_mass(u, axis, center, rep.width);
    rep.constant = rep.mass / std::sqrt(rep.epsilon);
    rep.passed = rep.constant <= c_max;
    return rep;
}

// Both sides of the slab estimate: sup over grid planes within the slab of
// the transverse L2 norm, against the annulus and residual-slab norms. The
// returned ratio folds in the beta^{-1/2} h^{-1/4} scaling, so a uniformly
// bounded ratio is the estimate's content.
struct SlabReport {
    double lhs = 0, rhs = 0, ratio = 0;
    double h = 0, beta = 0;
};

inline SlabReport check_slab_estimate(const GridField& u, const GridField& f, double h,
                                      double beta, int axis = 0, double center = 0) {
    if (h <= 0) throw std::invalid_argument("need h > 0");
    if (beta < 1.0 || beta > 1.0 / std::sqrt(h))
        throw std::invalid_argument("beta must lie in [1, h^{-1/2}]");
    if (!same_grid(u, f)) throw std::invalid_argument("u and f live on different grids");
    int d = u.torus.dim();
    double A = to_double(u.torus.periods[axis]);
    double w = beta * std::sqrt(h);
    double step = A / u.res[axis];
    if (w < step) throw std::invalid_argument("slab unresolved by the grid");

    // sup over planes |x_axis - center| <= w of the transverse L2 norm
    long long n_axis = u.res[axis];
    long long n_perp = field_size(u.res) / n_axis;
    double vol_perp = field_volume(u) / A;
    DVec plane(n_axis, 0.0);
    std::vector<int> idx(d, 0);
    for (long long i = 0; i < static_cast<long long>(u.samples.size()); ++i) {
        plane[idx[axis]] += std::norm(u.samples[i]);
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    SlabReport rep;
    rep.h = h;
    rep.beta = beta;
    for (int i = 0; i < n_axis; ++i) {
        if (std::abs(detail::wrap_to_half(i * step - center, A)) > w + 1e-12) continue;
        rep.lhs = std::max(rep.lhs,
                           std::sqrt(plane[i] * vol_perp / static_cast<double>(n_perp)));
    }
    rep.rhs = detail::band_norm(u, axis, center, w, 2.0 * w) +
              beta * beta / h * detail::band_norm(f, axis, center, 0.0, 2.0 * w);
    if (rep.lhs == 0.0)
        rep.ratio = 0.0;
    else
        rep.ratio = rep.rhs == 0.0
                        ? INFINITY
                        : rep.lhs * std::sqrt(beta) * std::pow(h, 0.25) / rep.rhs;
    return rep;
}

// One-dimensional resolvent probe for v'' + tau v = k on (-2, 2): the
// measured constant ||v||_{Linf(-1,1)} / (||v||_{L2(1<=|z|<=2)} +
// (1+|tau|)^{-1/2} ||k||_{L1(-2,2)}). Samples are uniform including both
// endpoints; the pair must satisfy the equation to discretization tolerance.
struct ResolventReport {
    double constant = 0;
    double residual = 0;  // worst second-difference defect
};

inline ResolventReport check_1d_resolvent(const DVec& v, const DVec& k, double tau,
                                          double rtol = 1e-2) {
    if (v.size() != k.size() || v.size() < 9)
        throw std::invalid_argument("need matching sample arrays on at least 9 points");
    int n = static_cast<int>(v.size()) - 1;
    double step = 4.0 / n;

    double vmax = 0, kmax = 0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    for (double x : k) kmax = std::max(kmax, std::abs(x));
    ResolventReport rep;
    for (int i = 1; i < n; ++i) {
        double lap = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (step * step);
        rep.residual = std::max(rep.residual, std::abs(lap + tau * v[i] - k[i]));
    }
    double scale = std::max(kmax, (1.0 + std::abs(tau)) * vmax);
    if (rep.residual > rtol * scale + 1e-12)
        throw std::invalid_argument("samples do not satisfy v'' + tau v = k");
    if (vmax == 0 && kmax == 0) return rep;  // zero solution: 0 by convention

    double sup = 0;
    for (int i = 0; i <= n; ++i) {
        double z = -2.0 + i * step;
        if (std::abs(z) <= 1.0 + 1e-12) sup = std::max(sup, std::abs(v[i]));
    }
    double l2sq = 0;
    for (int i = 0; i <= n; ++i) {
        double z = -2.0 + i * step;
        double lo = std::max(z - 0.5 * step, -2.0), hi = std::min(z + 0.5 * step, 2.0);
        double len = detail::overlap(lo, hi, 1.0, 2.0) + detail::overlap(lo, hi, -2.0, -1.0);
        l2sq += len * v[i] * v[i];
    }
    double l1 = 0;
    for (int i = 0; i <= n; ++i) l1 += std::abs(k[i]) * ((i == 0 || i == n) ? 0.5 : 1.0);
    l1 *= step;
    double denom = std::sqrt(l2sq) + l1 / std::sqrt(1.0 + std::abs(tau));
    rep.constant = denom == 0 ? (sup == 0 ? 0.0 : INFINITY) : sup / denom;
    return rep;
}

}  // namespace torwave
