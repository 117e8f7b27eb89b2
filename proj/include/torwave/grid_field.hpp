#pragma once

#include <torwave/dense.hpp>
#include <torwave/rng.hpp>
#include <torwave/scene.hpp>

#include <fftw3.h>

#include <complex>
#include <stdexcept>
#include <vector>

namespace torwave {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

// Uniform tensor grid on the torus. Axis j carries N_j samples at
// x_j = i_j A_j / N_j, stored row-major with the last axis fastest. The
// coefficient view is the Fourier series u(x) = sum_k uhat_k e^{i xi_k.x}
// with xi_k = 2 pi k_j / A_j and k_j in [-N_j/2, N_j/2), kept in the usual
// wrap-around order and cached after the first request. Every mutation of
// `samples` must go through invalidate_coeffs.
struct GridField {
    FlatTorus torus;
    std::vector<int> res;
    CVec samples;

    mutable CVec coef_cache;
    mutable bool coef_valid = false;
};

inline long long field_size(const std::vector<int>& res) {
    long long n = 1;
    for (int r : res) n *= r;
    return n;
}

inline GridField make_field(FlatTorus torus, std::vector<int> res) {
    if (static_cast<int>(res.size()) != torus.dim())
        throw std::invalid_argument("resolution rank does not match the torus dimension");
    for (int r : res)
        if (r < 8 || (r & (r - 1)) != 0)
            throw std::invalid_argument("per-axis resolutions must be powers of two >= 8");
    GridField f{std::move(torus), std::move(res), {}, {}, false};
    f.samples.assign(field_size(f.res), Cplx(0.0));
    return f;
}

inline GridField make_field(FlatTorus torus, int res) {
    std::vector<int> r(torus.dim(), res);
    return make_field(std::move(torus), std::move(r));
}

inline void invalidate_coeffs(const GridField& f) { f.coef_valid = false; }

inline double field_volume(const GridField& f) { return to_double(f.torus.volume()); }

inline bool same_grid(const GridField& a, const GridField& b) {
    return a.res == b.res && a.torus.periods == b.torus.periods;
}

// Signed mode index of sample slot i on an axis of resolution n.
inline int freq_index(int i, int n) { return i < n / 2 ? i : i - n; }

// Per-axis physical frequencies xi_j[i] = 2 pi freq_index(i) / A_j.
inline std::vector<DVec> frequency_tables(const FlatTorus& torus, const std::vector<int>& res) {
    std::vector<DVec> xi(res.size());
    for (std::size_t j = 0; j < res.size(); ++j) {
        double A = to_double(torus.periods[j]);
        xi[j].resize(res[j]);
        for (int i = 0; i < res[j]; ++i) xi[j][i] = 2.0 * M_PI * freq_index(i, res[j]) / A;
    }
    return xi;
}

// |xi_k|^2 for every mode, flattened in sample order.
inline DVec frequency_squares(const FlatTorus& torus, const std::vector<int>& res) {
    auto xi = frequency_tables(torus, res);
    int d = static_cast<int>(res.size());
    DVec out(field_size(res));
    std::vector<int> idx(d, 0);
    for (long long f = 0; f < static_cast<long long>(out.size()); ++f) {
        double s = 0;
        for (int j = 0; j < d; ++j) s += xi[j][idx[j]] * xi[j][idx[j]];
        out[f] = s;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == res[j]) idx[j--] = 0;
    }
    return out;
}

namespace detail {

inline void fft_inplace(CVec& a, const std::vector<int>& res, int sign) {
    fftw_plan p = fftw_plan_dft(static_cast<int>(res.size()), res.data(),
                                reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(a.data()), sign, FFTW_ESTIMATE);
    if (!p) throw std::runtime_error("FFT plan creation failed");
    fftw_execute(p);
    fftw_destroy_plan(p);
}

}  // namespace detail

inline const CVec& coeffs(const GridField& f) {
    if (!f.coef_valid) {
        f.coef_cache = f.samples;
        detail::fft_inplace(f.coef_cache, f.res, FFTW_FORWARD);
        double inv = 1.0 / static_cast<double>(field_size(f.res));
        for (auto& c : f.coef_cache) c *= inv;
        f.coef_valid = true;
    }
    return f.coef_cache;
}

inline GridField field_from_coeffs(FlatTorus torus, std::vector<int> res, CVec coefs) {
    GridField f = make_field(std::move(torus), std::move(res));
    if (static_cast<long long>(coefs.size()) != field_size(f.res))
        throw std::invalid_argument("coefficient array size mismatch");
    f.coef_cache = std::move(coefs);
    f.samples = f.coef_cache;
    detail::fft_inplace(f.samples, f.res, FFTW_BACKWARD);
    f.coef_valid = true;
    return f;
}

// L2 norms and inner products use the exact quadrature weight vol/N, under
// which the discrete Parseval identity ||u||^2 = vol * sum_k |uhat_k|^2 is
// unitary up to FFT roundoff.
inline double norm_l2(const GridField& f) {
    double s = 0;
    for (const auto& z : f.samples) s += std::norm(z);
    return std::sqrt(s * field_volume(f) / static_cast<double>(f.samples.size()));
}

inline double coeff_norm(const GridField& f) {
    double s = 0;
    for (const auto& z : coeffs(f)) s += std::norm(z);
    return std::sqrt(s * field_volume(f));
}

inline Cplx inner(const GridField& a, const GridField& b) {
    if (!same_grid(a, b)) throw std::invalid_argument("inner product needs matching grids");
    Cplx s = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) s += a.samples[i] * std::conj(b.samples[i]);
    return s * (field_volume(a) / static_cast<double>(a.samples.size()));
}

// ||a^{1/2} u|| for a real nonnegative weight field (the damping raster).
inline double weighted_norm(const GridField& u, const GridField& a) {
    if (!same_grid(u, a)) throw std::invalid_argument("weight grid mismatch");
    double s = 0;
    for (std::size_t i = 0; i < u.samples.size(); ++i)
        s += a.samples[i].real() * std::norm(u.samples[i]);
    return std::sqrt(s * field_volume(u) / static_cast<double>(u.samples.size()));
}

inline void scale_field(GridField& f, Cplx c) {
    for (auto& z : f.samples) z *= c;
    if (f.coef_valid)
        for (auto& z : f.coef_cache) z *= c;
}

// Normalized plane wave e^{i xi_k . x}: the exact discrete eigenfunction of
// the spectral Laplacian with eigenvalue -|xi_k|^2.
inline GridField plane_wave(FlatTorus torus, std::vector<int> res,
                            const std::vector<long long>& k) {
    GridField f = make_field(std::move(torus), std::move(res));
    int d = f.torus.dim();
    if (static_cast<int>(k.size()) != d) throw std::invalid_argument("mode index rank mismatch");
    std::vector<CVec> phase(d);
    for (int j = 0; j < d; ++j) {
        if (2 * std::llabs(k[j]) >= f.res[j])
            throw std::invalid_argument("plane-wave mode not representable at this resolution");
        phase[j].resize(f.res[j]);
        for (int i = 0; i < f.res[j]; ++i) {
            long long m = ((k[j] * i) % f.res[j] + f.res[j]) % f.res[j];
            double ang = 2.0 * M_PI * static_cast<double>(m) / f.res[j];
            phase[j][i] = Cplx(std::cos(ang), std::sin(ang));
        }
    }
    std::vector<int> idx(d, 0);
    double amp = 1.0 / std::sqrt(field_volume(f));
    for (long long i = 0; i < static_cast<long long>(f.samples.size()); ++i) {
        Cplx z = amp;
        for (int j = 0; j < d; ++j) z *= phase[j][idx[j]];
        f.samples[i] = z;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == f.res[j]) idx[j--] = 0;
    }
    return f;
}

// Damping raster: 1 at grid points in the closed support of the damping
// (Interior or Boundary), 0 outside. Grid points are exact rationals, so the
// classification is exact and the raster deterministic; no antialiasing.
inline GridField rasterize_damping(const Scene& sc, std::vector<int> res) {
    GridField a = make_field(sc.torus, std::move(res));
    if (sc.pieces.empty()) return a;
    int d = sc.torus.dim();
    std::vector<std::vector<Rat>> coord(d);
    for (int j = 0; j < d; ++j) {
        coord[j].resize(a.res[j]);
        for (int i = 0; i < a.res[j]; ++i) coord[j][i] = Rat(i) * sc.torus.periods[j] / a.res[j];
    }
    std::vector<int> idx(d, 0);
    RatVec X(d);
    for (long long i = 0; i < static_cast<long long>(a.samples.size()); ++i) {
        for (int j = 0; j < d; ++j) X[j] = coord[j][idx[j]];
        a.samples[i] = in_closed_support(sc, X) ? 1.0 : 0.0;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == a.res[j]) idx[j--] = 0;
    }
    return a;
}

inline GridField rasterize_damping(const Scene& sc, int res) {
    return rasterize_damping(sc, std::vector<int>(sc.torus.dim(), res));
}

// Coefficient-truncated random data: independent complex Gaussians on the
// modes with 1 <= |k|_inf <= kmax, zero mean (no constant mode).
inline GridField band_limited_random(const FlatTorus& torus, const std::vector<int>& res,
                                     int kmax, Rng& rng) {
    CVec c(field_size(res), Cplx(0.0));
    int d = torus.dim();
    std::vector<int> idx(d, 0);
    for (long long i = 0; i < static_cast<long long>(c.size()); ++i) {
        int top = 0;
        bool zero = true;
        for (int j = 0; j < d; ++j) {
            int k = std::abs(freq_index(idx[j], res[j]));
            top = std::max(top, k);
            if (k != 0) zero = false;
        }
        if (!zero && top <= kmax) c[i] = Cplx(rng.normal(), rng.normal());
        int j = d - 1;
        while (j >= 0 && ++idx[j] == res[j]) idx[j--] = 0;
    }
    return field_from_coeffs(torus, res, std::move(c));
}

}  // namespace torwave
