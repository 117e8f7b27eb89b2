#pragma once

#include <torwave/quasimode.hpp>

#include <functional>

namespace torwave {

namespace detail {

// uhat_k <- m(xi_k) uhat_k with m evaluated on the physical frequency vector.
inline GridField apply_xi_multiplier(const GridField& u,
                                     const std::function<double(const DVec&)>& m) {
    CVec c = coeffs(u);
    auto xi = frequency_tables(u.torus, u.res);
    int d = u.torus.dim();
    std::vector<int> idx(d, 0);
    DVec v(d);
    for (long long i = 0; i < static_cast<long long>(c.size()); ++i) {
        for (int j = 0; j < d; ++j) v[j] = xi[j][idx[j]];
        c[i] *= m(v);
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    return field_from_coeffs(u.torus, u.res, std::move(c));
}

}  // namespace detail

// Semiclassical Fourier multiplier chi(h D): uhat_k <- chi(h xi_k) uhat_k.
inline GridField fourier_multiplier(const GridField& u, double h,
                                    const std::function<double(const DVec&)>& chi) {
    if (h <= 0) throw std::invalid_argument("need h > 0");
    if (!chi) throw std::invalid_argument("multiplier needs a symbol");
    return detail::apply_xi_multiplier(u, [&](const DVec& xi) {
        DVec s(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j) s[j] = h * xi[j];
        return chi(s);
    });
}

// Product symbol q(x, Xi) = q_X(x) q_Xi(Xi) quantized as q_X(x) q_Xi(h D).
// An empty component means the constant 1; with both empty the mass is
// exactly ||u||^2 and no transform is taken.
struct SeparableSymbol {
    std::function<double(const DVec&)> in_x;
    std::function<double(const DVec&)> in_xi;
};

// <q_X q_Xi(hD) u, u> by midpoint quadrature on the sample grid.
inline Cplx microlocal_mass(const GridField& u, double h, const SeparableSymbol& q) {
    const GridField* w = &u;
    GridField filtered;
    if (q.in_xi) {
        filtered = fourier_multiplier(u, h, q.in_xi);
        w = &filtered;
    }
    int d = u.torus.dim();
    std::vector<DVec> coord(d);
    for (int j = 0; j < d; ++j) {
        double A = to_double(u.torus.periods[j]);
        coord[j].resize(u.res[j]);
        for (int i = 0; i < u.res[j]; ++i) coord[j][i] = i * A / u.res[j];
    }
    std::vector<int> idx(d, 0);
    DVec x(d);
    Cplx acc = 0;
    for (long long i = 0; i < static_cast<long long>(u.samples.size()); ++i) {
        Cplx term = w->samples[i] * std::conj(u.samples[i]);
        if (q.in_x) {
            for (int j = 0; j < d; ++j) x[j] = coord[j][idx[j]];
            term *= q.in_x(x);
        }
        acc += term;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    return acc * (field_volume(u) / static_cast<double>(u.samples.size()));
}

// Second-microlocal observable along the geodesic plane x_perp = center_perp:
// on top of the base symbol, a transverse window pair at the bridging scale
// (w_z on eps h^{-1/2} (x_perp - c_perp), w_zeta on eps h^{1/2} xi_perp) and a
// longitudinal cutoff psi on eps^{3/2} h^{-1/2} (x_axis - c_axis). Transverse
// arguments are the d-1 wrapped coordinates in axis order.
struct SecondMicroSymbol {
    int axis = 0;
    DVec center;  // full d-vector; the axis entry centers the cutoff psi
    SeparableSymbol base;
    std::function<double(const DVec&)> w_z;
    std::function<double(const DVec&)> w_zeta;
    std::function<double(double)> psi;
};

struct SecondMicroMass {
    Cplx value;
    bool regime_ok = false;  // sqrt(h) <= eps and sqrt(h)/eps^2 <= 1/2
};

inline SecondMicroMass second_microlocal_mass(const GridField& u, double h, double eps,
                                              const SecondMicroSymbol& sym) {
    if (h <= 0 || eps <= 0) throw std::invalid_argument("need h > 0 and eps > 0");
    int d = u.torus.dim();
    if (sym.axis < 0 || sym.axis >= d) throw std::invalid_argument("axis out of range");
    if (static_cast<int>(sym.center.size()) != d)
        throw std::invalid_argument("center dimension mismatch");

    const double rh = std::sqrt(h);
    const GridField* w = &u;
    GridField filtered;
    if (sym.base.in_xi || sym.w_zeta) {
        filtered = detail::apply_xi_multiplier(u, [&](const DVec& xi) {
            double m = 1.0;
            if (sym.base.in_xi) {
                DVec s(xi.size());
                for (std::size_t j = 0; j < xi.size(); ++j) s[j] = h * xi[j];
                m *= sym.base.in_xi(s);
            }
            if (sym.w_zeta) {
                DVec zeta;
                zeta.reserve(xi.size() - 1);
                for (int j = 0; j < d; ++j)
                    if (j != sym.axis) zeta.push_back(eps * rh * xi[j]);
                m *= sym.w_zeta(zeta);
            }
            return m;
        });
        w = &filtered;
    }

    std::vector<DVec> coord(d), wrapped(d);
    for (int j = 0; j < d; ++j) {
        double A = to_double(u.torus.periods[j]);
        coord[j].resize(u.res[j]);
        wrapped[j].resize(u.res[j]);
        for (int i = 0; i < u.res[j]; ++i) {
            coord[j][i] = i * A / u.res[j];
            wrapped[j][i] = detail::wrap_to_half(coord[j][i] - sym.center[j], A);
        }
    }
    std::vector<int> idx(d, 0);
    DVec x(d), z(d - 1);
    Cplx acc = 0;
    for (long long i = 0; i < static_cast<long long>(u.samples.size()); ++i) {
        double fac = 1.0;
        if (sym.base.in_x) {
            for (int j = 0; j < d; ++j) x[j] = coord[j][idx[j]];
            fac *= sym.base.in_x(x);
        }
        if (sym.w_z) {
            int t = 0;
            for (int j = 0; j < d; ++j)
                if (j != sym.axis) z[t++] = eps / rh * wrapped[j][idx[j]];
            fac *= sym.w_z(z);
        }
        if (sym.psi) fac *= sym.psi(eps * std::sqrt(eps) / rh * wrapped[sym.axis][idx[sym.axis]]);
        acc += fac * w->samples[i] * std::conj(u.samples[i]);
        int j = d - 1;
        while (j >= 0 && ++idx[j] == u.res[j]) idx[j--] = 0;
    }
    SecondMicroMass out;
    out.value = acc * (field_volume(u) / static_cast<double>(u.samples.size()));
    out.regime_ok = eps + 1e-12 >= rh && rh / (eps * eps) <= 0.5 + 1e-12;
    return out;
}

}  // namespace torwave
