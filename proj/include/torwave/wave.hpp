#pragma once

#include <torwave/grid_field.hpp>

#include <cmath>
#include <string>

namespace torwave {

// State of the damped wave (d_t^2 - Lap + a(x) d_t + m) u = 0: displacement,
// velocity, the scene whose damping acts, and its 0/1 raster on the grid.
struct WaveState {
    GridField u;
    GridField v;
    double t = 0;
    Scene scene;
    double m = 0;
    GridField a;
};

inline WaveState make_wave_state(const Scene& sc, GridField u0, GridField v0, double m) {
    if (!same_grid(u0, v0)) throw std::invalid_argument("u and v live on different grids");
    if (m < 0) throw std::invalid_argument("potential constant must be nonnegative");
    GridField a = rasterize_damping(sc, u0.res);
    if (!same_grid(u0, a)) throw std::invalid_argument("scene torus does not match the fields");
    return WaveState{std::move(u0), std::move(v0), 0.0, sc, m, std::move(a)};
}

namespace detail {

// Per-mode tables for the exact undamped propagator over a half step tau:
// each mode rotates at frequency w = sqrt(|xi|^2 + m), and the secular mode
// w = 0 drifts as u += tau v (c = 1, sw = tau, ws = 0 covers it uniformly).
struct HalfStepTables {
    DVec c, sw, ws;
};

inline HalfStepTables half_step_tables(const FlatTorus& torus, const std::vector<int>& res,
                                       double m, double tau) {
    DVec xi2 = frequency_squares(torus, res);
    HalfStepTables t;
    t.c.resize(xi2.size());
    t.sw.resize(xi2.size());
    t.ws.resize(xi2.size());
    for (std::size_t i = 0; i < xi2.size(); ++i) {
        double w = std::sqrt(xi2[i] + m);
        if (w == 0.0) {
            t.c[i] = 1.0;
            t.sw[i] = tau;
            t.ws[i] = 0.0;
        } else {
            t.c[i] = std::cos(w * tau);
            double s = std::sin(w * tau);
            t.sw[i] = s / w;
            t.ws[i] = s * w;
        }
    }
    return t;
}

inline void rotate_modes(CVec& uh, CVec& vh, const HalfStepTables& t) {
    for (std::size_t i = 0; i < uh.size(); ++i) {
        Cplx u0 = uh[i], v0 = vh[i];
        uh[i] = t.c[i] * u0 + t.sw[i] * v0;
        vh[i] = t.c[i] * v0 - t.ws[i] * u0;
    }
}

}  // namespace detail

// Energy E = (1/2)(||grad u||^2 + ||v||^2 + m ||u||^2), with the gradient
// taken spectrally; evaluated entirely in coefficient space.
inline double energy(const WaveState& st) {
    const CVec& uh = coeffs(st.u);
    const CVec& vh = coeffs(st.v);
    DVec xi2 = frequency_squares(st.u.torus, st.u.res);
    double s = 0;
    for (std::size_t i = 0; i < uh.size(); ++i)
        s += (xi2[i] + st.m) * std::norm(uh[i]) + std::norm(vh[i]);
    return 0.5 * field_volume(st.u) * s;
}

// One Strang step: exact Fourier propagation of the undamped wave for dt/2,
// exact pointwise damping decay v <- v e^{-a dt}, exact propagation for dt/2.
// Unconditionally stable; second-order accurate for the coupled system.
inline WaveState step_damped_wave(const WaveState& st, double dt) {
    if (dt <= 0) throw std::invalid_argument("time step must be positive");
    detail::HalfStepTables half =
        detail::half_step_tables(st.u.torus, st.u.res, st.m, 0.5 * dt);
    CVec uh = coeffs(st.u);
    CVec vh = coeffs(st.v);
    detail::rotate_modes(uh, vh, half);

    GridField v = field_from_coeffs(st.u.torus, st.u.res, std::move(vh));
    for (std::size_t i = 0; i < v.samples.size(); ++i)
        v.samples[i] *= std::exp(-st.a.samples[i].real() * dt);
    invalidate_coeffs(v);
    vh = coeffs(v);
    detail::rotate_modes(uh, vh, half);

    WaveState out = st;
    out.u = field_from_coeffs(st.u.torus, st.u.res, std::move(uh));
    out.v = field_from_coeffs(st.u.torus, st.u.res, std::move(vh));
    out.t = st.t + dt;
    return out;
}

// Sampled energy history of one run. The identity residual at a sample time
// is E(t) - E(0) + flux(t); for the exact solution it vanishes, and the
// recorded one isolates the O(dt^2) flux quadrature error.
struct EnergyTrace {
    DVec times;
    DVec energy;
    DVec flux;
    DVec residual;
};

struct SimulationResult {
    EnergyTrace trace;
    WaveState final_state;
};

// Thrown when the energy turns non-finite mid-run; carries the trace up to
// the last finite sample and that sample's state for post-mortem dumps.
struct SimulationAbort : std::runtime_error {
    SimulationAbort(const std::string& msg, EnergyTrace tr, GridField gu, GridField gv,
                    double gt)
        : std::runtime_error(msg),
          trace(std::move(tr)),
          u(std::move(gu)),
          v(std::move(gv)),
          t(gt) {}
    EnergyTrace trace;
    GridField u, v;  // last recorded finite state
    double t;
};

// Iterates the Strang step with the velocity held in coefficient space;
// only the damping sub-step and its flux quadrature touch sample space, and
// the flux integrand uses the mid-step velocity |v e^{-a dt/2}|^2.
inline SimulationResult run_simulation(const Scene& sc, const GridField& u0, const GridField& v0,
                                       double m, double T, double dt, int stride = 1) {
    if (T <= 0 || dt <= 0) throw std::invalid_argument("need T > 0 and dt > 0");
    if (stride < 1) throw std::invalid_argument("sample stride must be positive");
    WaveState state = make_wave_state(sc, u0, v0, m);
    long long nsteps = std::llround(T / dt);
    if (nsteps < 1) nsteps = 1;

    const FlatTorus& torus = state.u.torus;
    const std::vector<int>& res = state.u.res;
    double vol = field_volume(state.u);
    long long N = field_size(res);
    detail::HalfStepTables half = detail::half_step_tables(torus, res, m, 0.5 * dt);
    DVec xi2 = frequency_squares(torus, res);

    bool damped = false;
    DVec decay(N), fluxw(N);
    for (long long i = 0; i < N; ++i) {
        double ai = state.a.samples[i].real();
        decay[i] = std::exp(-ai * dt);
        fluxw[i] = ai * decay[i];
        if (ai != 0.0) damped = true;
    }

    CVec uh = coeffs(state.u);
    CVec vh = coeffs(state.v);
    CVec vsamp(N);

    auto spectral_energy = [&]() {
        double s = 0;
        for (long long i = 0; i < N; ++i)
            s += (xi2[i] + m) * std::norm(uh[i]) + std::norm(vh[i]);
        return 0.5 * vol * s;
    };

    EnergyTrace trace;
    double E0 = spectral_energy();
    double flux = 0;
    CVec good_u = uh, good_v = vh;
    double good_t = 0;
    auto record = [&](double t) {
        double E = spectral_energy();
        if (!std::isfinite(E)) {
            double t_good = trace.times.empty() ? 0.0 : trace.times.back();
            throw SimulationAbort(
                "simulation aborted: non-finite energy at t = " + std::to_string(t) +
                    " (last good sample at t = " + std::to_string(t_good) + ")",
                std::move(trace), field_from_coeffs(torus, res, std::move(good_u)),
                field_from_coeffs(torus, res, std::move(good_v)), good_t);
        }
        trace.times.push_back(t);
        trace.energy.push_back(E);
        trace.flux.push_back(flux);
        trace.residual.push_back(E - E0 + flux);
        good_u = uh;
        good_v = vh;
        good_t = t;
    };
    record(0.0);

    for (long long step = 1; step <= nsteps; ++step) {
        detail::rotate_modes(uh, vh, half);
        if (damped) {
            vsamp = vh;
            detail::fft_inplace(vsamp, res, FFTW_BACKWARD);
            double fsum = 0;
            for (long long i = 0; i < N; ++i) {
                fsum += fluxw[i] * std::norm(vsamp[i]);
                vsamp[i] *= decay[i];
            }
            flux += dt * fsum * vol / static_cast<double>(N);
            detail::fft_inplace(vsamp, res, FFTW_FORWARD);
            double inv = 1.0 / static_cast<double>(N);
            for (long long i = 0; i < N; ++i) vh[i] = vsamp[i] * inv;
        }
        detail::rotate_modes(uh, vh, half);
        if (step % stride == 0 || step == nsteps) record(static_cast<double>(step) * dt);
    }

    state.u = field_from_coeffs(torus, res, std::move(uh));
    state.v = field_from_coeffs(torus, res, std::move(vh));
    state.t = static_cast<double>(nsteps) * dt;
    return SimulationResult{std::move(trace), std::move(state)};
}

struct DecayFit {
    double rate = 0;       // c in E ~ C e^{-c t}
    double prefactor = 0;  // C
    double r_squared = 1;
};

// Least-squares line on log E(t) over the window [t_lo, t_hi].
inline DecayFit fit_decay_rate(const EnergyTrace& trace, double t_lo, double t_hi) {
    DVec ts, ys;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i];
        if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
        if (trace.energy[i] <= 0)
            throw std::invalid_argument("nonpositive energy in the fit window");
        ts.push_back(t);
        ys.push_back(std::log(trace.energy[i]));
    }
    if (ts.size() < 2) throw std::invalid_argument("fit window holds fewer than two samples");
    double n = static_cast<double>(ts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    double denom = n * stt - st * st;
    if (denom == 0) throw std::invalid_argument("degenerate fit window");
    double slope = (n * sty - st * sy) / denom;
    double intercept = (sy - slope * st) / n;
    double mean = sy / n, ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double fit = slope * ts[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    return DecayFit{-slope, std::exp(intercept), ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot};
}

// Exact decay rate of the constant-damping problem (a == 1): each mode obeys
// u'' + u' + (|xi|^2 + m) u = 0 with roots of z^2 + z + w^2, and its energy
// decays at -2 max Re z (underdamped modes: rate exactly 1). The slowest
// excited mode bounds the fit. A zero-frequency mode carries energy only
// through its velocity, which relaxes at rate 2.
inline double constant_damping_rate(const GridField& u0, const GridField& v0, double m,
                                    double rel_tol = 1e-9) {
    const CVec& uh = coeffs(u0);
    const CVec& vh = coeffs(v0);
    DVec xi2 = frequency_squares(u0.torus, u0.res);
    double amax = 0;
    for (std::size_t i = 0; i < uh.size(); ++i)
        amax = std::max(amax, std::max(std::abs(uh[i]), std::abs(vh[i])));
    double rate = INFINITY;
    for (std::size_t i = 0; i < uh.size(); ++i) {
        double w2 = xi2[i] + m;
        bool u_on = std::abs(uh[i]) > rel_tol * amax;
        bool v_on = std::abs(vh[i]) > rel_tol * amax;
        if (!u_on && !v_on) continue;
        double r;
        if (w2 == 0.0) {
            if (!v_on) continue;  // a constant displacement carries no energy
            r = 2.0;
        } else if (4.0 * w2 >= 1.0) {
            r = 1.0;
        } else {
            r = 1.0 - std::sqrt(1.0 - 4.0 * w2);
        }
        rate = std::min(rate, r);
    }
    if (!std::isfinite(rate)) throw std::invalid_argument("no excited modes in the initial data");
    return rate;
}

}  // namespace torwave
