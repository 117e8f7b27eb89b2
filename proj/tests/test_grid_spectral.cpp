#include <torwave/grid_field.hpp>
#include <torwave/presets.hpp>
#include <torwave/rng.hpp>
#include <torwave/wave.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

using namespace torwave;

namespace {

GridField random_field(const FlatTorus& torus, std::vector<int> res, Rng& rng) {
    GridField f = make_field(torus, std::move(res));
    for (auto& z : f.samples) z = Cplx(rng.normal(), rng.normal());
    invalidate_coeffs(f);
    return f;
}

// Closed-form solution of u'' + u' + w2 u = 0 as a 2x2 propagator.
void damped_mode_exact(double w2, double t, Cplx& u, Cplx& v) {
    Cplx u0 = u, v0 = v;
    double disc = 1.0 - 4.0 * w2;
    double e = std::exp(-0.5 * t);
    double ch, sh;  // cosh/sinh (or cos/sin) of the half-discriminant angle
    if (disc >= 0) {
        double mu = 0.5 * std::sqrt(disc);
        ch = std::cosh(mu * t);
        sh = mu == 0 ? t : std::sinh(mu * t) / mu;
    } else {
        double mu = 0.5 * std::sqrt(-disc);
        ch = std::cos(mu * t);
        sh = std::sin(mu * t) / mu;
    }
    u = e * ((ch + 0.5 * sh) * u0 + sh * v0);
    v = e * (-w2 * sh * u0 + (ch - 0.5 * sh) * v0);
}

}  // namespace

TEST_CASE("parseval holds between samples and coefficients") {
    Rng rng(0x5eed);
    FlatTorus t2 = make_torus({1, Rat(3, 2)});
    GridField f = random_field(t2, {32, 16}, rng);
    REQUIRE(norm_l2(f) ==
            Catch::Approx(coeff_norm(f)).epsilon(1e-10));

    FlatTorus t3 = make_torus({2, 1, Rat(1, 2)});
    GridField g = random_field(t3, {16, 8, 8}, rng);
    REQUIRE(norm_l2(g) == Catch::Approx(coeff_norm(g)).epsilon(1e-10));

    GridField back = field_from_coeffs(g.torus, g.res, coeffs(g));
    double worst = 0;
    for (std::size_t i = 0; i < g.samples.size(); ++i)
        worst = std::max(worst, std::abs(back.samples[i] - g.samples[i]));
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("plane waves occupy a single coefficient slot") {
    GridField f = plane_wave(make_torus({2, 2}), {16, 16}, {3, -5});
    const CVec& c = coeffs(f);
    // slot of k = (3, -5) in wrap-around order: (3, 16-5) = (3, 11)
    long long slot = 3 * 16 + 11;
    REQUIRE(std::abs(c[slot] - Cplx(0.5)) <= 1e-12);  // 1/sqrt(vol)
    double rest = 0;
    for (long long i = 0; i < static_cast<long long>(c.size()); ++i)
        if (i != slot) rest = std::max(rest, std::abs(c[i]));
    REQUIRE(rest <= 1e-13);
    REQUIRE(norm_l2(f) == Catch::Approx(1.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(plane_wave(make_torus({2, 2}), {16, 16}, {8, 0}), std::invalid_argument);
}

TEST_CASE("field construction rejects bad resolutions") {
    REQUIRE_THROWS_AS(make_field(make_torus({1, 1}), {16, 12}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_field(make_torus({1, 1}), {16, 4}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_field(make_torus({1, 1}), std::vector<int>{16}), std::invalid_argument);
}

TEST_CASE("rasterized damping matches exact volumes") {
    SECTION("empty scene gives the zero field") {
        GridField a = rasterize_damping(preset_empty({2, 2}), 16);
        for (const auto& z : a.samples) REQUIRE(z == Cplx(0.0));
    }
    SECTION("full scene gives all ones") {
        GridField a = rasterize_damping(preset_full({2, 2}), 16);
        for (const auto& z : a.samples) REQUIRE(z == Cplx(1.0));
    }
    SECTION("straight prisms fill their exact volume fraction") {
        Scene sc = preset_straight_prisms();
        // Pieces are axis boxes with pairwise disjoint interiors, so the
        // union volume is the plain sum of box volumes.
        Rat vol = 0;
        for (const auto& box : sc.boxes) {
            Rat piece = 1;
            for (const auto& iv : box) piece *= *iv.hi - *iv.lo;
            vol += piece;
        }
        REQUIRE(vol == Rat(13, 2));
        double frac = to_double(vol / sc.torus.volume());

        GridField a = rasterize_damping(sc, 32);
        double ones = 0;
        for (const auto& z : a.samples) ones += z.real();
        double measured = ones / static_cast<double>(a.samples.size());
        // closed-support sampling overshoots by at most one cell per face
        REQUIRE(measured >= frac - 1e-12);
        REQUIRE(measured <= frac + 6.0 / 32);

        GridField b = rasterize_damping(sc, 32);
        REQUIRE(a.samples == b.samples);
    }
}

TEST_CASE("energy reproduces the analytic oracle") {
    FlatTorus torus = make_torus({2, 2});
    Scene sc = preset_empty({2, 2});

    SECTION("zero state has zero energy") {
        WaveState st = make_wave_state(sc, make_field(torus, 32), make_field(torus, 32), 0.0);
        REQUIRE(energy(st) == 0.0);
    }
    SECTION("u = cos(pi x1) on periods (2,2) has energy pi^2") {
        GridField u = make_field(torus, 32);
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j)
                u.samples[i * 32 + j] = std::cos(M_PI * (2.0 * i / 32));
        invalidate_coeffs(u);
        WaveState st = make_wave_state(sc, std::move(u), make_field(torus, 32), 0.0);
        REQUIRE(energy(st) == Catch::Approx(M_PI * M_PI).epsilon(1e-12));
    }
    SECTION("constant displacement with m = 1 stores potential energy only") {
        GridField u = make_field(torus, 16);
        for (auto& z : u.samples) z = 1.0;
        invalidate_coeffs(u);
        WaveState st = make_wave_state(sc, std::move(u), make_field(torus, 16), 1.0);
        REQUIRE(energy(st) == Catch::Approx(0.5 * 4.0).epsilon(1e-12));
    }
}

TEST_CASE("undamped stepping is exact per mode") {
    FlatTorus torus = make_torus({1, 1});
    Scene sc = preset_empty({1, 1});
    GridField u = plane_wave(torus, {16, 16}, {2, 1});
    GridField v = make_field(torus, {16, 16});
    WaveState st = make_wave_state(sc, std::move(u), std::move(v), 0.0);

    double E0 = energy(st);
    double w = 2.0 * M_PI * std::sqrt(5.0);
    WaveState cur = st;
    for (int s = 0; s < 20; ++s) {
        WaveState next = step_damped_wave(cur, 0.05);
        REQUIRE(std::abs(energy(next) - E0) <= 1e-13 * E0);
        cur = next;
    }
    // after time t the mode is cos(w t) u0
    const CVec& c = coeffs(cur.u);
    long long slot = 2 * 16 + 1;
    REQUIRE(std::abs(c[slot] - Cplx(std::cos(w))) <= 1e-10);

    SECTION("zero data stays zero") {
        WaveState z = make_wave_state(sc, make_field(torus, {8, 8}), make_field(torus, {8, 8}), 0.0);
        WaveState z1 = step_damped_wave(z, 0.1);
        for (const auto& s : z1.u.samples) REQUIRE(s == Cplx(0.0));
        for (const auto& s : z1.v.samples) REQUIRE(s == Cplx(0.0));
    }
}

TEST_CASE("strang splitting is second order against the mode oracle") {
    FlatTorus torus = make_torus({1, 1});
    Scene sc = preset_full({1, 1});  // a == 1 everywhere
    GridField u0 = plane_wave(torus, {16, 16}, {1, 0});
    GridField v0 = make_field(torus, {16, 16});
    double w2 = 4.0 * M_PI * M_PI;

    Cplx ue = coeffs(u0)[1 * 16 + 0], ve = 0.0;
    damped_mode_exact(w2, 1.0, ue, ve);

    DVec dts = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    DVec errs;
    for (double dt : dts) {
        WaveState st = make_wave_state(sc, u0, v0, 0.0);
        int n = static_cast<int>(std::llround(1.0 / dt));
        for (int s = 0; s < n; ++s) st = step_damped_wave(st, dt);
        Cplx uh = coeffs(st.u)[1 * 16 + 0];
        Cplx vh = coeffs(st.v)[1 * 16 + 0];
        errs.push_back(std::hypot(std::abs(uh - ue), std::abs(vh - ve)));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        double slope = std::log2(errs[i] / errs[i + 1]);
        REQUIRE(slope == Catch::Approx(2.0).margin(0.1));
    }
}

TEST_CASE("constant damping acts exactly on the velocity") {
    FlatTorus torus = make_torus({1, 1});
    Scene sc = preset_full({1, 1});
    GridField u0 = make_field(torus, {8, 8});
    GridField v0 = plane_wave(torus, {8, 8}, {0, 0});  // constant velocity
    WaveState st = make_wave_state(sc, std::move(u0), std::move(v0), 0.0);
    WaveState out = step_damped_wave(st, 0.25);
    // w = 0 mode: two exact drifts around one exact decay
    Cplx v1 = std::exp(-0.25) * coeffs(st.v)[0];
    REQUIRE(std::abs(coeffs(out.v)[0] - v1) <= 1e-14);
    Cplx u1 = 0.125 * coeffs(st.v)[0] + 0.125 * v1;
    REQUIRE(std::abs(coeffs(out.u)[0] - u1) <= 1e-14);
}

TEST_CASE("undamped runs conserve energy") {
    Rng rng(0xabcd);
    FlatTorus torus = make_torus({1, 1});
    Scene sc = preset_empty({1, 1});
    GridField u0 = band_limited_random(torus, {32, 32}, 6, rng);
    GridField v0 = band_limited_random(torus, {32, 32}, 6, rng);
    SimulationResult res = run_simulation(sc, u0, v0, 0.0, 10.0, 1e-3, 100);
    double E0 = res.trace.energy.front();
    for (double E : res.trace.energy) REQUIRE(std::abs(E - E0) <= 1e-8 * E0);
    for (double f : res.trace.flux) REQUIRE(f == 0.0);
}

TEST_CASE("energy identity residual is second order in dt") {
    Rng rng(0x1dea);
    FlatTorus torus = make_torus({1, 1});
    Scene sc = make_scene(make_torus({1, 1}),
                          {detail::box({{Rat(1, 4), Rat(3, 4)}, {0, 1}})}, "halfband");
    GridField u0 = band_limited_random(torus, {32, 32}, 5, rng);
    GridField v0 = band_limited_random(torus, {32, 32}, 5, rng);

    auto worst_residual = [&](double dt) {
        SimulationResult res = run_simulation(sc, u0, v0, 0.0, 2.0, dt, 50);
        double E0 = res.trace.energy.front();
        double worst = 0;
        for (std::size_t i = 0; i < res.trace.energy.size(); ++i) {
            REQUIRE(res.trace.energy[i] <= E0 + 1e-12 * E0);  // monotone decay
            if (i) REQUIRE(res.trace.energy[i] <= res.trace.energy[i - 1] + 1e-12 * E0);
            worst = std::max(worst, std::abs(res.trace.residual[i]));
        }
        return worst / E0;
    };

    double r1 = worst_residual(1e-3);
    REQUIRE(r1 <= 1e-5);
    double r2 = worst_residual(5e-4);
    REQUIRE(r2 <= r1 / 3.0);  // ~ quarters
}

TEST_CASE("non-finite data aborts the run with diagnostics") {
    FlatTorus torus = make_torus({1, 1});
    Scene sc = preset_empty({1, 1});
    GridField u0 = make_field(torus, {8, 8});
    u0.samples[3] = Cplx(INFINITY, 0.0);
    invalidate_coeffs(u0);
    try {
        run_simulation(sc, u0, make_field(torus, {8, 8}), 0.0, 1.0, 0.1);
        FAIL("expected SimulationAbort");
    } catch (const SimulationAbort& ab) {
        REQUIRE_THAT(ab.what(), Catch::Matchers::ContainsSubstring("non-finite"));
        // Blows up on the very first sample: nothing recorded, state pinned at t = 0.
        REQUIRE(ab.trace.times.empty());
        REQUIRE(ab.t == 0.0);
        REQUIRE(ab.u.samples.size() == 64);
        REQUIRE(ab.v.samples.size() == 64);
    }
}

TEST_CASE("decay fit recovers exact exponentials") {
    EnergyTrace tr;
    for (int i = 0; i <= 100; ++i) {
        double t = 0.1 * i;
        tr.times.push_back(t);
        tr.energy.push_back(3.0 * std::exp(-0.7 * t));
        tr.flux.push_back(0);
        tr.residual.push_back(0);
    }
    DecayFit fit = fit_decay_rate(tr, 0.0, 10.0);
    REQUIRE(fit.rate == Catch::Approx(0.7).margin(1e-12));
    REQUIRE(fit.prefactor == Catch::Approx(3.0).epsilon(1e-12));
    REQUIRE(fit.r_squared == Catch::Approx(1.0).margin(1e-12));

    tr.energy[50] = -1.0;
    REQUIRE_THROWS_AS(fit_decay_rate(tr, 0.0, 10.0), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_decay_rate(tr, 20.0, 30.0), std::invalid_argument);
}

TEST_CASE("undamped runs fit a zero rate") {
    Rng rng(0x0f17);
    FlatTorus torus = make_torus({1, 1});
    GridField u0 = band_limited_random(torus, {16, 16}, 3, rng);
    GridField v0 = band_limited_random(torus, {16, 16}, 3, rng);
    SimulationResult res = run_simulation(preset_empty({1, 1}), u0, v0, 0.0, 5.0, 1e-2, 10);
    DecayFit fit = fit_decay_rate(res.trace, 0.0, 5.0);
    REQUIRE(std::abs(fit.rate) <= 1e-6);
}

TEST_CASE("constant damping matches the per-mode oracle rate") {
    Rng rng(0xdeca);
    FlatTorus torus = make_torus({1, 1});
    Scene sc = preset_full({1, 1});
    GridField u0 = band_limited_random(torus, {64, 64}, 4, rng);
    GridField v0 = band_limited_random(torus, {64, 64}, 4, rng);
    double oracle = constant_damping_rate(u0, v0, 0.0);
    REQUIRE(oracle == Catch::Approx(1.0));  // all modes underdamped at |xi| >= 2 pi

    SimulationResult res = run_simulation(sc, u0, v0, 0.0, 8.0, 1e-3, 100);
    DecayFit fit = fit_decay_rate(res.trace, 4.0, 8.0);
    REQUIRE(fit.rate == Catch::Approx(oracle).epsilon(0.05));
    REQUIRE(fit.r_squared >= 0.95);
}
