#include <torwave/dense.hpp>
#include <torwave/rng.hpp>
#include <torwave/sphere_flow.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace torwave;

namespace {

constexpr double kPi = 3.14159265358979323846;

double dist(const SpherePoint& a, const SpherePoint& b) {
    double worst = 0;
    for (std::size_t j = 0; j < a.z.size(); ++j) {
        worst = std::max(worst, std::abs(a.z[j] - b.z[j]));
        worst = std::max(worst, std::abs(a.zeta[j] - b.zeta[j]));
    }
    return worst;
}

SpherePoint random_point(Rng& rng, int m, double min_zeta = 0.0) {
    while (true) {
        DVec z(m), zeta(m);
        for (int j = 0; j < m; ++j) z[j] = rng.normal();
        for (int j = 0; j < m; ++j) zeta[j] = rng.normal();
        SpherePoint p = sphere_point(z, zeta);
        double zn = 0;
        for (double c : p.zeta) zn += c * c;
        if (std::sqrt(zn) >= min_zeta) return p;
    }
}

}  // namespace

TEST_CASE("closed-form flow fixes zeta = 0 and nothing else") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        DVec z(3);
        for (auto& c : z) c = rng.normal();
        SpherePoint p = sphere_point(z, DVec(3, 0.0));
        for (double s : {0.5, -2.0, 100.0, 1e6})
            REQUIRE(dist(flow_closed_form(p, s), p) <= 1e-10);
    }
    for (int t = 0; t < 20; ++t) {
        SpherePoint p = random_point(rng, 3, 1e-3);
        REQUIRE(dist(flow_closed_form(p, 10.0), p) > 1e-6);
    }
}

TEST_CASE("closed-form flow matches the hand example") {
    SpherePoint p = sphere_point({0.0, 0.0}, {1.0, 0.0});
    SpherePoint q = flow_closed_form(p, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(q.z[0] - r) <= 1e-15);
    REQUIRE(std::abs(q.z[1]) <= 1e-15);
    REQUIRE(std::abs(q.zeta[0] - r) <= 1e-15);
    REQUIRE(std::abs(q.zeta[1]) <= 1e-15);
}

TEST_CASE("trajectories converge to the zeta direction at infinity") {
    Rng rng(22);
    for (int t = 0; t < 10; ++t) {
        SpherePoint p = random_point(rng, 2, 0.6);
        double zn = 0;
        for (double c : p.zeta) zn += c * c;
        zn = std::sqrt(zn);
        SpherePoint q = flow_closed_form(p, 1e6);
        for (std::size_t j = 0; j < p.z.size(); ++j) {
            REQUIRE(std::abs(q.z[j] - p.zeta[j] / zn) <= 2e-6);
            REQUIRE(std::abs(q.zeta[j]) <= 2e-6);
        }
    }
}

TEST_CASE("closed-form flow obeys the group law and stays normalized") {
    Rng rng(33);
    for (int t = 0; t < 50; ++t) {
        SpherePoint p = random_point(rng, 3);
        double s = rng.uniform(-5.0, 5.0), u = rng.uniform(-5.0, 5.0);
        SpherePoint a = flow_closed_form(flow_closed_form(p, s), u);
        SpherePoint b = flow_closed_form(p, s + u);
        REQUIRE(dist(a, b) <= 1e-10);
        REQUIRE(sphere_norm_defect(a) <= 1e-10);

        // zeta keeps its direction while it shrinks
        double zn0 = 0, zn1 = 0;
        for (double c : p.zeta) zn0 += c * c;
        for (double c : a.zeta) zn1 += c * c;
        zn0 = std::sqrt(zn0);
        zn1 = std::sqrt(zn1);
        if (zn0 > 1e-3) {
            for (std::size_t j = 0; j < p.zeta.size(); ++j)
                REQUIRE(std::abs(a.zeta[j] / zn1 - p.zeta[j] / zn0) <= 1e-12);
        }
    }
}

TEST_CASE("canonical rotation aligns zeta and flattens z") {
    SpherePoint p = sphere_point({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});  // norms 1/sqrt2 each
    CanonicalFrame f = rotate_to_canonical(p);
    const double r = 1.0 / std::sqrt(2.0);
    REQUIRE(orthonormality_error(f.R_zeta) <= 1e-12);
    REQUIRE(orthonormality_error(f.R_z) <= 1e-12);
    REQUIRE(std::abs(f.canonical.zeta[0] - r) <= 1e-12);
    REQUIRE(std::abs(f.canonical.zeta[1]) <= 1e-12);
    REQUIRE(std::abs(f.canonical.zeta[2]) <= 1e-12);
    // z was orthogonal to zeta, so its canonical image sits on the second axis
    REQUIRE(std::abs(f.canonical.z[0]) <= 1e-12);
    REQUIRE(std::abs(f.canonical.z[1] - r) <= 1e-12);
    REQUIRE(std::abs(f.canonical.z[2]) <= 1e-12);

    // already-canonical points get identity rotations
    CanonicalFrame g = rotate_to_canonical(f.canonical);
    REQUIRE(dist(apply_frame(g, f.canonical), f.canonical) <= 1e-12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            REQUIRE(std::abs(g.R_zeta[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-12);
            REQUIRE(std::abs(g.R_z[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-12);
        }
}

TEST_CASE("canonical rotation commutes with the flow") {
    Rng rng(44);
    for (int m : {2, 3, 5}) {
        for (int t = 0; t < 20; ++t) {
            SpherePoint p = random_point(rng, m, 1e-3);
            CanonicalFrame f = rotate_to_canonical(p);
            SpherePoint lhs = apply_frame(f, flow_closed_form(p, 0.7));
            SpherePoint rhs = flow_closed_form(apply_frame(f, p), 0.7);
            REQUIRE(dist(lhs, rhs) <= 1e-10);
            REQUIRE(dist(unapply_frame(f, apply_frame(f, p)), p) <= 1e-12);
        }
    }
}

TEST_CASE("angle coordinates are constant except the polar one") {
    Rng rng(55);
    for (int t = 0; t < 20; ++t) {
        SpherePoint p = random_point(rng, 3, 1e-2);
        CanonicalFrame f0 = rotate_to_canonical(p);
        for (double s : {0.3, 2.0, 17.0}) {
            CanonicalFrame fs = rotate_to_canonical(flow_closed_form(p, s));
            REQUIRE(std::abs(fs.angles.theta2 - f0.angles.theta2) <= 1e-9);
            REQUIRE(fs.angles.theta3 == f0.angles.theta3);
        }
    }
}

TEST_CASE("angle integrator reproduces the separable solution") {
    SpherePoint p = sphere_point({0.0, 0.0}, {1.0, 0.0});
    CanonicalFrame f = rotate_to_canonical(p);
    REQUIRE(std::abs(f.angles.theta1 - kPi / 2.0) <= 1e-12);
    REQUIRE(std::abs(f.angles.theta2) <= 1e-12);

    SpherePoint q = flow_angle_ode(p, 1.0, 1e-3);
    // cot(theta1(s)) = cot(theta1(0)) + s gives theta1(1) = pi/4
    REQUIRE(std::abs(std::acos(std::clamp(q.z[0], -1.0, 1.0)) - kPi / 4.0) <= 1e-8);
    REQUIRE(dist(q, flow_closed_form(p, 1.0)) <= 1e-8);
}

TEST_CASE("angle integrator agrees with the closed form everywhere") {
    Rng rng(66);
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        int m = t % 2 ? 2 : 3;
        SpherePoint p = random_point(rng, m, 1e-2);
        for (double s : {0.5, 3.0, 20.0, 100.0})
            worst = std::max(worst, dist(flow_angle_ode(p, s, 1e-3), flow_closed_form(p, s)));
    }
    REQUIRE(worst <= 1e-6);

    SpherePoint fixed = sphere_point({0.6, -0.8}, {0.0, 0.0});
    REQUIRE(dist(flow_angle_ode(fixed, 5.0), fixed) == 0.0);
    REQUIRE_THROWS_AS(flow_angle_ode(sphere_point({1.0, 0.0}, {0.0, 1.0}), 1.0, 0.0),
                      std::invalid_argument);
}

TEST_CASE("circle flow solves theta' = -sin^2 theta exactly") {
    for (double s : {0.0, 0.5, 7.0, -3.0}) REQUIRE(circle_flow_theta(0.0, s) == 0.0);
    REQUIRE(std::abs(circle_flow_theta(kPi / 2.0, 1.0) - kPi / 4.0) <= 1e-12);
    // backward from pi/4 returns to pi/2
    REQUIRE(std::abs(circle_flow_theta(kPi / 4.0, -1.0) - kPi / 2.0) <= 1e-12);

    // converges to 0 mod pi: the branch floor is the limit
    REQUIRE(std::abs(circle_flow_theta(3.0 * kPi / 4.0, 1e6)) <= 2e-6);
    REQUIRE(std::abs(circle_flow_theta(3.0 * kPi / 2.0, 1e6) - kPi) <= 2e-6);
    REQUIRE(circle_flow_theta(3.0 * kPi / 4.0, 1e6) > 0.0);

    // semigroup property on one branch
    double a = circle_flow_theta(circle_flow_theta(1.1, 0.4), 0.6);
    double b = circle_flow_theta(1.1, 1.0);
    REQUIRE(std::abs(a - b) <= 1e-12);
}
