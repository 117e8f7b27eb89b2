#include <torwave/dense.hpp>
#include <torwave/intlat.hpp>
#include <torwave/reduction.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace torwave;

namespace {

IntVec iv(std::initializer_list<long long> xs) {
    IntVec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

RatVec rv(std::initializer_list<long long> xs) {
    RatVec v;
    for (auto x : xs) v.emplace_back(x);
    return v;
}

double det(DMat a) {
    int n = static_cast<int>(a.size());
    double sign = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            sign = -sign;
        }
        for (int r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (int j = c; j < n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    double d = sign;
    for (int c = 0; c < n; ++c) d *= a[c][c];
    return d;
}

// Direction of the geodesic in the rotated frame: F^T applied to the unit
// vector along (n_1 A_1, ..., n_d A_d).
DVec mapped_direction(const ReductionResult& res) {
    int d = static_cast<int>(res.periods.size());
    DVec xi(d);
    double norm = 0;
    for (int j = 0; j < d; ++j) {
        xi[j] = res.n[j].convert_to<double>() * to_double(res.periods[j]);
        norm += xi[j] * xi[j];
    }
    norm = std::sqrt(norm);
    for (double& c : xi) c /= norm;
    return dmat_apply(dmat_transpose(res.F), xi);
}

double axis_error(const DVec& v, int axis) {
    double worst = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
        worst = std::max(worst, std::abs(v[j] - (static_cast<int>(j) == axis ? 1.0 : 0.0)));
    return worst;
}

}  // namespace

TEST_CASE("pair step rotates the last two coordinates onto one axis") {
    auto st = build_step(rv({1, 1, 1}), iv({0, 1, 1}), std::pair<long long, long long>{0, 1});
    const double r = 1.0 / std::sqrt(2.0);
    REQUIRE(st.stage == 2);
    REQUIRE(st.S_sq == Rat(2));
    REQUIRE(std::abs(st.S - std::sqrt(2.0)) <= 1e-15);
    // column 2 carries the direction (0,1,1)/sqrt(2), column 3 its complement
    REQUIRE(st.F[0][1] == 0.0);
    REQUIRE(std::abs(st.F[1][1] - r) <= 1e-15);
    REQUIRE(std::abs(st.F[2][1] - r) <= 1e-15);
    REQUIRE(std::abs(st.F[1][2] + r) <= 1e-15);
    REQUIRE(std::abs(st.F[2][2] - r) <= 1e-15);
    REQUIRE(st.F[0][0] == 1.0);
    REQUIRE(st.p == 0);
    REQUIRE(st.q == 1);
    REQUIRE(std::abs(st.alpha - r) <= 1e-15);
    REQUIRE(std::abs(st.beta - r) <= 1e-15);
    REQUIRE(st.alpha_sq == Rat(1, 2));
    REQUIRE(st.beta_sq == Rat(1, 2));
    REQUIRE(orthonormality_error(st.F) <= 1e-12);
    REQUIRE(std::abs(det(st.F) - 1.0) <= 1e-12);
}

TEST_CASE("degenerate residual pairs are rejected exactly") {
    REQUIRE_THROWS_AS(build_step(rv({1, 1, 1}), iv({0, 1, 1}), std::pair<long long, long long>{1, 1}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(build_step(rv({1, 1, 1}), iv({0, 2, 3}), std::pair<long long, long long>{2, 3}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(build_step(rv({1, 1}), iv({0, 0})), std::invalid_argument);
    REQUIRE_THROWS_AS(build_step(rv({1}), iv({1})), std::invalid_argument);
    REQUIRE_THROWS_AS(build_step(rv({1, -1}), iv({1, 1})), std::invalid_argument);
}

TEST_CASE("axis-aligned winding needs no rotation") {
    auto st = build_step(rv({1, 1, 1}), iv({0, 0, 1}));
    REQUIRE(st.F == dmat_identity(3));
    REQUIRE(st.S_sq == Rat(1));
    REQUIRE(st.p == 1);
    REQUIRE(st.q == 0);
    REQUIRE(std::abs(st.alpha + 1.0) <= 1e-15);  // alpha = -A_{d-1}
    REQUIRE(st.alpha_sq == Rat(1));

    auto st2 = build_step(rv({3, 5, 7}), iv({0, 0, 2}));
    REQUIRE(st2.F == dmat_identity(3));
    REQUIRE(st2.S_sq == Rat(196));  // S = A_d |n_d| = 14
    REQUIRE(std::abs(st2.alpha + 5.0) <= 1e-12);
}

TEST_CASE("already-reduced direction leaves the torus untouched") {
    auto res = reduce_geodesic(rv({2, 2, 2}), iv({0, 0, 1}));
    REQUIRE(res.steps.empty());
    REQUIRE(res.F == dmat_identity(3));
    REQUIRE(res.length_sq == Rat(4));
    REQUIRE(res.reduced_periods == DVec{2.0, 2.0, 2.0});

    auto line = reduce_geodesic(RatVec{Rat(5)}, iv({1}));
    REQUIRE(line.steps.empty());
    REQUIRE(line.length == 5.0);
}

TEST_CASE("single diagonal pair reduces in one stage") {
    auto res = reduce_geodesic(rv({1, 1, 1}), iv({0, 1, 1}));
    REQUIRE(res.steps.size() == 1);
    REQUIRE(res.steps[0].stage == 2);
    REQUIRE(res.steps[0].S_sq == Rat(2));
    REQUIRE(res.steps[0].alpha_sq == Rat(1, 2));
    REQUIRE(res.steps[0].beta_sq == Rat(1, 2));
    REQUIRE(res.length_sq == Rat(2));
    REQUIRE(res.reduced_periods.size() == 2);
    REQUIRE(res.reduced_periods[0] == 1.0);
    REQUIRE(std::abs(res.reduced_periods[1] - std::sqrt(2.0)) <= 1e-15);
    REQUIRE(axis_error(mapped_direction(res), 2) <= 1e-12);
    REQUIRE(orthonormality_error(res.F) <= 1e-12);
}

TEST_CASE("full diagonal takes two stages") {
    auto res = reduce_geodesic(rv({1, 1, 1}), iv({1, 1, 1}));
    REQUIRE(res.steps.size() == 2);
    REQUIRE(res.steps[0].stage == 1);
    REQUIRE(res.steps[1].stage == 2);
    REQUIRE(res.steps[0].S_sq == Rat(2));
    REQUIRE(res.steps[1].S_sq == Rat(3));
    REQUIRE(res.length_sq == Rat(3));
    REQUIRE(res.reduced_periods.size() == 1);
    REQUIRE(std::abs(res.reduced_periods[0] - std::sqrt(3.0)) <= 1e-15);
    REQUIRE(axis_error(mapped_direction(res), 2) <= 1e-12);
    REQUIRE(orthonormality_error(res.F) <= 1e-12);
    REQUIRE(std::abs(det(res.F) - 1.0) <= 1e-12);
}

TEST_CASE("pure first-axis winding is re-indexed to the last axis") {
    auto res = reduce_geodesic(rv({1, 2, 3}), iv({1, 0, 0}));
    REQUIRE(res.steps.size() == 2);
    REQUIRE(res.length == 1.0);
    REQUIRE(res.reduced_periods == DVec{1.0});
    REQUIRE(axis_error(mapped_direction(res), 2) <= 1e-12);
    REQUIRE(std::abs(det(res.F) - 1.0) <= 1e-12);
}

TEST_CASE("non-primitive or malformed windings are rejected") {
    REQUIRE_THROWS_AS(reduce_geodesic(rv({1, 1}), iv({2, 2})), std::invalid_argument);
    REQUIRE_THROWS_AS(reduce_geodesic(rv({1, 1}), iv({0, 0})), std::invalid_argument);
    REQUIRE_THROWS_AS(reduce_geodesic(rv({1, 1}), iv({1})), std::invalid_argument);
    auto res = reduce_geodesic(rv({1, 1}), iv({1, 1}));
    REQUIRE_THROWS_AS(verify_periodicity(res, 0), std::invalid_argument);
}

TEST_CASE("orthonormality and orientation hold across a direction sweep") {
    RatVec periods = {Rat(1), Rat(3, 2), Rat(2)};
    for (const IntVec& n : enumerate_primitive_directions(3, 2)) {
        auto res = reduce_geodesic(periods, n);
        CAPTURE(n[0].convert_to<long long>(), n[1].convert_to<long long>(),
                n[2].convert_to<long long>());
        REQUIRE(orthonormality_error(res.F) <= 1e-12);
        REQUIRE(std::abs(det(res.F) - 1.0) <= 1e-12);
        REQUIRE(axis_error(mapped_direction(res), 2) <= 1e-12);
        Rat want = 0;
        for (int j = 0; j < 3; ++j) want += Rat(n[j] * n[j]) * periods[j] * periods[j];
        REQUIRE(res.length_sq == want);
        auto rep = verify_periodicity(res, 25);
        REQUIRE(rep.max_discrepancy <= 1e-10);
    }
}

TEST_CASE("periodicity identities validate on random trials") {
    auto res = reduce_geodesic(rv({1, 1, 1}), iv({0, 1, 1}));
    auto rep = verify_periodicity(res, 100);
    REQUIRE(rep.trials == 100);
    REQUIRE(rep.max_discrepancy <= 1e-10);

    auto idres = reduce_geodesic(rv({2, 2, 2}), iv({0, 0, 1}));
    REQUIRE(verify_periodicity(idres, 100).max_discrepancy == 0.0);

    auto two = reduce_geodesic(rv({1, 1, 1}), iv({1, 1, 1}));
    REQUIRE(verify_periodicity(two, 100).max_discrepancy <= 1e-10);
}

TEST_CASE("corrupted residual shift is caught by the verifier") {
    auto res = reduce_geodesic(rv({1, 1, 1}), iv({0, 1, 1}));
    res.steps[0].beta += 1.0;
    auto rep = verify_periodicity(res, 100);
    REQUIRE(rep.max_discrepancy > 1e-2);
}
