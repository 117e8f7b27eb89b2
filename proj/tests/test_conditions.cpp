#include <torwave/conditions.hpp>
#include <torwave/presets.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

using namespace torwave;

namespace {

bool satisfies(const LinSys& s, const RatVec& x) {
    for (const auto& r : s.rows) {
        Rat v = 0;
        for (std::size_t j = 0; j < x.size(); ++j) v += r.a[j] * x[j];
        if (r.rel == Rel::EQ && v != r.c) return false;
        if (r.rel == Rel::LE && v > r.c) return false;
        if (r.rel == Rel::LT && v >= r.c) return false;
    }
    return true;
}

bool any_cell_contains(const std::vector<LinSys>& cells, const RatVec& x) {
    return std::any_of(cells.begin(), cells.end(),
                       [&](const LinSys& c) { return satisfies(c, x); });
}

IntVec iv(std::initializer_list<int> v) {
    IntVec out;
    for (int x : v) out.push_back(x);
    return out;
}

// Thin wrapped slab {k <= n.x <= k + w on each sheet} sliced against the unit
// box, so the union on the torus is { n.x mod 1 in [0, w] }.
Scene slab_scene(const IntVec& normal, const Rat& width) {
    int d = static_cast<int>(normal.size());
    RatVec periods(d, 1);
    std::vector<std::pair<Rat, Rat>> unit(d, {Rat(0), Rat(1)});
    Rat top = 0;
    for (const auto& nj : normal)
        if (nj > 0) top += Rat(nj);
    std::vector<Polyhedron> pieces;
    for (Int k = 0; Rat(k) < top; ++k) {
        Polyhedron P = detail::box(unit);
        RatVec up(d), dn(d);
        for (int j = 0; j < d; ++j) {
            up[j] = Rat(normal[j]);
            dn[j] = -Rat(normal[j]);
        }
        detail::face(P, up, Rat(k) + width);
        detail::face(P, dn, -Rat(k));
        pieces.push_back(std::move(P));
    }
    return make_scene(make_torus(periods), std::move(pieces), "slab");
}

const GeodesicWitness* find_base(const std::vector<GeodesicWitness>& ws, const RatVec& base) {
    for (const auto& w : ws)
        if (w.base == base) return &w;
    return nullptr;
}

}  // namespace

TEST_CASE("cell subtraction leaves the set difference") {
    std::vector<LinSys> cells{detail::unit_cell(2, 0, 2)};
    LinSys corner(2);
    corner.add_le({{0, Rat(1)}}, Rat(1, 2));
    corner.add_le({{0, Rat(-1)}}, 0);
    corner.add_le({{1, Rat(1)}}, Rat(1, 2));
    corner.add_le({{1, Rat(-1)}}, 0);
    cells = subtract_region(cells, corner, 100);
    REQUIRE_FALSE(cells.empty());
    CHECK_FALSE(any_cell_contains(cells, {Rat(1, 4), Rat(1, 4)}));
    CHECK(any_cell_contains(cells, {Rat(3, 4), Rat(1, 4)}));
    CHECK(any_cell_contains(cells, {Rat(1, 4), Rat(3, 4)}));
    CHECK(any_cell_contains(cells, {Rat(3, 4), Rat(3, 4)}));
}

TEST_CASE("closed faces of a segment are the segment and its endpoints") {
    LinSys seg(1);
    seg.add_le({{0, Rat(1)}}, 1);
    seg.add_le({{0, Rat(-1)}}, 0);
    auto faces = closed_faces(seg, 1, 100);
    REQUIRE(faces.size() == 3);
    CHECK(faces.front().dim == 1);
    std::set<Rat> reps;
    for (const auto& f : faces) reps.insert(FourierMotzkin::witness(f.sys).value()[0]);
    CHECK(reps == std::set<Rat>{Rat(0), Rat(1, 2), Rat(1)});
}

TEST_CASE("refinement plane canonicalization") {
    RatVec a{Rat(2, 3), Rat(-4, 3)};
    Rat c = 2;
    REQUIRE(detail::canonicalize_plane(a, c));
    CHECK(a == RatVec{Rat(1), Rat(-2)});
    CHECK(c == Rat(3));
    RatVec z{Rat(0), Rat(0)};
    Rat cz = 1;
    CHECK_FALSE(detail::canonicalize_plane(z, cz));
}

TEST_CASE("condition names round-trip") {
    for (auto c : {ControlCondition::WGCC, ControlCondition::SGCC,
                   ControlCondition::NormalDamping, ControlCondition::FiniteExceptions})
        CHECK(parse_condition(to_string(c)) == c);
    CHECK_THROWS_AS(parse_condition("gcc"), std::invalid_argument);
    CHECK(std::string(to_string(Verdict::Holds)) == "holds");
    CHECK(std::string(to_string(Verdict::Fails)) == "fails");
    CHECK(std::string(to_string(Verdict::Unknown)) == "unknown");
}

TEST_CASE("glue facets of the one-piece torus are its two wrap seams") {
    Scene sc = preset_full({1, 1});
    auto glues = detail::glue_facets(sc);
    CHECK(glues.size() == 2);
}

TEST_CASE("checkerboards meet every geodesic but razing lines never enter") {
    for (char variant : {'a', 'b', 'c'}) {
        Scene sc = preset_checkerboard2d(variant);
        CHECK(detail::glue_facets(sc).empty());

        auto weak = check_condition(sc, ControlCondition::WGCC, 2);
        CHECK(weak.verdict == Verdict::Holds);
        CHECK(weak.witnesses.empty());

        auto strong = check_condition(sc, ControlCondition::SGCC, 2);
        REQUIRE(strong.verdict == Verdict::Fails);
        REQUIRE_FALSE(strong.witnesses.empty());
        int cells = variant == 'a' ? 2 : variant == 'b' ? 4 : 8;
        CHECK(strong.witnesses.size() == static_cast<std::size_t>(cells));
        for (const auto& w : strong.witnesses) {
            CHECK(w.n == iv({0, 1}));  // first direction scanned already fails
            CHECK(w.base[1] == 0);
            CHECK(rat_den(w.base[0] * cells) == 1);  // a vertical grid line
            CHECK(w.evidence == "never enters the interior of the damped region");
        }
    }
}

TEST_CASE("checkerboard diagonals carry no transverse damping") {
    Scene sc = preset_checkerboard2d('a');
    auto nd = check_condition(sc, ControlCondition::NormalDamping, 1);
    REQUIRE(nd.verdict == Verdict::Fails);
    bool fat = false, grid_line = false;
    for (const auto& w : nd.witnesses) {
        if (w.n == iv({1, 1}) && w.complement == ComplementClass::PositiveMeasure) fat = true;
        if (w.n == iv({0, 1}) && w.complement == ComplementClass::Empty) grid_line = true;
    }
    CHECK(fat);       // anti-phase diagonal only touches corners
    CHECK(grid_line); // grid lines are razed from both sides
    CHECK(check_condition(sc, ControlCondition::FiniteExceptions, 1).verdict == Verdict::Fails);
}

TEST_CASE("empty and full scenes are the trivial extremes") {
    Scene none = preset_empty({1, 1});
    CHECK(check_condition(none, ControlCondition::WGCC, 1).verdict == Verdict::Fails);
    CHECK(check_condition(none, ControlCondition::SGCC, 1).verdict == Verdict::Fails);
    auto nd = check_condition(none, ControlCondition::NormalDamping, 1);
    REQUIRE(nd.verdict == Verdict::Fails);
    REQUIRE_FALSE(nd.witnesses.empty());
    CHECK(nd.witnesses.front().complement == ComplementClass::PositiveMeasure);
    CHECK(check_condition(none, ControlCondition::FiniteExceptions, 1).verdict == Verdict::Fails);

    Scene all = preset_full({1, 1});
    CHECK(check_condition(all, ControlCondition::WGCC, 2).verdict == Verdict::Holds);
    CHECK(check_condition(all, ControlCondition::SGCC, 2).verdict == Verdict::Holds);
    auto alln = check_condition(all, ControlCondition::NormalDamping, 2);
    CHECK(alln.verdict == Verdict::Holds);
    CHECK(alln.witnesses.empty());
}

TEST_CASE("straight prisms leave the axis cross undamped in the axis directions") {
    Scene sc = preset_straight_prisms();

    auto strong = check_condition(sc, ControlCondition::SGCC, 1);
    REQUIRE(strong.verdict == Verdict::Fails);
    REQUIRE(find_base(strong.witnesses, {0, 0, 0}) != nullptr);

    auto nd = check_condition(sc, ControlCondition::NormalDamping, 1);
    REQUIRE(nd.verdict == Verdict::Fails);
    const auto* axis = find_base(nd.witnesses, {0, 0, 0});
    REQUIRE(axis != nullptr);
    CHECK(axis->n == iv({0, 0, 1}));
    CHECK(axis->complement == ComplementClass::FiniteSet);
    std::set<IntVec> exc(axis->exceptional.begin(), axis->exceptional.end());
    CHECK(exc == std::set<IntVec>{iv({1, 0, 0}), iv({-1, 0, 0}), iv({0, 1, 0}), iv({0, -1, 0})});
    for (const auto& w : nd.witnesses) {
        CHECK(w.n == iv({0, 0, 1}));  // every other direction reaches the shell
        CHECK(w.complement != ComplementClass::PositiveMeasure);
        CHECK(w.complement != ComplementClass::Unknown);
    }
    // an arm of the cross is damped from both sides but not along itself
    const auto* arm = find_base(nd.witnesses, {Rat(1, 4), 0, 0});
    REQUIRE(arm != nullptr);
    CHECK(arm->complement == ComplementClass::FiniteSet);
    CHECK(arm->exceptional.size() == 2);
    // the arm endpoint on the shell keeps three undamped rays
    const auto* edge = find_base(nd.witnesses, {Rat(1, 2), 0, 0});
    REQUIRE(edge != nullptr);
    CHECK(edge->exceptional.size() == 3);

    auto fe = check_condition(sc, ControlCondition::FiniteExceptions, 2);
    CHECK(fe.verdict == Verdict::Holds);
}

TEST_CASE("sloped prisms damp every transverse direction along the axis") {
    Rat s(1, 10);
    Scene sc = preset_sloped_prisms(s, s, s, s);

    auto strong = check_condition(sc, ControlCondition::SGCC, 1);
    REQUIRE(strong.verdict == Verdict::Fails);
    REQUIRE(strong.witnesses.size() == 1);
    CHECK(strong.witnesses.front().base == RatVec{0, 0, 0});
    CHECK(strong.witnesses.front().n == iv({0, 0, 1}));

    auto nd = check_condition(sc, ControlCondition::NormalDamping, 3);
    REQUIRE(nd.verdict == Verdict::Holds);
    REQUIRE(nd.witnesses.size() == 1);
    const auto& axis = nd.witnesses.front();
    CHECK(axis.base == RatVec{0, 0, 0});
    CHECK(axis.n == iv({0, 0, 1}));
    CHECK(axis.complement == ComplementClass::Empty);
    CHECK(axis.evidence ==
          "razes the damped region along 4 segment(s); undamped transverse set: Empty");
}

TEST_CASE("orbit closures against the prism scene") {
    Scene sc = preset_straight_prisms();
    // a plane wrapping both tunnel-transverse and axis directions sweeps the shell
    auto plane = make_dense_geodesic(sc.torus, {0, 0, 0}, {{1, 0, 0}, {0, 0, 1}});
    CHECK(orbit_closure_meets_interior(sc, plane));
    CHECK(orbit_closure_meets_support(sc, plane));
    // the bare axis line razes the prisms but stays out of the interior
    auto axis = make_dense_geodesic(sc.torus, {0, 0, 0}, {{0, 0, 1}});
    CHECK_FALSE(orbit_closure_meets_interior(sc, axis));
    CHECK(orbit_closure_meets_support(sc, axis));
    // a full-rank span closes up onto the whole torus
    auto dense = make_dense_geodesic(sc.torus, {0, 0, 0}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(orbit_closure_meets_interior(sc, dense));
}

TEST_CASE("coset hits against a flat slab") {
    Scene sc = slab_scene(iv({0, 0, 1}), Rat(1, 4));  // { x3 mod 1 in [0, 1/4] }
    RatMat horiz{{1, 0, 0}, {0, 1, 0}};
    auto miss = make_dense_geodesic(sc.torus, {0, 0, Rat(5, 8)}, horiz);
    CHECK_FALSE(orbit_closure_meets_support(sc, miss));
    CHECK_FALSE(orbit_closure_meets_interior(sc, miss));
    auto graze = make_dense_geodesic(sc.torus, {0, 0, Rat(1, 4)}, horiz);
    CHECK(orbit_closure_meets_support(sc, graze));
    CHECK_FALSE(orbit_closure_meets_interior(sc, graze));
    auto inside = make_dense_geodesic(sc.torus, {0, 0, Rat(1, 8)}, horiz);
    CHECK(orbit_closure_meets_support(sc, inside));
    CHECK(orbit_closure_meets_interior(sc, inside));
}

TEST_CASE("transverse coset scan splits hits from misses") {
    Scene sc = slab_scene(iv({0, 0, 1}), Rat(1, 4));
    IntMat Lambda{iv({1, 0, 0}), iv({0, 1, 0})};
    auto glues = detail::glue_facets(sc);

    auto strong = detail::scan_subspace(sc, Lambda, false, glues);
    CHECK_FALSE(strong.covered);
    CHECK_FALSE(strong.unresolved);
    REQUIRE_FALSE(strong.witnesses.empty());
    for (const auto& w : strong.witnesses) {
        Rat x3 = w.base[2];
        CHECK((x3 >= Rat(1, 4) || x3 == 0));  // never strictly inside the open slab
        CHECK(x3 <= Rat(1));
        CHECK(w.span == RatMat{{1, 0, 0}, {0, 1, 0}});
        CHECK(w.evidence == "orbit closure avoids the interior of the damped region");
    }

    auto weak = detail::scan_subspace(sc, Lambda, true, {});
    CHECK_FALSE(weak.covered);
    REQUIRE(weak.witnesses.size() == 1);
    Rat x3 = weak.witnesses.front().base[2];
    CHECK((x3 > Rat(1, 4) && x3 < Rat(1)));
    CHECK(weak.witnesses.front().evidence == "orbit closure misses the closed damped region");
}

TEST_CASE("tilted slab is controlled at small bound and trapped at larger one") {
    Scene sc = slab_scene(iv({5, 3, 1}), Rat(1, 4));
    REQUIRE(sc.pieces.size() == 9);

    auto ok = check_condition(sc, ControlCondition::SGCC, 1);
    CHECK(ok.verdict == Verdict::Holds);
    CHECK(ok.witnesses.empty());
    CHECK(check_condition(sc, ControlCondition::WGCC, 1).verdict == Verdict::Holds);

    auto bad = check_condition(sc, ControlCondition::SGCC, 2);
    REQUIRE(bad.verdict == Verdict::Fails);
    REQUIRE_FALSE(bad.witnesses.empty());
    for (const auto& w : bad.witnesses) {
        Int inner = 5 * w.n[0] + 3 * w.n[1] + w.n[2];
        CHECK(inner == 0);  // trapped windings are orthogonal to the slab normal
    }
    CHECK(check_condition(sc, ControlCondition::WGCC, 2).verdict == Verdict::Fails);
}

TEST_CASE("short horizons downgrade a covering verdict") {
    Scene sc = preset_checkerboard2d('a');
    auto full = check_condition(sc, ControlCondition::WGCC, 1, Rat(2));
    CHECK(full.verdict == Verdict::Holds);
    auto cut = check_condition(sc, ControlCondition::WGCC, 1, Rat(1, 2));
    CHECK(cut.verdict == Verdict::Unknown);
    CHECK(cut.note.find("horizon") != std::string::npos);
    // damping censuses classify whole geodesics; the horizon plays no role
    auto nd = check_condition(sc, ControlCondition::NormalDamping, 1, Rat(1, 2));
    CHECK(nd.note.find("horizon") == std::string::npos);
}

TEST_CASE("winding bound must be positive") {
    Scene sc = preset_full({1, 1});
    CHECK_THROWS_AS(check_condition(sc, ControlCondition::WGCC, 0), std::invalid_argument);
}
