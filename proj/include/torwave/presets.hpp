#pragma once

#include <torwave/scene.hpp>

namespace torwave {

namespace detail {

inline void face(Polyhedron& P, RatVec n, Rat c) { P.faces.push_back({std::move(n), std::move(c)}); }

// Axis-aligned box given per-axis [lo, hi].
inline Polyhedron box(const std::vector<std::pair<Rat, Rat>>& ranges) {
    int d = static_cast<int>(ranges.size());
    Polyhedron P;
    for (int j = 0; j < d; ++j) {
        RatVec up(d, 0), dn(d, 0);
        up[j] = 1;
        dn[j] = -1;
        face(P, up, ranges[j].second);
        face(P, dn, -ranges[j].first);
    }
    return P;
}

}  // namespace detail

// Damped prisms in a tunnel on the torus [-1,1]^3 (periods (2,2,2)), with
// coordinates (x_1, x_2, y). The damping equals 1 on
//   {|x_1| >= 1/2 or |x_2| >= 1/2}
//   u {-1 < y < -1/2, x_1 > 0, x_2 < aR x_1}  u  {-1/2 < y < 0, x_2 > 0, x_1 > -aT x_2}
//   u { 0 < y <  1/2, x_1 < 0, x_2 > aL x_1}  u  { 1/2 < y < 1, x_2 < 0, x_1 < -aB x_2},
// prisms clipped to the tunnel and stored as closures. With all four slopes
// zero the prisms degenerate to cubes spiraling around the axis {x = 0}.
inline Scene preset_prism_tunnel(const Rat& aL, const Rat& aR, const Rat& aT, const Rat& aB,
                                 std::string name) {
    using detail::box;
    using detail::face;
    Rat h(1, 2);
    std::vector<Polyhedron> pieces;
    // shell: four boxes with pairwise disjoint interiors covering
    // {|x_1| >= 1/2} u {|x_2| >= 1/2}
    pieces.push_back(box({{h, 1}, {-1, 1}, {-1, 1}}));
    pieces.push_back(box({{-1, -h}, {-1, 1}, {-1, 1}}));
    pieces.push_back(box({{-h, h}, {h, 1}, {-1, 1}}));
    pieces.push_back(box({{-h, h}, {-1, -h}, {-1, 1}}));

    // prisms, one per quarter-period of y, clipped to the tunnel
    Polyhedron R = box({{0, h}, {-h, h}, {-1, -h}});
    face(R, {-aR, 1, 0}, 0);  // x_2 <= aR x_1
    Polyhedron T = box({{-h, h}, {0, h}, {-h, 0}});
    face(T, {-1, -aT, 0}, 0);  // x_1 >= -aT x_2
    Polyhedron L = box({{-h, 0}, {-h, h}, {0, h}});
    face(L, {aL, -1, 0}, 0);  // x_2 >= aL x_1
    Polyhedron B = box({{-h, h}, {-h, 0}, {h, 1}});
    face(B, {1, aB, 0}, 0);  // x_1 <= -aB x_2
    pieces.push_back(std::move(R));
    pieces.push_back(std::move(T));
    pieces.push_back(std::move(L));
    pieces.push_back(std::move(B));

    return make_scene(make_torus({2, 2, 2}), std::move(pieces), std::move(name));
}

inline Scene preset_sloped_prisms(const Rat& aL, const Rat& aR, const Rat& aT, const Rat& aB) {
    if (aL <= 0 || aR <= 0 || aT <= 0 || aB <= 0)
        throw std::invalid_argument("sloped_prisms needs four positive coefficients");
    return preset_prism_tunnel(aL, aR, aT, aB, "sloped_prisms");
}

inline Scene preset_straight_prisms() { return preset_prism_tunnel(0, 0, 0, 0, "straight_prisms"); }

// Parity checkerboards on the unit square torus: variant a is the 2x2 board
// (two squares), b the 4x4 board, c the 8x8 board. On all of them every
// geodesic meets the closed damped set but the diagonal and grid lines
// through the corners never enter its interior.
inline Scene preset_checkerboard2d(char variant) {
    int cells;
    switch (variant) {
        case 'a': cells = 2; break;
        case 'b': cells = 4; break;
        case 'c': cells = 8; break;
        default: throw std::invalid_argument("checkerboard2d variant must be a, b or c");
    }
    Rat side(1, cells);
    std::vector<Polyhedron> pieces;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j)
            if ((i + j) % 2 == 0)
                pieces.push_back(detail::box(
                    {{Rat(i) * side, Rat(i + 1) * side}, {Rat(j) * side, Rat(j + 1) * side}}));
    return make_scene(make_torus({1, 1}), std::move(pieces),
                      std::string("checkerboard2d:") + variant);
}

// d-dimensional tunnel scene on [-1,1]^d with transverse coordinates
// x_1..x_{d-1} and axis coordinate y: a = 1 outside the tunnel
// {|x_i| <= 1/2 for all i < d}, plus 2(d-1) half-tunnel slabs
//   {x_i < 0, -1 + (i-1)/(d-1) < y < -1 + i/(d-1)} and
//   {x_i > 0,      (i-1)/(d-1) < y <      i/(d-1)},
// so that {x = 0} is the only geodesic never entering the interior.
inline Scene preset_tunnel_d(int d) {
    if (d < 3 || d > 6) throw std::invalid_argument("tunnel_d expects 3 <= d <= 6");
    using detail::box;
    Rat h(1, 2);
    std::vector<Polyhedron> pieces;
    for (int i = 0; i < d - 1; ++i) {
        for (int sign : {+1, -1}) {
            std::vector<std::pair<Rat, Rat>> r(d);
            for (int l = 0; l < i; ++l) r[l] = {-h, h};
            r[i] = sign > 0 ? std::pair<Rat, Rat>{h, 1} : std::pair<Rat, Rat>{-1, -h};
            for (int l = i + 1; l < d; ++l) r[l] = {-1, 1};
            pieces.push_back(box(r));
        }
    }
    Rat step(1, d - 1);
    for (int i = 1; i <= d - 1; ++i) {
        std::vector<std::pair<Rat, Rat>> neg(d), pos(d);
        for (int l = 0; l < d - 1; ++l) neg[l] = pos[l] = {-h, h};
        neg[i - 1] = {-h, 0};
        pos[i - 1] = {0, h};
        neg[d - 1] = {-1 + Rat(i - 1) * step, -1 + Rat(i) * step};
        pos[d - 1] = {Rat(i - 1) * step, Rat(i) * step};
        pieces.push_back(box(neg));
        pieces.push_back(box(pos));
    }
    RatVec periods(d, 2);
    return make_scene(make_torus(periods), std::move(pieces), "tunnel_" + std::to_string(d));
}

// Single full-torus cuboid (a == 1 everywhere).
inline Scene preset_full(const RatVec& periods) {
    std::vector<std::pair<Rat, Rat>> r;
    for (const auto& A : periods) r.emplace_back(0, A);
    return make_scene(make_torus(periods), {detail::box(r)}, "full");
}

inline Scene preset_empty(const RatVec& periods) {
    return make_scene(make_torus(periods), {}, "empty");
}

// Parses "name" or "name:p1,p2,..." with rational parameters.
inline Scene preset_scene(const std::string& spec) {
    std::string name = spec;
    std::vector<std::string> params;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::string rest = spec.substr(colon + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            auto comma = rest.find(',', pos);
            if (comma == std::string::npos) {
                params.push_back(rest.substr(pos));
                break;
            }
            params.push_back(rest.substr(pos, comma - pos));
            pos = comma + 1;
        }
    }
    if (name == "sloped_prisms") {
        if (params.size() != 4) throw std::invalid_argument("sloped_prisms needs 4 coefficients");
        return preset_sloped_prisms(parse_rational(params[0]), parse_rational(params[1]),
                             parse_rational(params[2]), parse_rational(params[3]));
    }
    if (name == "straight_prisms") return preset_straight_prisms();
    if (name == "checkerboard2d") {
        if (params.size() != 1 || params[0].size() != 1)
            throw std::invalid_argument("checkerboard2d needs one variant letter");
        return preset_checkerboard2d(params[0][0]);
    }
    if (name == "tunnel_d") {
        if (params.size() != 1) throw std::invalid_argument("tunnel_d needs the dimension");
        return preset_tunnel_d(std::stoi(params[0]));
    }
    if (name == "full" || name == "empty") {
        RatVec periods = params.empty() ? RatVec{2, 2} : parse_rational_vec(params);
        return name == "full" ? preset_full(periods) : preset_empty(periods);
    }
    throw std::invalid_argument("unknown preset: '" + name + "'");
}

}  // namespace torwave
