#pragma once

#include <torwave/scene.hpp>

#include <json.hpp>

#include <fstream>

namespace torwave {

// Scene files carry every coefficient as a "p/q" string; JSON numbers are
// rejected so no parser ever rounds a coordinate.
inline Rat rational_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_string())
        throw std::invalid_argument(std::string(what) + " must be a rational string, got " +
                                    j.dump());
    return parse_rational(j.get<std::string>());
}

inline RatVec rational_vec_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    RatVec out;
    for (const auto& e : j) out.push_back(rational_from_json(e, what));
    return out;
}

inline Scene scene_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("scene document must be an object");
    if (!j.contains("periods") || !j.contains("polyhedra"))
        throw std::invalid_argument("scene document needs 'periods' and 'polyhedra'");
    RatVec periods = rational_vec_from_json(j.at("periods"), "periods entry");
    std::vector<Polyhedron> pieces;
    for (const auto& pj : j.at("polyhedra")) {
        if (!pj.is_object() || !pj.contains("halfspaces"))
            throw std::invalid_argument("polyhedron needs a 'halfspaces' list");
        Polyhedron P;
        for (const auto& hj : pj.at("halfspaces")) {
            HalfSpace h;
            h.n = rational_vec_from_json(hj.at("n"), "halfspace normal entry");
            h.c = rational_from_json(hj.at("c"), "halfspace offset");
            if (h.n.size() != periods.size())
                throw std::invalid_argument("halfspace normal dimension mismatch");
            P.faces.push_back(std::move(h));
        }
        pieces.push_back(std::move(P));
    }
    std::string name = j.value("name", "");
    return make_scene(make_torus(periods), std::move(pieces), name);
}

inline nlohmann::json scene_to_json(const Scene& sc) {
    nlohmann::json j;
    for (const auto& A : sc.torus.periods) j["periods"].push_back(format_rational(A));
    j["polyhedra"] = nlohmann::json::array();
    for (const auto& P : sc.pieces) {
        nlohmann::json pj;
        pj["halfspaces"] = nlohmann::json::array();
        for (const auto& f : P.faces) {
            nlohmann::json hj;
            for (const auto& v : f.n) hj["n"].push_back(format_rational(v));
            hj["c"] = format_rational(f.c);
            pj["halfspaces"].push_back(std::move(hj));
        }
        j["polyhedra"].push_back(std::move(pj));
    }
    if (!sc.name.empty()) j["name"] = sc.name;
    return j;
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scene file: " + path);
    nlohmann::json j;
    in >> j;
    return scene_from_json(j);
}

inline void save_scene(const Scene& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << scene_to_json(sc).dump(2) << "\n";
}

}  // namespace torwave
