#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

namespace torwave {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rat>;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

// Floor division for cpp_int (rounds toward -infinity).
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Int rat_floor(const Rat& r) { return floor_div(rat_num(r), rat_den(r)); }

inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

// Parses "p", "-p", "p/q" with integer p, q (q > 0 after normalization).
// Rejects anything else, decimals included.
inline Rat parse_rational(const std::string& s) {
    auto bad = [&] { throw std::invalid_argument("not a rational: '" + s + "'"); };
    if (s.empty()) bad();
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (!is_int(s)) bad();
        return Rat(Int(s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) bad();
    Int d(den);
    if (d == 0) bad();
    return Rat(Int(num), d);
}

inline std::string format_rational(const Rat& r) {
    std::string s = rat_num(r).str();
    if (rat_den(r) != 1) s += "/" + rat_den(r).str();
    return s;
}

inline Rat dot(const RatVec& a, const RatVec& b) {
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline RatVec parse_rational_vec(const std::vector<std::string>& ss) {
    RatVec v;
    v.reserve(ss.size());
    for (const auto& s : ss) v.push_back(parse_rational(s));
    return v;
}

}  // namespace torwave
