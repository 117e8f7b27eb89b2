#pragma once

#include <torwave/geodesic.hpp>
#include <torwave/scene.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace torwave {

// Open parameter interval (lo, hi) on the period-1 circle; hi exceeds 1 when
// the interval wraps through t = 0.
struct TraceInterval {
    Rat lo, hi;
};

struct InteriorTrace {
    std::vector<TraceInterval> intervals;
    bool full = false;  // the geodesic stays inside the open support throughout
    bool never() const { return !full && intervals.empty(); }
};

// Maximal parameter range along which the geodesic stays on the boundary of
// one damping piece with a fixed set of active faces (the faces whose planes
// contain the whole segment). Punctual contacts are isolated touch parameters.
struct ContactSegment {
    int piece = -1;
    std::vector<int> faces;
    Rat t0, t1;  // closed range; t1 > 1 after a wrap merge, t1 - t0 <= 1
    bool punctual = false;
};

namespace detail {

struct ContainRecord {
    int piece;
    Rat lo, hi;               // containment parameter range clipped to [0, 1]
    Rat ulo, uhi;             // the same range before clipping
    std::vector<int> razing;  // faces active on the whole (unclipped) range
    std::vector<Rat> alpha, beta, rhs;
};

// All (piece, translate) containment records of X(t) = base + t*vel, t in [0,1].
inline std::vector<ContainRecord> containment_records(const Scene& sc, const ClosedGeodesic& g) {
    const auto& A = sc.torus.periods;
    int d = sc.torus.dim();
    RatVec base = fold_point(sc.torus, g.base);
    RatVec vel = closed_velocity(sc.torus, g.n);
    std::vector<ContainRecord> out;
    for (std::size_t i = 0; i < sc.pieces.size(); ++i) {
        const auto& P = sc.pieces[i];
        // integer shifts k with (x(t) - k*A) possibly inside the piece box
        std::vector<std::pair<Int, Int>> ranges(d);
        for (int j = 0; j < d; ++j) {
            const auto& box = sc.boxes[i][j];
            if (!box.lo || !box.hi)
                throw std::invalid_argument("scene piece unbounded or empty");
            Rat xend = base[j] + vel[j];
            Rat xlo = std::min(base[j], xend);
            Rat xhi = std::max(base[j], xend);
            ranges[j] = {rat_ceil((xlo - *box.hi) / A[j]), rat_floor((xhi - *box.lo) / A[j])};
            if (ranges[j].first > ranges[j].second) {
                ranges.clear();
                break;
            }
        }
        if (ranges.empty()) continue;
        std::vector<Int> k(d);
        for (int j = 0; j < d; ++j) k[j] = ranges[j].first;
        while (true) {
            ContainRecord rec;
            rec.piece = static_cast<int>(i);
            bool lo_set = false, hi_set = false;
            bool feasible = true;
            for (std::size_t f = 0; f < P.faces.size() && feasible; ++f) {
                const auto& hs = P.faces[f];
                Rat alpha = 0, beta = 0;
                for (int j = 0; j < d; ++j) {
                    alpha += hs.n[j] * (base[j] - Rat(k[j]) * A[j]);
                    beta += hs.n[j] * vel[j];
                }
                rec.alpha.push_back(alpha);
                rec.beta.push_back(beta);
                rec.rhs.push_back(hs.c);
                if (beta == 0) {
                    if (alpha > hs.c)
                        feasible = false;
                    else if (alpha == hs.c)
                        rec.razing.push_back(static_cast<int>(f));
                } else {
                    Rat root = (hs.c - alpha) / beta;
                    if (beta > 0) {
                        if (!hi_set || root < rec.uhi) rec.uhi = root;
                        hi_set = true;
                    } else {
                        if (!lo_set || root > rec.ulo) rec.ulo = root;
                        lo_set = true;
                    }
                }
            }
            if (!lo_set || !hi_set)
                throw std::invalid_argument("scene piece unbounded or empty along the geodesic");
            rec.lo = std::max(rec.ulo, Rat(0));
            rec.hi = std::min(rec.uhi, Rat(1));
            if (feasible && rec.ulo <= rec.uhi && rec.lo <= rec.hi) out.push_back(std::move(rec));
            int j = d - 1;
            while (j >= 0 && k[j] == ranges[j].second) k[j--] = ranges[j].first;
            if (j < 0) break;
            ++k[j];
        }
    }
    return out;
}

}  // namespace detail

// Maximal open parameter intervals along which the geodesic lies in the
// interior of the union of damping pieces. Exact: between consecutive face
// incidence times the containing pieces and their active faces are constant,
// so one interior classification per gap (plus one per breakpoint) decides
// everything.
inline InteriorTrace trace_to_interior(const Scene& sc, const ClosedGeodesic& g) {
    RatVec base = fold_point(sc.torus, g.base);
    RatVec vel = closed_velocity(sc.torus, g.n);
    auto records = detail::containment_records(sc, g);
    std::set<Rat> cuts{Rat(0), Rat(1)};
    for (const auto& rec : records) {
        cuts.insert(rec.lo);
        cuts.insert(rec.hi);
        for (std::size_t f = 0; f < rec.beta.size(); ++f) {
            if (rec.beta[f] == 0) continue;
            Rat root = (rec.rhs[f] - rec.alpha[f]) / rec.beta[f];
            if (root >= rec.lo && root <= rec.hi) cuts.insert(root);
        }
    }
    std::vector<Rat> b;
    for (const auto& t : cuts)
        if (t >= 0 && t < 1) b.push_back(t);
    int m = static_cast<int>(b.size());
    auto at = [&](const Rat& t) {
        RatVec x(base.size());
        for (std::size_t j = 0; j < base.size(); ++j) x[j] = base[j] + t * vel[j];
        return x;
    };
    std::vector<bool> inside(2 * m);  // even: breakpoint b_i, odd: gap (b_i, b_{i+1})
    for (int i = 0; i < m; ++i) {
        Rat next = (i + 1 < m) ? b[i + 1] : Rat(1);
        inside[2 * i] = classify_point(sc, at(b[i])).cls == PointClass::Interior;
        inside[2 * i + 1] = classify_point(sc, at((b[i] + next) / 2)).cls == PointClass::Interior;
    }
    InteriorTrace out;
    if (std::all_of(inside.begin(), inside.end(), [](bool v) { return v; })) {
        out.full = true;
        return out;
    }
    int n2 = 2 * m;
    for (int start = 0; start < n2; ++start) {
        if (!(inside[start] && !inside[(start + n2 - 1) % n2])) continue;
        int len = 0;
        while (len < n2 && inside[(start + len) % n2]) ++len;
        int first = start, last = start + len - 1;  // indices in the unrolled circle
        // an open set of parameters must begin and end with a gap item
        if (first % 2 == 0 || last % 2 == 0) throw std::logic_error("interior trace inconsistency");
        int gi = (first - 1) / 2;  // gap index of the first item
        int gj = (last - 1) / 2;   // may exceed m after wrapping
        Rat lo = b[gi];
        int hidx = gj + 1;
        Rat hi = b[hidx % m] + Rat(hidx / m);  // b[0] == 0, so this also handles hi = 1
        out.intervals.push_back({lo, hi});
    }
    std::sort(out.intervals.begin(), out.intervals.end(),
              [](const TraceInterval& a, const TraceInterval& c) { return a.lo < c.lo; });
    return out;
}

// Contact segments of a geodesic with the damping pieces: parameter ranges on
// a piece boundary with fixed active faces, plus punctual touches. Ranges
// abutting across t = 0 with identical structure are merged.
inline std::vector<ContactSegment> contact_segments(const Scene& sc, const ClosedGeodesic& g) {
    auto records = detail::containment_records(sc, g);
    // group positive-length razing ranges by (piece, faces) and merge them on
    // the parameter circle; clipping artifacts at t=0/1 disappear that way
    std::map<std::pair<int, std::vector<int>>, std::vector<std::pair<Rat, Rat>>> groups;
    std::vector<ContactSegment> points;
    for (const auto& rec : records) {
        if (rec.ulo == rec.uhi) {
            if (rec.lo > rec.uhi || rec.hi < rec.ulo) continue;  // touch outside [0,1]
            ContactSegment s;
            s.piece = rec.piece;
            s.t0 = s.t1 = rec.ulo;
            s.punctual = true;
            for (std::size_t f = 0; f < rec.beta.size(); ++f)
                if (rec.alpha[f] + rec.ulo * rec.beta[f] == rec.rhs[f])
                    s.faces.push_back(static_cast<int>(f));
            points.push_back(std::move(s));
        } else if (!rec.razing.empty() && rec.lo < rec.hi) {
            groups[{rec.piece, rec.razing}].push_back({rec.lo, rec.hi});
        }
    }
    std::vector<ContactSegment> segs;
    for (auto& [key, ivals] : groups) {
        std::sort(ivals.begin(), ivals.end());
        std::vector<std::pair<Rat, Rat>> merged;
        for (const auto& iv : ivals) {
            if (!merged.empty() && iv.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }
        // wrap through t=0: last range ending at 1 continues as the first one
        if (merged.size() > 1 && merged.front().first == 0 && merged.back().second == 1) {
            merged.back().second = merged.front().second + 1;
            merged.erase(merged.begin());
        }
        for (const auto& iv : merged) {
            ContactSegment s;
            s.piece = key.first;
            s.faces = key.second;
            s.t0 = iv.first;
            s.t1 = iv.second;
            segs.push_back(std::move(s));
        }
    }
    // punctual touches at t=1 are the t=0 point again
    for (auto& p : points)
        if (p.t0 == 1) p.t0 = p.t1 = 0;
    std::sort(points.begin(), points.end(), [](const ContactSegment& a, const ContactSegment& b) {
        return std::tie(a.t0, a.piece, a.faces) < std::tie(b.t0, b.piece, b.faces);
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const ContactSegment& a, const ContactSegment& b) {
                                 return a.t0 == b.t0 && a.piece == b.piece && a.faces == b.faces;
                             }),
                 points.end());
    // drop punctual touches that sit inside a positive-length segment of the
    // same piece (they are endpoints of it, already reported)
    auto covered = [&](const ContactSegment& p) {
        for (const auto& s : segs) {
            if (s.piece != p.piece) continue;
            Rat t = p.t0;
            if ((t >= s.t0 && t <= s.t1) || (t + 1 >= s.t0 && t + 1 <= s.t1)) return true;
        }
        return false;
    };
    points.erase(std::remove_if(points.begin(), points.end(), covered), points.end());
    segs.insert(segs.end(), points.begin(), points.end());
    std::sort(segs.begin(), segs.end(), [](const ContactSegment& a, const ContactSegment& b) {
        return std::tie(a.t0, a.piece, a.faces) < std::tie(b.t0, b.piece, b.faces);
    });
    return segs;
}

}  // namespace torwave
