#pragma once

#include <torwave/geodesic.hpp>
#include <torwave/normal_set.hpp>
#include <torwave/regions.hpp>

#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace torwave {

// Geometric control conditions on a damped scene, each decided by exhaustive
// exact analysis of all closed geodesics up to a winding bound (plus, for the
// two control conditions, orbit closures of non-closed directions):
//   WGCC             every geodesic meets the closed damped region
//   SGCC             every geodesic enters the interior of the damped region
//   NormalDamping    every never-entering geodesic is damped in all
//                    transverse directions
//   FiniteExceptions every never-entering geodesic is damped in all but
//                    finitely many transverse directions
enum class ControlCondition { WGCC, SGCC, NormalDamping, FiniteExceptions };
enum class Verdict { Holds, Fails, Unknown };

inline const char* to_string(ControlCondition c) {
    switch (c) {
        case ControlCondition::WGCC: return "wgcc";
        case ControlCondition::SGCC: return "sgcc";
        case ControlCondition::NormalDamping: return "normal_damping";
        default: return "finite_exceptions";
    }
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        default: return "unknown";
    }
}

inline ControlCondition parse_condition(const std::string& s) {
    if (s == "wgcc") return ControlCondition::WGCC;
    if (s == "sgcc") return ControlCondition::SGCC;
    if (s == "normal_damping") return ControlCondition::NormalDamping;
    if (s == "finite_exceptions") return ControlCondition::FiniteExceptions;
    throw std::invalid_argument("unknown condition: " + s);
}

// One representative of an invariant family of geodesics the scan had to
// examine. Closed geodesics carry the winding vector n; orbit-closure
// witnesses carry spanning ambient directions instead. family_dim is the
// dimension of the transverse family represented (0 = isolated).
struct GeodesicWitness {
    RatVec base;
    IntVec n;
    RatMat span;
    int family_dim = 0;
    ComplementClass complement = ComplementClass::Unknown;
    std::vector<IntVec> exceptional;
    std::string evidence;
};

struct ConditionReport {
    ControlCondition condition = ControlCondition::WGCC;
    Verdict verdict = Verdict::Unknown;
    int bound = 0;
    std::vector<GeodesicWitness> witnesses;
    std::string note;
};

namespace detail {

inline constexpr std::size_t kCellCap = 6000;
inline constexpr std::size_t kFaceCap = 3000;
inline constexpr std::size_t kPlaneCap = 6000;
inline constexpr std::size_t kSlantCap = 220;
inline constexpr std::size_t kSubspaceCap = 4096;
inline constexpr double kSubsetCap = 200000.0;

template <typename Fn>
void integer_box(const std::vector<Int>& lo, const std::vector<Int>& hi, Fn&& fn) {
    std::vector<Int> k(lo);
    while (true) {
        fn(k);
        std::size_t t = 0;
        while (t < k.size() && k[t] == hi[t]) k[t] = lo[t], ++t;
        if (t == k.size()) return;
        ++k[t];
    }
}

inline std::string point_key(const RatVec& v) {
    std::string s;
    for (const auto& x : v) {
        s += format_rational(x);
        s += ',';
    }
    return s;
}

inline std::string winding_str(const IntVec& n) {
    std::string s = "(";
    for (std::size_t j = 0; j < n.size(); ++j) {
        if (j) s += ",";
        s += n[j].str();
    }
    return s + ")";
}

inline bool ratvec_less(const RatVec& a, const RatVec& b) {
    for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) {
        if (a[j] != b[j]) return a[j] < b[j];
    }
    return a.size() < b.size();
}

// ---------------------------------------------------------------------------
// Glue facets: shared faces along which two pieces (or a piece and a lattice
// translate of one) join flush. A geodesic crossing the relative interior of
// such a facet transversally is inside the interior of the union there even
// though it is inside no single open piece.

// (primitive normal, scaled offset) of the plane n.x = c.
inline std::pair<IntVec, Rat> plane_of(const RatVec& n, const Rat& c) {
    IntVec p = primitive_from_rational(n);
    int k = 0;
    while (p[k] == 0) ++k;
    Rat lam = n[static_cast<std::size_t>(k)] / Rat(p[static_cast<std::size_t>(k)]);
    return {std::move(p), c / lam};
}

inline std::vector<LinSys> glue_facets(const Scene& sc) {
    int d = sc.torus.dim();
    std::vector<LinSys> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sc.pieces.size(); ++i) {
        for (std::size_t j = i; j < sc.pieces.size(); ++j) {
            std::vector<Int> lo(d), hi(d);
            bool far = false;
            for (int ax = 0; ax < d && !far; ++ax) {
                lo[ax] = rat_ceil((*sc.boxes[i][ax].lo - *sc.boxes[j][ax].hi) / sc.torus.periods[ax]);
                hi[ax] = rat_floor((*sc.boxes[i][ax].hi - *sc.boxes[j][ax].lo) / sc.torus.periods[ax]);
                far = lo[ax] > hi[ax];
            }
            if (far) continue;
            integer_box(lo, hi, [&](const std::vector<Int>& z) {
                int first = -1;
                for (int ax = 0; ax < d; ++ax)
                    if (z[ax] != 0) {
                        first = ax;
                        break;
                    }
                if (i == j && (first < 0 || z[first] < 0)) return;  // self at z=0, or mirror
                RatVec shift(d);
                for (int ax = 0; ax < d; ++ax) shift[ax] = Rat(z[ax]) * sc.torus.periods[ax];
                const auto& Pi = sc.pieces[i];
                const auto& Pj = sc.pieces[j];
                for (std::size_t fi = 0; fi < Pi.faces.size(); ++fi) {
                    auto [pf, cf] = plane_of(Pi.faces[fi].n, Pi.faces[fi].c);
                    for (std::size_t gj = 0; gj < Pj.faces.size(); ++gj) {
                        auto [pg, cg] =
                            plane_of(Pj.faces[gj].n, Pj.faces[gj].c + dot(Pj.faces[gj].n, shift));
                        bool opposite = true;
                        for (int ax = 0; ax < d; ++ax)
                            if (pg[ax] != -pf[ax]) opposite = false;
                        if (!opposite || cg != -cf) continue;
                        LinSys s(d);
                        RatVec pfr(d);
                        for (int ax = 0; ax < d; ++ax) pfr[ax] = Rat(pf[ax]);
                        s.add(std::move(pfr), cf, Rel::EQ);
                        auto add_side = [&](const Polyhedron& P, const RatVec& sh,
                                            std::size_t skip) {
                            for (std::size_t t = 0; t < P.faces.size(); ++t) {
                                if (t == skip) continue;
                                Rat off = P.faces[t].c + dot(P.faces[t].n, sh);
                                auto [pp, cc] = plane_of(P.faces[t].n, off);
                                bool same = true, anti = true;
                                for (int ax = 0; ax < d; ++ax) {
                                    if (pp[ax] != pf[ax]) same = false;
                                    if (pp[ax] != -pf[ax]) anti = false;
                                }
                                if ((same && cc == cf) || (anti && cc == -cf)) continue;
                                s.add(P.faces[t].n, off, Rel::LT);
                            }
                        };
                        RatVec zero(d, Rat(0));
                        add_side(Pi, zero, fi);
                        add_side(Pj, shift, gj);
                        if (!FourierMotzkin::feasible(s)) continue;
                        if (seen.insert(system_key(s)).second) out.push_back(std::move(s));
                    }
                }
            });
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transverse coordinates for a closed direction: x = diag(A) M w with M
// unimodular and last column n, so the geodesic flows along the last w-axis
// and the transverse lattice is exactly Z^{d-1} in the first coordinates.

inline LinSys x_rows_to_w(const LinSys& xsys, const FlatTorus& torus, const IntMat& M) {
    int d = torus.dim();
    LinSys out(d);
    for (const auto& r : xsys.rows) {
        RatVec a(d);
        for (int k = 0; k < d; ++k) {
            Rat v(0);
            for (int j = 0; j < d; ++j) v += r.a[j] * torus.periods[j] * Rat(M[j][k]);
            a[k] = v;
        }
        out.add(std::move(a), r.c, r.rel);
    }
    return out;
}

inline RatVec lift_w_point(const FlatTorus& torus, const IntMat& M, const RatVec& w) {
    int d = torus.dim();
    RatVec x(d);
    for (int j = 0; j < d; ++j) {
        Rat v(0);
        for (int k = 0; k < d; ++k) v += Rat(M[j][k]) * w[k];
        x[j] = torus.periods[j] * v;
    }
    return x;
}

// [0,1] box on `count` variables starting at `first`; other slots inert.
inline LinSys unit_cell(int nvars, int first, int count) {
    LinSys s(nvars);
    for (int j = first; j < first + count; ++j) {
        s.add_le({{j, Rat(1)}}, 1);
        s.add_le({{j, Rat(-1)}}, 0);
    }
    return s;
}

// Removes every integer translate of `shadow` (shifted along the active
// variables) that can touch the unit box from the cell list.
inline void subtract_unit_translates(std::vector<LinSys>& cells, const LinSys& shadow, int first,
                                     int count, std::size_t cap) {
    std::vector<Int> lo(count), hi(count);
    for (int t = 0; t < count; ++t) {
        auto iv = FourierMotzkin::var_bounds(shadow, first + t);
        if (iv.empty) return;
        if (!iv.lo || !iv.hi) throw std::logic_error("unbounded shadow of a bounded piece");
        lo[t] = rat_ceil(-*iv.hi);
        hi[t] = rat_floor(Rat(1) - *iv.lo);
        if (lo[t] > hi[t]) return;
    }
    bool done = false;
    integer_box(lo, hi, [&](const std::vector<Int>& k) {
        if (done) return;
        LinSys sh = shadow;
        for (auto& r : sh.rows) {
            for (int t = 0; t < count; ++t) r.c += r.a[first + t] * Rat(k[t]);
        }
        cells = subtract_region(cells, sh, cap);
        done = cells.empty();
    });
}

// ---------------------------------------------------------------------------
// Refinement planes. Within a leftover cell the verdicts are decided at one
// representative per closed face, which is valid only if the contact/trace
// structure is constant on each face's relative interior. The loci where that
// structure can change are (i) transverse face planes of the lattice copies in
// range and (ii) swap loci of pairs of slanted face planes (where two face
// incidence times of the geodesic collide); refining by all of them makes the
// structure constant.

inline bool canonicalize_plane(RatVec& a, Rat& c) {
    Int den = 1, num = 0;
    auto absorb = [&](const Rat& v) {
        den = lcm(den, rat_den(v));
        num = gcd(num, rat_num(v));
    };
    for (const auto& v : a) absorb(v);
    absorb(c);
    bool nz = false;
    for (const auto& v : a)
        if (v != 0) nz = true;
    if (!nz) return false;
    Rat scale(den, num < 0 ? Int(-num) : num);
    if (scale < 0) scale = -scale;
    for (auto& v : a) v *= scale;
    c *= scale;
    std::size_t k = 0;
    while (a[k] == 0) ++k;
    if (a[k] < 0) {
        for (auto& v : a) v = -v;
        c = -c;
    }
    return true;
}

inline std::string plane_key(const RatVec& a, const Rat& c) {
    return point_key(a) + "|" + format_rational(c);
}

struct PlanePool {
    std::set<std::string> keys;
    std::vector<std::pair<RatVec, Rat>> planes;

    void add(RatVec a, Rat c) {
        if (!canonicalize_plane(a, c)) return;
        if (!keys.insert(plane_key(a, c)).second) return;
        if (planes.size() + 1 > kPlaneCap) throw std::overflow_error("refinement plane blowup");
        planes.emplace_back(std::move(a), std::move(c));
    }
};

inline void gather_direction_planes(const Scene& sc, const IntMat& M, PlanePool& pool) {
    int d = sc.torus.dim(), m = d - 1;
    std::vector<std::pair<RatVec, Rat>> slanted;
    std::set<std::string> slkeys;
    for (const auto& P : sc.pieces) {
        LinSys w = x_rows_to_w(poly_system(P, Rel::LE), sc.torus, M);
        std::vector<Int> lo(d), hi(d);
        bool dead = false;
        for (int t = 0; t < d && !dead; ++t) {
            auto iv = FourierMotzkin::var_bounds(w, t);
            if (iv.empty || !iv.lo || !iv.hi) throw std::logic_error("piece unbounded in w");
            lo[t] = rat_ceil(-*iv.hi);
            hi[t] = rat_floor(Rat(1) - *iv.lo);
            dead = lo[t] > hi[t];
        }
        if (dead) continue;
        integer_box(lo, hi, [&](const std::vector<Int>& k) {
            for (const auto& r : w.rows) {
                RatVec a = r.a;
                Rat off = r.c;
                for (int t = 0; t < d; ++t) off += r.a[t] * Rat(k[t]);
                if (a[m] == 0) {
                    pool.add(std::move(a), std::move(off));
                } else {
                    if (!canonicalize_plane(a, off)) continue;
                    if (!slkeys.insert(plane_key(a, off)).second) continue;
                    if (slanted.size() + 1 > kSlantCap)
                        throw std::overflow_error("slanted plane family blowup");
                    slanted.emplace_back(std::move(a), std::move(off));
                }
            }
        });
    }
    for (std::size_t p = 0; p < slanted.size(); ++p) {
        for (std::size_t q = p + 1; q < slanted.size(); ++q) {
            const auto& [a, ca] = slanted[p];
            const auto& [b, cb] = slanted[q];
            RatVec swap(d, Rat(0));
            for (int j = 0; j < m; ++j) swap[j] = a[j] * b[m] - b[j] * a[m];
            pool.add(std::move(swap), ca * b[m] - cb * a[m]);
        }
    }
}

// ---------------------------------------------------------------------------
// Orbit-closure (coset) machinery. A subspace is given by a saturated integer
// lattice basis Lambda of its unit-cube direction space; the transverse torus
// is coordinatized by y_i = nu_i . diag(A)^{-1} x where the nu_i span the
// saturated orthogonal lattice, so the transverse lattice is exactly Z^{d-k}.

inline RatVec coset_point(const FlatTorus& torus, const RatVec& X0, const IntMat& Lambda,
                          const RatVec& s) {
    RatVec x = X0;
    for (std::size_t i = 0; i < Lambda.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] += s[i] * torus.periods[j] * Rat(Lambda[i][j]);
    }
    return x;
}

// Face rows of a lattice copy of one piece restricted to the coset
// {X0 + diag(A) Lambda^T s}, in the s variables; [0,1]^k box rows included.
inline LinSys coset_system(const Scene& sc, std::size_t piece, const RatVec& X0,
                           const IntMat& Lambda, const std::vector<Int>& z, Rel rel) {
    int d = sc.torus.dim();
    int k = static_cast<int>(Lambda.size());
    LinSys s(k);
    for (const auto& f : sc.pieces[piece].faces) {
        RatVec a(k);
        for (int i = 0; i < k; ++i) {
            Rat v(0);
            for (int j = 0; j < d; ++j) v += f.n[j] * sc.torus.periods[j] * Rat(Lambda[i][j]);
            a[i] = v;
        }
        Rat c = f.c - dot(f.n, X0);
        for (int j = 0; j < d; ++j) c += f.n[j] * Rat(z[j]) * sc.torus.periods[j];
        s.add(std::move(a), std::move(c), rel);
    }
    for (int i = 0; i < k; ++i) {
        s.add_le({{i, Rat(1)}}, 1);
        s.add_le({{i, Rat(-1)}}, 0);
    }
    return s;
}

// Visits the lattice copies of an x-space region (given per-axis bounds)
// that can touch the coset patch {X0 + diag(A) Lambda^T s : s in [0,1]^k}.
template <typename Fn>
void coset_copy_range(const Scene& sc, const std::vector<FourierMotzkin::Interval>& box,
                      const RatVec& X0, const IntMat& Lambda, Fn&& fn) {
    int d = sc.torus.dim();
    std::vector<Int> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        Rat plo = X0[j], phi = X0[j];
        for (const auto& lam : Lambda) {
            Rat step = sc.torus.periods[j] * Rat(lam[j]);
            if (step > 0)
                phi += step;
            else
                plo += step;
        }
        if (!box[j].lo || !box[j].hi) throw std::logic_error("unbounded region box");
        lo[j] = rat_ceil((*box[j].lo - phi) / sc.torus.periods[j]);
        hi[j] = rat_floor((*box[j].hi - plo) / sc.torus.periods[j]);
        if (lo[j] > hi[j]) return;
    }
    integer_box(lo, hi, fn);
}

inline bool coset_meets_support(const Scene& sc, const RatVec& X0, const IntMat& Lambda) {
    bool found = false;
    for (std::size_t i = 0; i < sc.pieces.size() && !found; ++i) {
        coset_copy_range(sc, sc.boxes[i], X0, Lambda, [&](const std::vector<Int>& z) {
            if (!found && FourierMotzkin::feasible(coset_system(sc, i, X0, Lambda, z, Rel::LE)))
                found = true;
        });
    }
    return found;
}

// Exact decision of whether the coset meets the interior of the union: an
// open piece or glue-facet hit decides immediately; otherwise the patch is
// refined by the face planes of every touching closed copy and one point per
// closed face of each refined cell is classified.
inline bool coset_meets_interior(const Scene& sc, const RatVec& X0, const IntMat& Lambda,
                                 const std::vector<LinSys>& glues) {
    int d = sc.torus.dim();
    int k = static_cast<int>(Lambda.size());
    bool hit = false;
    for (std::size_t i = 0; i < sc.pieces.size() && !hit; ++i) {
        coset_copy_range(sc, sc.boxes[i], X0, Lambda, [&](const std::vector<Int>& z) {
            if (!hit && FourierMotzkin::feasible(coset_system(sc, i, X0, Lambda, z, Rel::LT)))
                hit = true;
        });
    }
    if (hit) return true;
    for (const auto& g : glues) {
        std::vector<FourierMotzkin::Interval> box;
        for (int j = 0; j < d; ++j) box.push_back(FourierMotzkin::var_bounds(g, j));
        bool dead = false;
        for (const auto& iv : box) dead = dead || iv.empty;
        if (dead) continue;
        coset_copy_range(sc, box, X0, Lambda, [&](const std::vector<Int>& z) {
            if (hit) return;
            LinSys s(k);
            for (const auto& r : g.rows) {
                RatVec a(k);
                for (int i2 = 0; i2 < k; ++i2) {
                    Rat v(0);
                    for (int j = 0; j < d; ++j)
                        v += r.a[j] * sc.torus.periods[j] * Rat(Lambda[i2][j]);
                    a[i2] = v;
                }
                Rat c = r.c - dot(r.a, X0);
                for (int j = 0; j < d; ++j) c += r.a[j] * Rat(z[j]) * sc.torus.periods[j];
                s.add(std::move(a), std::move(c), r.rel);
            }
            for (int i2 = 0; i2 < k; ++i2) {
                s.add_le({{i2, Rat(1)}}, 1);
                s.add_le({{i2, Rat(-1)}}, 0);
            }
            if (FourierMotzkin::feasible(s)) hit = true;
        });
    }
    if (hit) return true;

    // No open or glue hit; only higher-order contact can reach the interior.
    PlanePool pool;
    for (std::size_t i = 0; i < sc.pieces.size(); ++i) {
        coset_copy_range(sc, sc.boxes[i], X0, Lambda, [&](const std::vector<Int>& z) {
            LinSys s = coset_system(sc, i, X0, Lambda, z, Rel::LE);
            if (!FourierMotzkin::feasible(s)) return;
            for (std::size_t r = 0; r + 2 * static_cast<std::size_t>(k) < s.rows.size(); ++r)
                pool.add(s.rows[r].a, s.rows[r].c);
        });
    }
    std::vector<LinSys> cells{unit_cell(k, 0, k)};
    for (const auto& pl : pool.planes) refine_by_plane(cells, pl.first, pl.second, kCellCap);
    for (const auto& cell : cells) {
        for (const auto& f : closed_faces(cell, k, kFaceCap)) {
            auto s = FourierMotzkin::witness(f.sys);
            if (!s) continue;
            if (classify_point(sc, coset_point(sc.torus, X0, Lambda, *s)).cls ==
                PointClass::Interior)
                return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Per-direction scan of closed geodesics.

struct DirectionScanResult {
    bool covered = false;
    bool unresolved = false;  // a positive-dimensional leftover family defied certification
    std::vector<GeodesicWitness> witnesses;
};

inline std::string contact_evidence(const Scene& sc, const ClosedGeodesic& geo,
                                    GeodesicWitness& wit) {
    auto segs = contact_segments(sc, geo);
    auto rep = damped_normal_set(sc, geo, segs);
    wit.complement = rep.complement;
    wit.exceptional = rep.exceptional;
    std::size_t full = 0, punctual = 0;
    for (const auto& s : segs) (s.punctual ? punctual : full)++;
    std::ostringstream ev;
    if (full == 0 && punctual == 0) {
        ev << "avoids the damped region";
    } else if (full == 0) {
        ev << "touches the damped region only at " << punctual << " isolated point(s)";
    } else {
        ev << "razes the damped region along " << full << " segment(s)";
        if (punctual) ev << " and " << punctual << " isolated point(s)";
    }
    ev << "; undamped transverse set: " << to_string(rep.complement);
    return ev.str();
}

inline DirectionScanResult scan_direction(const Scene& sc, const IntVec& n, ControlCondition cond,
                                          const std::vector<LinSys>& glues) {
    const FlatTorus& torus = sc.torus;
    int d = torus.dim(), m = d - 1;
    bool weak = cond == ControlCondition::WGCC;
    IntMat M = unimodular_with_last_column(n);

    std::vector<LinSys> shadows;
    std::set<std::string> skeys;
    auto add_shadow = [&](const LinSys& xsys) {
        LinSys w = x_rows_to_w(xsys, torus, M);
        std::vector<bool> keep(static_cast<std::size_t>(d), true);
        keep[static_cast<std::size_t>(m)] = false;
        auto sh = FourierMotzkin::project(std::move(w), keep);
        if (!sh) return;
        if (skeys.insert(system_key(*sh)).second) shadows.push_back(std::move(*sh));
    };
    for (const auto& P : sc.pieces) add_shadow(poly_system(P, weak ? Rel::LE : Rel::LT));
    if (!weak)
        for (const auto& g : glues) add_shadow(g);

    std::vector<LinSys> cells{unit_cell(d, 0, m)};
    for (const auto& sh : shadows) {
        subtract_unit_translates(cells, sh, 0, m, kCellCap);
        if (cells.empty()) break;
    }
    DirectionScanResult res;
    res.covered = cells.empty();
    if (res.covered) return res;

    if (weak) {
        // Closed shadows are exact: any leftover point misses the closed set.
        auto w = FourierMotzkin::witness(cells.front());
        if (!w) throw std::logic_error("infeasible leftover cell");
        RatVec x = lift_w_point(torus, M, *w);
        ClosedGeodesic geo = make_closed_geodesic(torus, x, n);
        if (!containment_records(sc, geo).empty())
            throw std::logic_error("weak leftover meets the closed set");
        GeodesicWitness wit;
        wit.base = geo.base;
        wit.n = geo.n;
        wit.evidence = "does not meet the closed damped region";
        res.witnesses.push_back(std::move(wit));
        return res;
    }

    // The damping census needs the contact structure constant on each face of
    // the leftover, so it refines by every locus where that structure can
    // change. A bare interior test does not: each representative is verified
    // on its own, and zero-dimensional cells are decided exactly.
    bool census = cond != ControlCondition::SGCC;
    if (census) {
        PlanePool pool;
        gather_direction_planes(sc, M, pool);
        for (const auto& pl : pool.planes) refine_by_plane(cells, pl.first, pl.second, kCellCap);
    }

    std::set<std::string> facekeys, geokeys;
    for (const auto& cell : cells) {
        auto faces = closed_faces(cell, m, kFaceCap);
        bool cell_witness = false;
        for (const auto& f : faces) {
            if (!facekeys.insert(system_key(f.sys)).second) continue;
            auto w = FourierMotzkin::witness(f.sys);
            if (!w) continue;
            RatVec x = lift_w_point(torus, M, *w);
            ClosedGeodesic geo = make_closed_geodesic(torus, x, n);
            if (!geokeys.insert(point_key(geo.base)).second) continue;
            if (!trace_to_interior(sc, geo).never()) continue;  // enters after all
            cell_witness = true;
            GeodesicWitness wit;
            wit.base = geo.base;
            wit.n = geo.n;
            wit.family_dim = f.dim;
            if (census)
                wit.evidence = contact_evidence(sc, geo, wit);
            else
                wit.evidence = "never enters the interior of the damped region";
            res.witnesses.push_back(std::move(wit));
        }
        if (!census && !cell_witness && !faces.empty() && faces.front().dim >= 1)
            res.unresolved = true;
    }
    std::sort(res.witnesses.begin(), res.witnesses.end(),
              [](const GeodesicWitness& a, const GeodesicWitness& b) {
                  return ratvec_less(a.base, b.base);
              });
    return res;
}

// ---------------------------------------------------------------------------
// Orbit-closure sweep for the control conditions.

struct CosetScanResult {
    bool covered = false;
    bool unresolved = false;
    std::vector<GeodesicWitness> witnesses;
};

inline RatVec lift_coset_base(const FlatTorus& torus, const IntMat& N, const RatVec& ystar) {
    int d = torus.dim();
    LinSys s(d);
    for (std::size_t i = 0; i < N.size(); ++i) {
        RatVec a(d);
        for (int j = 0; j < d; ++j) a[j] = Rat(N[i][j]) / torus.periods[j];
        s.add(std::move(a), ystar[i], Rel::EQ);
    }
    auto w = FourierMotzkin::witness(s);
    if (!w) throw std::logic_error("transverse forms are not surjective");
    return *w;
}

inline RatMat coset_span(const FlatTorus& torus, const IntMat& Lambda) {
    RatMat F;
    for (const auto& lam : Lambda) {
        RatVec row(lam.size());
        for (std::size_t j = 0; j < lam.size(); ++j) row[j] = torus.periods[j] * Rat(lam[j]);
        F.push_back(std::move(row));
    }
    return F;
}

inline CosetScanResult scan_subspace(const Scene& sc, const IntMat& Lambda, bool weak,
                                     const std::vector<LinSys>& glues) {
    const FlatTorus& torus = sc.torus;
    int d = torus.dim();
    IntMat N = integer_kernel(Lambda);
    int mp = static_cast<int>(N.size());
    int nv = d + mp;

    auto joint = [&](const LinSys& xsys) {
        LinSys s(nv);
        for (const auto& r : xsys.rows) {
            RatVec a(nv, Rat(0));
            for (int j = 0; j < d; ++j) a[j] = r.a[j];
            s.add(std::move(a), r.c, r.rel);
        }
        for (int i = 0; i < mp; ++i) {
            RatVec a(nv, Rat(0));
            for (int j = 0; j < d; ++j) a[j] = Rat(N[i][j]) / torus.periods[j];
            a[d + i] = Rat(-1);
            s.add(std::move(a), Rat(0), Rel::EQ);
        }
        return s;
    };
    std::vector<bool> keep(static_cast<std::size_t>(nv), false);
    for (int i = 0; i < mp; ++i) keep[d + i] = true;

    std::vector<LinSys> shadows;
    std::set<std::string> skeys;
    auto add_shadow = [&](const LinSys& xsys) {
        auto sh = FourierMotzkin::project(joint(xsys), keep);
        if (!sh) return;
        if (skeys.insert(system_key(*sh)).second) shadows.push_back(std::move(*sh));
    };
    for (const auto& P : sc.pieces) add_shadow(poly_system(P, weak ? Rel::LE : Rel::LT));
    if (!weak)
        for (const auto& g : glues) add_shadow(g);

    std::vector<LinSys> cells{unit_cell(nv, d, mp)};
    for (const auto& sh : shadows) {
        subtract_unit_translates(cells, sh, d, mp, kCellCap);
        if (cells.empty()) break;
    }
    CosetScanResult res;
    res.covered = cells.empty();
    if (res.covered) return res;

    std::set<std::string> facekeys, cosetkeys;
    for (const auto& cell : cells) {
        auto faces = closed_faces(cell, mp, kFaceCap);
        bool cell_witness = false;
        for (const auto& f : faces) {
            if (!facekeys.insert(system_key(f.sys)).second) continue;
            auto w = FourierMotzkin::witness(f.sys);
            if (!w) continue;
            RatVec ystar(mp);
            std::string ykey;
            for (int i = 0; i < mp; ++i) {
                ystar[i] = (*w)[d + i];
                Rat frac = ystar[i] - Rat(rat_floor(ystar[i]));
                ykey += format_rational(frac) + ",";
            }
            if (!cosetkeys.insert(ykey).second) continue;
            RatVec X0 = fold_point(torus, lift_coset_base(torus, N, ystar));
            if (weak) {
                if (coset_meets_support(sc, X0, Lambda))
                    throw std::logic_error("weak coset leftover meets the closed set");
            } else {
                if (coset_meets_interior(sc, X0, Lambda, glues)) continue;
            }
            cell_witness = true;
            GeodesicWitness wit;
            wit.base = X0;
            wit.span = coset_span(torus, Lambda);
            wit.family_dim = f.dim;
            wit.evidence = weak ? "orbit closure misses the closed damped region"
                                : "orbit closure avoids the interior of the damped region";
            res.witnesses.push_back(std::move(wit));
            if (weak) return res;
        }
        if (!weak && !cell_witness && !faces.empty() && faces.front().dim >= 1)
            res.unresolved = true;
    }
    std::sort(res.witnesses.begin(), res.witnesses.end(),
              [](const GeodesicWitness& a, const GeodesicWitness& b) {
                  return ratvec_less(a.base, b.base);
              });
    return res;
}

// Enumerates the orbit-closure subspaces scanned at the given bound: all
// rank-(d-1) subspaces via their primitive normals within the winding window,
// and ranks 2..d-2 as spans of subsets of enumerated directions (reduced or
// skipped with a note when combinatorially out of reach).
inline std::vector<IntMat> dense_subspaces(int d, int bound, std::vector<std::string>& notes,
                                           bool& incomplete) {
    std::vector<IntMat> out;
    std::set<std::string> sigs;
    auto push = [&](IntMat Lambda) {
        RatMat rows;
        for (const auto& lam : Lambda) {
            RatVec r(lam.size());
            for (std::size_t j = 0; j < lam.size(); ++j) r[j] = Rat(lam[j]);
            rows.push_back(std::move(r));
        }
        if (!sigs.insert(subspace_signature(std::move(rows))).second) return;
        if (out.size() + 1 > kSubspaceCap) throw std::overflow_error("orbit subspace blowup");
        out.push_back(std::move(Lambda));
    };
    for (const auto& nu : enumerate_primitive_directions(d, bound)) push(integer_kernel({nu}));
    for (int k = d - 2; k >= 2; --k) {
        int nb = bound;
        std::vector<IntVec> dirs;
        while (nb >= 1) {
            dirs = enumerate_primitive_directions(d, nb);
            double combos = 1.0;
            for (int t = 0; t < k; ++t) combos *= static_cast<double>(dirs.size() - t) / (t + 1);
            if (combos <= kSubsetCap) break;
            --nb;
            dirs.clear();
        }
        if (dirs.empty()) {
            notes.push_back("rank-" + std::to_string(k) + " orbit sweep skipped (too many subsets)");
            incomplete = true;
            continue;
        }
        if (nb < bound) {
            notes.push_back("rank-" + std::to_string(k) + " orbit sweep reduced to bound " +
                            std::to_string(nb));
            incomplete = true;
        }
        std::vector<std::size_t> idx(k);
        for (int t = 0; t < k; ++t) idx[t] = t;
        if (dirs.size() < static_cast<std::size_t>(k)) continue;
        while (true) {
            IntMat span;
            for (int t = 0; t < k; ++t) span.push_back(dirs[idx[t]]);
            RatMat rows;
            for (const auto& v : span) {
                RatVec r(v.size());
                for (std::size_t j = 0; j < v.size(); ++j) r[j] = Rat(v[j]);
                rows.push_back(std::move(r));
            }
            if (rat_rank(rows) == k) push(integer_kernel(integer_kernel(span)));
            int t = k - 1;
            while (t >= 0 && idx[t] == dirs.size() - static_cast<std::size_t>(k - t)) --t;
            if (t < 0) break;
            ++idx[t];
            for (int u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public interface.

// Exact test of whether the closure of the orbit through g meets the interior
// (resp. the closed set) of the damped region.
inline bool orbit_closure_meets_interior(const Scene& sc, const DenseGeodesic& g) {
    int d = sc.torus.dim();
    RatMat urows;
    for (const auto& row : g.F) {
        RatVec u(row.size());
        for (int j = 0; j < d; ++j) u[j] = row[j] / sc.torus.periods[j];
        urows.push_back(std::move(u));
    }
    if (rat_rank(urows) == d) return !sc.pieces.empty();  // closure is the whole torus
    IntMat B;
    for (const auto& u : urows) B.push_back(primitive_from_rational(u));
    IntMat Lambda = integer_kernel(integer_kernel(B));
    return detail::coset_meets_interior(sc, fold_point(sc.torus, g.base), Lambda,
                                        detail::glue_facets(sc));
}

inline bool orbit_closure_meets_support(const Scene& sc, const DenseGeodesic& g) {
    int d = sc.torus.dim();
    RatMat urows;
    for (const auto& row : g.F) {
        RatVec u(row.size());
        for (int j = 0; j < d; ++j) u[j] = row[j] / sc.torus.periods[j];
        urows.push_back(std::move(u));
    }
    if (rat_rank(urows) == d) return !sc.pieces.empty();
    IntMat B;
    for (const auto& u : urows) B.push_back(primitive_from_rational(u));
    IntMat Lambda = integer_kernel(integer_kernel(B));
    return detail::coset_meets_support(sc, fold_point(sc.torus, g.base), Lambda);
}

// Decides the condition by scanning every primitive winding direction with
// |n|_inf <= bound (canonical orientation; verdicts are orientation-blind)
// and, for WGCC/SGCC, every enumerated orbit-closure subspace. `horizon` = 0
// means one full period of each geodesic, which is always sufficient; an
// explicit positive horizon must cover the longest enumerated period or a
// Holds verdict degrades to Unknown.
inline ConditionReport check_condition(const Scene& sc, ControlCondition cond, int bound,
                                       const Rat& horizon = Rat(0)) {
    if (bound < 1) throw std::invalid_argument("winding bound must be positive");
    int d = sc.torus.dim();
    ConditionReport rep;
    rep.condition = cond;
    rep.bound = bound;
    bool damping = cond == ControlCondition::NormalDamping ||
                   cond == ControlCondition::FiniteExceptions;
    std::vector<LinSys> glues =
        cond == ControlCondition::WGCC ? std::vector<LinSys>{} : detail::glue_facets(sc);
    std::vector<std::string> notes;
    bool unknown = false, fails = false;

    auto dirs = enumerate_primitive_directions(d, bound);
    for (const auto& n : dirs) {
        detail::DirectionScanResult res;
        try {
            res = detail::scan_direction(sc, n, cond, glues);
        } catch (const std::overflow_error& e) {
            unknown = true;
            notes.push_back("direction " + detail::winding_str(n) + ": " + e.what());
            continue;
        }
        for (auto& w : res.witnesses) rep.witnesses.push_back(std::move(w));
        if (!damping && !rep.witnesses.empty()) {
            fails = true;
            break;
        }
        if (res.unresolved) {
            unknown = true;
            notes.push_back("direction " + detail::winding_str(n) +
                            ": leftover family could not be certified");
        }
    }

    if (damping) {
        for (const auto& w : rep.witnesses) {
            if (w.complement == ComplementClass::Unknown) unknown = true;
            else if (w.complement != ComplementClass::Empty &&
                     cond == ControlCondition::NormalDamping)
                fails = true;
            else if (w.complement == ComplementClass::PositiveMeasure)
                fails = true;
        }
    } else if (!fails && d >= 3) {
        bool incomplete = false;
        std::vector<IntMat> subs;
        try {
            subs = detail::dense_subspaces(d, bound, notes, incomplete);
        } catch (const std::overflow_error& e) {
            notes.push_back(std::string("orbit sweep: ") + e.what());
            incomplete = true;
        }
        unknown |= incomplete;
        for (const auto& L : subs) {
            detail::CosetScanResult res;
            try {
                res = detail::scan_subspace(sc, L, cond == ControlCondition::WGCC, glues);
            } catch (const std::overflow_error& e) {
                unknown = true;
                notes.push_back(std::string("orbit subspace: ") + e.what());
                continue;
            }
            if (!res.witnesses.empty()) {
                fails = true;
                rep.witnesses = std::move(res.witnesses);
                break;
            }
            if (res.unresolved) {
                unknown = true;
                notes.push_back("orbit subspace: leftover family could not be certified");
            }
        }
    }

    if (!fails && !damping && horizon > 0) {
        Rat need(0);
        for (const auto& n : dirs) {
            Rat p2(0);
            for (int j = 0; j < d; ++j) {
                Rat v = Rat(n[j]) * sc.torus.periods[j];
                p2 += v * v;
            }
            if (p2 > need) need = p2;
        }
        if (horizon * horizon < need) {
            unknown = true;
            notes.push_back("horizon shorter than the longest enumerated period");
        }
    }

    rep.verdict = fails ? Verdict::Fails : (unknown ? Verdict::Unknown : Verdict::Holds);
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i) rep.note += "; ";
        rep.note += notes[i];
    }
    return rep;
}

}  // namespace torwave
