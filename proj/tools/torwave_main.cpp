#include <torwave/conditions.hpp>
#include <torwave/presets.hpp>
#include <torwave/quasimode.hpp>
#include <torwave/reduction.hpp>
#include <torwave/report_io.hpp>
#include <torwave/scene_io.hpp>
#include <torwave/sphere_flow.hpp>
#include <torwave/wave.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace torwave;
using nlohmann::ordered_json;

namespace {

// exit codes: 0 all-holds/success, 1 any condition fails, 2 unknown verdicts,
// 3 invalid scene or job configuration, 4 non-finite simulation abort,
// 5 reduction degeneracy.
constexpr int kExitFails = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitConfig = 3;
constexpr int kExitAbort = 4;
constexpr int kExitDegenerate = 5;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(sep, start);
        if (end == std::string::npos) end = s.size();
        if (end > start) out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

double parse_ratio(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

Rat parse_rational_str(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    Int den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rat(Int(digits), den);
}

Scene load_scene_arg(const std::string& path, const std::string& preset) {
    if (!path.empty() && !preset.empty())
        throw std::invalid_argument("give either --scene or --preset, not both");
    if (!path.empty()) return load_scene(path);
    if (!preset.empty()) return preset_scene(preset);
    throw std::invalid_argument("one of --scene or --preset is required");
}

std::string ensure_outdir(const std::string& out) {
    std::filesystem::create_directories(out);
    return out;
}

ordered_json witness_json(const GeodesicWitness& w) {
    ordered_json j;
    ordered_json base = ordered_json::array();
    for (const auto& x : w.base) base.push_back(format_rational(x));
    j["base"] = std::move(base);
    if (!w.n.empty()) {
        ordered_json n = ordered_json::array();
        for (const auto& x : w.n) n.push_back(x.str());
        j["winding"] = std::move(n);
    }
    if (!w.span.empty()) {
        ordered_json span = ordered_json::array();
        for (const auto& row : w.span) {
            ordered_json r = ordered_json::array();
            for (const auto& x : row) r.push_back(format_rational(x));
            span.push_back(std::move(r));
        }
        j["span"] = std::move(span);
    }
    j["family_dim"] = w.family_dim;
    j["undamped_transverse_set"] = to_string(w.complement);
    if (!w.exceptional.empty()) {
        ordered_json ex = ordered_json::array();
        for (const auto& dir : w.exceptional) {
            ordered_json r = ordered_json::array();
            for (const auto& x : dir) r.push_back(x.str());
            ex.push_back(std::move(r));
        }
        j["exceptional_directions"] = std::move(ex);
    }
    j["evidence"] = w.evidence;
    return j;
}

// ---------------------------------------------------------------- verify ---

struct VerifyArgs {
    std::string scene, preset;
    std::string conditions = "wgcc,sgcc,normal_damping,finite_exceptions";
    int bound = 3;
    std::string horizon = "0";
    std::string out = ".";
};

int run_verify(const VerifyArgs& a) {
    ordered_json doc;
    doc["schema"] = "1";
    Scene sc;
    try {
        sc = load_scene_arg(a.scene, a.preset);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        doc["error"] = e.what();
        try {
            write_text_file(ensure_outdir(a.out) + "/verdicts.json", dump_g17(doc));
        } catch (...) {
        }
        return kExitConfig;
    }

    std::vector<ControlCondition> conds;
    Rat horizon;
    try {
        for (const auto& tok : split(a.conditions, ','))
            conds.push_back(parse_condition(tok == "finexc" ? "finite_exceptions" : tok));
        if (conds.empty()) throw std::invalid_argument("empty condition list");
        horizon = parse_rational_str(a.horizon);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }

    doc["scene"] = sc.name;
    doc["bound"] = a.bound;
    doc["horizon"] = format_rational(horizon);
    ordered_json arr = ordered_json::array();
    bool fails = false, unknown = false;
    for (ControlCondition c : conds) {
        ConditionReport rep = check_condition(sc, c, a.bound, horizon);
        fails |= rep.verdict == Verdict::Fails;
        unknown |= rep.verdict == Verdict::Unknown;
        std::printf("%-18s %s%s%s\n", to_string(rep.condition), to_string(rep.verdict),
                    rep.note.empty() ? "" : "  -- ", rep.note.c_str());
        ordered_json jc;
        jc["condition"] = to_string(rep.condition);
        jc["verdict"] = to_string(rep.verdict);
        jc["bound"] = rep.bound;
        if (!rep.note.empty()) jc["note"] = rep.note;
        ordered_json wit = ordered_json::array();
        for (const auto& w : rep.witnesses) wit.push_back(witness_json(w));
        jc["witnesses"] = std::move(wit);
        arr.push_back(std::move(jc));
    }
    doc["conditions"] = std::move(arr);
    write_text_file(ensure_outdir(a.out) + "/verdicts.json", dump_g17(doc));
    return fails ? kExitFails : (unknown ? kExitUnknown : 0);
}

// -------------------------------------------------------------- simulate ---

struct SimArgs {
    std::string scene, preset;
    int res = 64;
    double dt = 1e-3, T = 10.0, m = 0.0;
    std::string data = "random";
    std::string h = "1/16";
    int axis = 0;
    int band_axis = -1;
    double band_center = 0.0, band_halfwidth = 0.2;
    int kmax = 4;
    std::uint64_t seed = 1;
    std::string out = ".";
    bool svg = false;
};

std::string trace_csv(const EnergyTrace& tr) {
    std::string csv = "t,energy,flux,residual\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        csv += fmt_g17(tr.times[i]) + "," + fmt_g17(tr.energy[i]) + "," + fmt_g17(tr.flux[i]) +
               "," + fmt_g17(tr.residual[i]) + "\n";
    return csv;
}

std::string energy_svg(const EnergyTrace& tr) {
    PlotSeries s;
    s.label = "log10 E(t)";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        if (tr.energy[i] <= 0) continue;
        s.x.push_back(tr.times[i]);
        s.y.push_back(std::log10(tr.energy[i]));
    }
    return svg_line_plot("energy decay", "t", "log10 E", {s});
}

// Initial data from the --data spec: band-limited random (seeded), a
// Gaussian beam or band profile along --axis, or an explicit mode list
// "modes:k1,k2[;k1,k2...]".
std::pair<GridField, GridField> initial_data(const Scene& sc, const SimArgs& a,
                                             const std::vector<int>& res, double* h_used) {
    int d = sc.torus.dim();
    GridField v0 = make_field(sc.torus, res);
    if (a.data == "random") {
        Rng rng(a.seed);
        GridField u0 = band_limited_random(sc.torus, res, a.kmax, rng);
        scale_field(u0, 1.0 / norm_l2(u0));
        GridField w = band_limited_random(sc.torus, res, a.kmax, rng);
        scale_field(w, 1.0 / norm_l2(w));
        return {std::move(u0), std::move(w)};
    }
    if (a.data == "beam") {
        DVec center(d, 0.0);
        for (int j = 0; j < d; ++j)
            if (j != a.axis) center[j] = 0.5 * to_double(sc.torus.periods[j]);
        QuasimodeField q = gaussian_beam(sc.torus, a.axis, center, parse_ratio(a.h), res);
        *h_used = q.h;
        return {std::move(q.u), std::move(v0)};
    }
    if (a.data == "profile") {
        int band = a.band_axis >= 0 ? a.band_axis : (a.axis + 1) % d;
        double hw = a.band_halfwidth;
        BandProfile prof{band, a.band_center, hw, [hw](double t) { return bump(t / hw); }};
        QuasimodeField q = profile_quasimode(sc.torus, a.axis, prof, parse_ratio(a.h), res);
        *h_used = q.h;
        return {std::move(q.u), std::move(v0)};
    }
    if (a.data.rfind("modes:", 0) == 0) {
        GridField u0 = make_field(sc.torus, res);
        for (const auto& mode : split(a.data.substr(6), ';')) {
            std::vector<long long> k;
            for (const auto& tok : split(mode, ',')) k.push_back(std::stoll(tok));
            GridField w = plane_wave(sc.torus, res, k);
            for (std::size_t i = 0; i < u0.samples.size(); ++i) u0.samples[i] += w.samples[i];
        }
        invalidate_coeffs(u0);
        double n = norm_l2(u0);
        if (n == 0) throw std::invalid_argument("mode list produced zero data");
        scale_field(u0, 1.0 / n);
        return {std::move(u0), std::move(v0)};
    }
    throw std::invalid_argument("unknown --data spec: " + a.data);
}

int run_simulate(const SimArgs& a) {
    Scene sc;
    GridField u0, v0;
    double h_used = 0;
    try {
        sc = load_scene_arg(a.scene, a.preset);
        std::vector<int> res(sc.torus.dim(), a.res);
        std::tie(u0, v0) = initial_data(sc, a, res, &h_used);
        if (a.T <= 0 || a.dt <= 0) throw std::invalid_argument("need T > 0 and dt > 0");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }

    std::string out = ensure_outdir(a.out);
    long long nsteps = std::llround(a.T / a.dt);
    int stride = static_cast<int>(std::max(1ll, nsteps / 4000));
    SimulationResult result;
    try {
        result = run_simulation(sc, u0, v0, a.m, a.T, a.dt, stride);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const SimulationAbort& ab) {
        std::fprintf(stderr, "error: %s\n", ab.what());
        write_text_file(out + "/trace.csv", trace_csv(ab.trace));
        save_field(ab.u, out + "/last_u");
        save_field(ab.v, out + "/last_v");
        ordered_json j;
        j["schema"] = "1";
        j["error"] = ab.what();
        j["last_good_t"] = ab.t;
        write_text_file(out + "/abort.json", dump_g17(j));
        return kExitAbort;
    }

    write_text_file(out + "/trace.csv", trace_csv(result.trace));
    save_field(result.final_state.u, out + "/final_u");
    save_field(result.final_state.v, out + "/final_v");
    if (a.svg) write_text_file(out + "/energy.svg", energy_svg(result.trace));

    ordered_json j;
    j["schema"] = "1";
    j["scene"] = sc.name;
    j["data"] = a.data;
    if (h_used > 0) j["h"] = h_used;
    j["res"] = a.res;
    j["dt"] = a.dt;
    j["T"] = a.T;
    j["m"] = a.m;
    j["seed"] = a.seed;
    j["E0"] = result.trace.energy.front();
    j["E_final"] = result.trace.energy.back();
    j["fit_window"] = ordered_json::array({0.5 * a.T, a.T});
    try {
        DecayFit fit = fit_decay_rate(result.trace, 0.5 * a.T, a.T);
        j["rate"] = fit.rate;
        j["prefactor"] = fit.prefactor;
        j["r_squared"] = fit.r_squared;
        std::printf("fitted decay rate c = %s (R^2 = %s)\n", fmt_g17(fit.rate).c_str(),
                    fmt_g17(fit.r_squared).c_str());
    } catch (const std::exception& e) {
        j["fit_error"] = e.what();
        std::printf("decay fit skipped: %s\n", e.what());
    }
    write_text_file(out + "/fit.json", dump_g17(j));
    return 0;
}

// ----------------------------------------------------------------- probe ---

struct ProbeArgs {
    std::string scene, preset;
    int res = 256;
    std::string h = "1/32,1/64,1/128";
    std::string data = "profile";
    int axis = 0;
    int band_axis = -1;
    double band_center = 0.0, band_halfwidth = 0.2;
    std::string out = ".";
};

int run_probe(const ProbeArgs& a) {
    Scene sc;
    GridField araster;
    std::vector<double> hs;
    try {
        sc = load_scene_arg(a.scene, a.preset);
        if (a.data != "beam" && a.data != "profile")
            throw std::invalid_argument("probe --data must be beam or profile");
        std::vector<int> res(sc.torus.dim(), a.res);
        araster = rasterize_damping(sc, res);
        for (const auto& tok : split(a.h, ',')) {
            double hv = parse_ratio(tok);
            if (!(hv > 0 && hv < 1))
                throw std::invalid_argument("h values must lie in (0, 1): " + tok);
            hs.push_back(hv);
        }
        if (hs.empty()) throw std::invalid_argument("empty --h list");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }

    int d = sc.torus.dim();
    int band = a.band_axis >= 0 ? a.band_axis : (a.axis + 1) % d;
    std::string csv =
        "h,norm_u,norm_au,norm_f,epsilon,obs_ratio,nonconc_constant,nonconc_width,"
        "nonconc_vacuous,slab_ratio\n";
    ordered_json rows = ordered_json::array();
    std::printf("%12s %12s %12s %12s %12s\n", "h", "norm_au", "norm_f", "epsilon", "obs_ratio");
    for (double hv : hs) {
        QuasimodeField q;
        try {
            if (a.data == "beam") {
                DVec center(d, 0.0);
                for (int j = 0; j < d; ++j)
                    if (j != a.axis) center[j] = 0.5 * to_double(sc.torus.periods[j]);
                q = gaussian_beam(sc.torus, a.axis, center, hv, araster.res);
            } else {
                double hw = a.band_halfwidth;
                BandProfile prof{band, a.band_center, hw,
                                 [hw](double t) { return bump(t / hw); }};
                q = profile_quasimode(sc.torus, a.axis, prof, hv, araster.res);
            }
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: h = %s skipped: %s\n", fmt_g17(hv).c_str(),
                         e.what());
            continue;
        }
        QuasimodeReport rep = quasimode_report(q, araster);
        GridField f = helmholtz_residual(q.u, q.h);
        double tcenter =
            a.data == "beam" ? 0.5 * to_double(sc.torus.periods[band]) : a.band_center;
        NonconcReport nc = check_nonconcentration(q.u, f, q.h, band, tcenter);
        double slab = std::numeric_limits<double>::quiet_NaN();
        try {
            slab = check_slab_estimate(q.u, f, q.h, 1.0, band, tcenter).ratio;
        } catch (const std::exception&) {
        }
        csv += fmt_g17(rep.h) + "," + fmt_g17(rep.norm_u) + "," + fmt_g17(rep.norm_au) + "," +
               fmt_g17(rep.norm_f) + "," + fmt_g17(rep.epsilon) + "," +
               fmt_g17(rep.obs_ratio) + "," + fmt_g17(nc.constant) + "," +
               fmt_g17(nc.width) + "," + (nc.vacuous ? "1" : "0") + "," + fmt_g17(slab) + "\n";
        ordered_json r;
        r["h"] = rep.h;
        r["norm_u"] = rep.norm_u;
        r["norm_au"] = rep.norm_au;
        r["norm_f"] = rep.norm_f;
        r["epsilon"] = rep.epsilon;
        r["obs_ratio"] = rep.obs_ratio;
        r["nonconc_constant"] = nc.constant;
        r["nonconc_width"] = nc.width;
        r["nonconc_vacuous"] = nc.vacuous;
        r["nonconc_w_exceeds"] = nc.w_exceeds;
        r["slab_ratio"] = slab;
        rows.push_back(std::move(r));
        std::printf("%12.6g %12.6g %12.6g %12.6g %12.6g\n", rep.h, rep.norm_au, rep.norm_f,
                    rep.epsilon, rep.obs_ratio);
    }
    ordered_json doc;
    doc["schema"] = "1";
    doc["scene"] = sc.name;
    doc["data"] = a.data;
    doc["res"] = a.res;
    doc["rows"] = std::move(rows);
    std::string out = ensure_outdir(a.out);
    write_text_file(out + "/probe.csv", csv);
    write_text_file(out + "/probe.json", dump_g17(doc));
    return 0;
}

// ------------------------------------------------------------------ flow ---

struct FlowArgs {
    std::string z0, zeta0;
    double smax = 10.0, dt = 1e-3;
    int rows = 200;
    std::string out = ".";
    bool svg = false;
};

int run_flow(const FlowArgs& a) {
    SpherePoint p0;
    try {
        DVec z, zeta;
        for (const auto& tok : split(a.z0, ',')) z.push_back(std::stod(tok));
        for (const auto& tok : split(a.zeta0, ',')) zeta.push_back(std::stod(tok));
        double s = 0;
        for (double c : z) s += c * c;
        for (double c : zeta) s += c * c;
        if (s == 0) throw std::invalid_argument("initial point must be nonzero");
        if (a.smax <= 0 || a.dt <= 0 || a.rows < 1)
            throw std::invalid_argument("need smax > 0, dt > 0, rows >= 1");
        p0 = sphere_point(std::move(z), std::move(zeta));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }

    std::size_t d = p0.z.size();
    std::string csv = "s";
    for (std::size_t j = 0; j < d; ++j) csv += ",z_cf_" + std::to_string(j);
    for (std::size_t j = 0; j < d; ++j) csv += ",zeta_cf_" + std::to_string(j);
    for (std::size_t j = 0; j < d; ++j) csv += ",z_ode_" + std::to_string(j);
    for (std::size_t j = 0; j < d; ++j) csv += ",zeta_ode_" + std::to_string(j);
    csv += ",divergence\n";

    PlotSeries cf_theta{"closed form", {}, {}, "#1f6fb2"};
    PlotSeries ode_theta{"angle ODE", {}, {}, "#b2341f"};
    SpherePoint ode = p0;
    double worst = 0, s_prev = 0;
    for (int k = 0; k <= a.rows; ++k) {
        double s = a.smax * k / a.rows;
        if (k > 0) ode = flow_angle_ode(ode, s - s_prev, a.dt);
        s_prev = s;
        SpherePoint cf = flow_closed_form(p0, s);
        double div = 0;
        for (std::size_t j = 0; j < d; ++j) {
            div = std::max(div, std::abs(cf.z[j] - ode.z[j]));
            div = std::max(div, std::abs(cf.zeta[j] - ode.zeta[j]));
        }
        worst = std::max(worst, div);
        csv += fmt_g17(s);
        for (std::size_t j = 0; j < d; ++j) csv += "," + fmt_g17(cf.z[j]);
        for (std::size_t j = 0; j < d; ++j) csv += "," + fmt_g17(cf.zeta[j]);
        for (std::size_t j = 0; j < d; ++j) csv += "," + fmt_g17(ode.z[j]);
        for (std::size_t j = 0; j < d; ++j) csv += "," + fmt_g17(ode.zeta[j]);
        csv += "," + fmt_g17(div) + "\n";
        cf_theta.x.push_back(s);
        cf_theta.y.push_back(std::atan2(cf.z[0], cf.zeta[0]));
        ode_theta.x.push_back(s);
        ode_theta.y.push_back(std::atan2(ode.z[0], ode.zeta[0]));
    }
    std::string out = ensure_outdir(a.out);
    write_text_file(out + "/flow.csv", csv);
    if (a.svg)
        write_text_file(out + "/flow.svg", svg_line_plot("flow angle", "s", "theta_1",
                                                         {cf_theta, ode_theta}));
    std::printf("max closed-form vs ODE divergence over [0, %s]: %s\n",
                fmt_g17(a.smax).c_str(), fmt_g17(worst).c_str());
    return 0;
}

// ---------------------------------------------------------------- reduce ---

struct ReduceArgs {
    std::string periods = "1,1,1";
    std::string n;
    std::string out = ".";
};

ordered_json dmat_json(const DMat& m) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : m) {
        ordered_json r = ordered_json::array();
        for (double x : row) r.push_back(x);
        rows.push_back(std::move(r));
    }
    return rows;
}

int run_reduce(const ReduceArgs& a) {
    ReductionResult res;
    try {
        RatVec periods;
        for (const auto& tok : split(a.periods, ',')) periods.push_back(parse_rational_str(tok));
        IntVec n;
        for (const auto& tok : split(a.n, ',')) n.push_back(Int(tok));
        res = reduce_geodesic(periods, n);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::string msg = e.what();
        bool degenerate = msg.find("admissible (p, q)") != std::string::npos ||
                          msg.find("degenerate (p, q)") != std::string::npos;
        return degenerate ? kExitDegenerate : kExitConfig;
    }
    PeriodicityReport per = verify_periodicity(res, 100);

    ordered_json j;
    j["schema"] = "1";
    ordered_json periods = ordered_json::array();
    for (const auto& A : res.periods) periods.push_back(format_rational(A));
    j["periods"] = std::move(periods);
    ordered_json n = ordered_json::array();
    for (const auto& x : res.n) n.push_back(x.str());
    j["n"] = std::move(n);
    j["F"] = dmat_json(res.F);
    j["length"] = res.length;
    j["length_sq"] = format_rational(res.length_sq);
    ordered_json redp = ordered_json::array();
    for (double x : res.reduced_periods) redp.push_back(x);
    j["reduced_periods"] = std::move(redp);
    ordered_json steps = ordered_json::array();
    for (const auto& st : res.steps) {
        ordered_json s;
        s["stage"] = st.stage;
        s["S"] = st.S;
        s["S_sq"] = format_rational(st.S_sq);
        s["p"] = st.p;
        s["q"] = st.q;
        s["alpha"] = st.alpha;
        s["beta"] = st.beta;
        s["alpha_sq"] = format_rational(st.alpha_sq);
        s["beta_sq"] = format_rational(st.beta_sq);
        s["F"] = dmat_json(st.F);
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    ordered_json pj;
    pj["trials"] = per.trials;
    pj["max_discrepancy"] = per.max_discrepancy;
    j["periodicity"] = std::move(pj);
    write_text_file(ensure_outdir(a.out) + "/reduction.json", dump_g17(j));
    std::printf("reduced in %zu stage(s); axis period %s; periodicity discrepancy %s over %d "
                "trials\n",
                res.steps.size(), fmt_g17(res.length).c_str(),
                fmt_g17(per.max_discrepancy).c_str(), per.trials);
    return 0;
}

void add_scene_flags(CLI::App* cmd, std::string& scene, std::string& preset) {
    cmd->add_option("--scene", scene, "scene description file (JSON)");
    cmd->add_option("--preset", preset, "built-in scene name[:params]");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"torwave: damped waves on flat tori with polyhedral dampings"};
    app.set_help_flag("--help", "print this help message and exit");  // frees -h for --h
    app.require_subcommand(1);
    int rc = 0;

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "check geometric control conditions");
    add_scene_flags(verify, va.scene, va.preset);
    verify->add_option("--conditions", va.conditions,
                       "comma list: wgcc,sgcc,normal_damping,finexc");
    verify->add_option("--bound", va.bound, "winding enumeration bound");
    verify->add_option("--horizon", va.horizon, "control time (0 = auto)");
    verify->add_option("--out", va.out, "output directory");
    verify->callback([&] { rc = run_verify(va); });

    SimArgs sa;
    auto* simulate = app.add_subcommand("simulate", "run the damped wave and fit the decay");
    add_scene_flags(simulate, sa.scene, sa.preset);
    simulate->add_option("--res", sa.res, "grid points per axis (power of two)");
    simulate->add_option("--dt", sa.dt, "time step");
    simulate->add_option("-T,--horizon", sa.T, "final time");
    simulate->add_option("--m", sa.m, "potential constant");
    simulate->add_option("--data", sa.data, "random | beam | profile | modes:k1,k2[;...]");
    simulate->add_option("--h", sa.h, "semiclassical parameter for beam/profile data");
    simulate->add_option("--axis", sa.axis, "carrier axis");
    simulate->add_option("--band-axis", sa.band_axis, "profile band axis");
    simulate->add_option("--band-center", sa.band_center, "profile band center");
    simulate->add_option("--band-halfwidth", sa.band_halfwidth, "profile band halfwidth");
    simulate->add_option("--kmax", sa.kmax, "band limit for random data");
    simulate->add_option("--seed", sa.seed, "random seed");
    simulate->add_option("--out", sa.out, "output directory");
    simulate->add_flag("--svg", sa.svg, "emit a log-energy plot");
    simulate->callback([&] { rc = run_simulate(sa); });

    ProbeArgs pa;
    auto* probe = app.add_subcommand("probe", "quasimode estimate sweep over h");
    add_scene_flags(probe, pa.scene, pa.preset);
    probe->add_option("--res", pa.res, "grid points per axis (power of two)");
    probe->add_option("--h", pa.h, "comma list of h values (fractions allowed)");
    probe->add_option("--data", pa.data, "beam | profile");
    probe->add_option("--axis", pa.axis, "carrier axis");
    probe->add_option("--band-axis", pa.band_axis, "profile band axis");
    probe->add_option("--band-center", pa.band_center, "profile band center");
    probe->add_option("--band-halfwidth", pa.band_halfwidth, "profile band halfwidth");
    probe->add_option("--out", pa.out, "output directory");
    probe->callback([&] { rc = run_probe(pa); });

    FlowArgs fa;
    auto* flow = app.add_subcommand("flow", "sphere-at-infinity flow trajectories");
    flow->add_option("--z0", fa.z0, "comma list, initial z")->required();
    flow->add_option("--zeta0", fa.zeta0, "comma list, initial zeta")->required();
    flow->add_option("--s-max", fa.smax, "flow horizon");
    flow->add_option("--dt", fa.dt, "ODE step");
    flow->add_option("--rows", fa.rows, "output samples");
    flow->add_option("--out", fa.out, "output directory");
    flow->add_flag("--svg", fa.svg, "emit a theta_1(s) plot");
    flow->callback([&] { rc = run_flow(fa); });

    ReduceArgs ra;
    auto* reduce = app.add_subcommand("reduce", "straighten a rational geodesic");
    reduce->add_option("--periods", ra.periods, "comma list of rational periods");
    reduce->add_option("--n", ra.n, "comma list, integer winding vector")->required();
    reduce->add_option("--out", ra.out, "output directory");
    reduce->callback([&] { rc = run_reduce(ra); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    return rc;
}
