// Command implementations behind the CLI: deterministic CSV emission,
// JSON manifests, and manifest replay. All user-facing frequencies are Hz
// and durations are ms/ns; conversion to rad/s happens here only.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdante/aht.hpp"
#include "pdante/profile.hpp"
#include "pdante/sequence.hpp"
#include "pdante/version.hpp"

namespace pdante::cli {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------
// formatting

// 9 significant digits, '.' decimal separator, LF rows.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << body;
    if (!f) throw std::runtime_error("failed writing: " + path);
}

inline std::string basename_of(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

inline std::string redirect(const std::string& path, const std::string& out_dir) {
    return out_dir.empty() ? path : out_dir + "/" + basename_of(path);
}

inline std::string profile_csv(const Profile& p) {
    std::string s = "offset_hz,ix,minus_iy,iz,engine\n";
    for (std::size_t i = 0; i < p.offsets_hz.size(); ++i) {
        s += num(p.offsets_hz[i]);
        s += ',';
        s += num(p.bloch[i].x);
        s += ',';
        s += num(-p.bloch[i].y);
        s += ',';
        s += num(p.bloch[i].z);
        s += ',';
        s += engine_tag(p.engine);
        s += '\n';
    }
    return s;
}

inline std::vector<double> offset_grid(double from_hz, double to_hz, double step_hz) {
    if (to_hz < from_hz) throw std::invalid_argument("offset range: to < from");
    if (from_hz == to_hz) return {from_hz};
    if (!(step_hz > 0.0)) throw std::invalid_argument("offset range: step must be > 0");
    const auto count = static_cast<std::size_t>(std::floor((to_hz - from_hz) / step_hz + 1e-9)) + 1;
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = from_hz + static_cast<double>(i) * step_hz;
    return g;
}

inline void write_manifest(const std::string& path, const std::string& command, const json& params,
                           const std::vector<std::string>& outputs,
                           const std::vector<SequenceSpec>& specs) {
    json m;
    m["format"] = "pdante-manifest/v1";
    m["version"] = kVersion;
    m["command"] = command;
    m["params"] = params;
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back(basename_of(o));
    m["outputs"] = std::move(outs);
    json sp = json::array();
    for (const auto& s : specs) sp.push_back(to_canonical_json_obj(s));
    m["specs"] = std::move(sp);
    write_text(path, m.dump(2) + "\n");
}

// ---------------------------------------------------------------------
// profile

struct ProfileCmd {
    std::string seq = "dante";  // dante | pdante-random | pdante-cosine | pdante-udd
    int n = 30;
    double theta_frac = 60.0;   // theta = pi / theta_frac
    double tp_ns = 720.0;
    double tau_ms = 2.0;
    double delta_tau_ms = 0.0;
    double f = 1.0;
    double total_delay_ms = kFig4TotalDelay * 1e3;
    double scale_ms = 2.063;
    double nu0_hz = 0.0;
    std::uint64_t seed = 1;
    double from_hz = -580.0;
    double to_hz = 580.0;
    double step_hz = 10.0;
    std::string engine = "exact";
    std::string out = "profile.csv";
    std::string manifest;  // defaults to out + ".manifest.json"
};

inline SequenceSpec build_spec(const ProfileCmd& c) {
    const double theta = kPi / c.theta_frac;
    const double tp = c.tp_ns * 1e-9;
    if (c.seq == "dante") return dante(c.n, theta, tp, c.tau_ms * 1e-3);
    if (c.seq == "pdante-random")
        return pdante_random(c.n, theta, tp, c.total_delay_ms * 1e-3, c.nu0_hz, c.seed);
    if (c.seq == "pdante-cosine")
        return pdante_cosine(c.n, theta, tp, c.tau_ms * 1e-3, c.delta_tau_ms * 1e-3, c.f, c.nu0_hz);
    if (c.seq == "pdante-udd")
        return pdante_udd_like(c.n, theta, tp, c.scale_ms * 1e-3, c.nu0_hz);
    throw std::invalid_argument("unknown sequence type: " + c.seq);
}

inline json profile_params(const ProfileCmd& c) {
    json p;
    p["seq"] = c.seq;
    p["n"] = c.n;
    p["theta_frac"] = c.theta_frac;
    p["tp_ns"] = c.tp_ns;
    p["tau_ms"] = c.tau_ms;
    p["delta_tau_ms"] = c.delta_tau_ms;
    p["f"] = c.f;
    p["total_delay_ms"] = c.total_delay_ms;
    p["scale_ms"] = c.scale_ms;
    p["nu0_hz"] = c.nu0_hz;
    p["seed"] = c.seed;
    p["from_hz"] = c.from_hz;
    p["to_hz"] = c.to_hz;
    p["step_hz"] = c.step_hz;
    p["engine"] = c.engine;
    p["out"] = c.out;
    return p;
}

inline ProfileCmd profile_from_params(const json& p) {
    ProfileCmd c;
    c.seq = p.at("seq").get<std::string>();
    c.n = p.at("n").get<int>();
    c.theta_frac = p.at("theta_frac").get<double>();
    c.tp_ns = p.at("tp_ns").get<double>();
    c.tau_ms = p.at("tau_ms").get<double>();
    c.delta_tau_ms = p.at("delta_tau_ms").get<double>();
    c.f = p.at("f").get<double>();
    c.total_delay_ms = p.at("total_delay_ms").get<double>();
    c.scale_ms = p.at("scale_ms").get<double>();
    c.nu0_hz = p.at("nu0_hz").get<double>();
    c.seed = p.at("seed").get<std::uint64_t>();
    c.from_hz = p.at("from_hz").get<double>();
    c.to_hz = p.at("to_hz").get<double>();
    c.step_hz = p.at("step_hz").get<double>();
    c.engine = p.at("engine").get<std::string>();
    c.out = p.at("out").get<std::string>();
    return c;
}

inline void run_profile(const ProfileCmd& c, const std::string& out_dir = "") {
    const SequenceSpec spec = build_spec(c);
    const Profile prof = profile(spec, offset_grid(c.from_hz, c.to_hz, c.step_hz),
                                 engine_from_tag(c.engine));
    const std::string out = redirect(c.out, out_dir);
    write_text(out, profile_csv(prof));
    const std::string mpath = redirect(c.manifest.empty() ? c.out + ".manifest.json" : c.manifest, out_dir);
    write_manifest(mpath, "profile", profile_params(c), {out}, {spec});
}

// ---------------------------------------------------------------------
// ensemble

struct EnsembleCmd {
    std::string family = "random";  // random | cosine-prime
    int n = 30;
    double theta_frac = 60.0;
    double tp_ns = 720.0;
    double total_delay_ms = kFig4TotalDelay * 1e3;  // random family
    double mean_delay_ms = 1.6;                     // cosine-prime family
    double delta_ratio = 0.70710678118654752;       // cosine-prime: dtau/tau
    double nu0_hz = 0.0;
    int navg = 100;
    std::vector<int> checkpoints = {1, 25, 100};
    std::uint64_t seed = 1;
    double from_hz = -580.0;
    double to_hz = 580.0;
    double step_hz = 10.0;
    double window_hz = kDefaultExclusionWindowHz;
    std::string engine = "exact";
    std::string out_prefix = "ensemble";
};

inline std::vector<SequenceSpec> build_family(const EnsembleCmd& c) {
    if (c.navg < 1) throw std::invalid_argument("ensemble: navg must be >= 1");
    const double theta = kPi / c.theta_frac;
    const double tp = c.tp_ns * 1e-9;
    std::vector<SequenceSpec> specs;
    if (c.family == "random") {
        specs.reserve(static_cast<std::size_t>(c.navg));
        for (int p = 0; p < c.navg; ++p)
            specs.push_back(pdante_random(c.n, theta, tp, c.total_delay_ms * 1e-3, c.nu0_hz,
                                          c.seed + static_cast<std::uint64_t>(p)));
    } else if (c.family == "cosine-prime") {
        specs = cosine_family(c.n, theta, tp, c.mean_delay_ms * 1e-3, c.delta_ratio, c.navg, c.nu0_hz);
    } else {
        throw std::invalid_argument("unknown ensemble family: " + c.family);
    }
    return specs;
}

inline json ensemble_params(const EnsembleCmd& c) {
    json p;
    p["family"] = c.family;
    p["n"] = c.n;
    p["theta_frac"] = c.theta_frac;
    p["tp_ns"] = c.tp_ns;
    p["total_delay_ms"] = c.total_delay_ms;
    p["mean_delay_ms"] = c.mean_delay_ms;
    p["delta_ratio"] = c.delta_ratio;
    p["nu0_hz"] = c.nu0_hz;
    p["navg"] = c.navg;
    p["checkpoints"] = c.checkpoints;
    p["seed"] = c.seed;
    p["from_hz"] = c.from_hz;
    p["to_hz"] = c.to_hz;
    p["step_hz"] = c.step_hz;
    p["window_hz"] = c.window_hz;
    p["engine"] = c.engine;
    p["out_prefix"] = c.out_prefix;
    return p;
}

inline EnsembleCmd ensemble_from_params(const json& p) {
    EnsembleCmd c;
    c.family = p.at("family").get<std::string>();
    c.n = p.at("n").get<int>();
    c.theta_frac = p.at("theta_frac").get<double>();
    c.tp_ns = p.at("tp_ns").get<double>();
    c.total_delay_ms = p.at("total_delay_ms").get<double>();
    c.mean_delay_ms = p.at("mean_delay_ms").get<double>();
    c.delta_ratio = p.at("delta_ratio").get<double>();
    c.nu0_hz = p.at("nu0_hz").get<double>();
    c.navg = p.at("navg").get<int>();
    c.checkpoints = p.at("checkpoints").get<std::vector<int>>();
    c.seed = p.at("seed").get<std::uint64_t>();
    c.from_hz = p.at("from_hz").get<double>();
    c.to_hz = p.at("to_hz").get<double>();
    c.step_hz = p.at("step_hz").get<double>();
    c.window_hz = p.at("window_hz").get<double>();
    c.engine = p.at("engine").get<std::string>();
    c.out_prefix = p.at("out_prefix").get<std::string>();
    return c;
}

inline void run_ensemble(const EnsembleCmd& c, const std::string& out_dir = "") {
    const std::vector<SequenceSpec> specs = build_family(c);
    const std::vector<double> grid = offset_grid(c.from_hz, c.to_hz, c.step_hz);
    const Engine eng = engine_from_tag(c.engine);
    const std::vector<Profile> members = member_profiles(specs, grid, eng);

    std::vector<int> checkpoints;
    for (int k : c.checkpoints)
        if (k >= 1 && k <= c.navg) checkpoints.push_back(k);
    if (checkpoints.empty()) checkpoints.push_back(c.navg);

    std::vector<std::string> outputs;
    std::string stats = "n_avg,fluctuation_std,baseline_mean_excitation,baseline_mean_z\n";
    for (int k : checkpoints) {
        Profile avg = average_profiles(members, static_cast<std::size_t>(k));
        avg.engine = eng;
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_navg%03d.csv", k);
        const std::string path = redirect(c.out_prefix + suffix, out_dir);
        write_text(path, profile_csv(avg));
        outputs.push_back(path);

        double sum_absy = 0.0, sum_z = 0.0, sum_y = 0.0, sum_y2 = 0.0;
        std::size_t kept = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(grid[i]) <= c.window_hz) continue;
            ++kept;
            sum_absy += std::abs(avg.bloch[i].y);
            sum_z += avg.bloch[i].z;
            sum_y += -avg.bloch[i].y;
            sum_y2 += avg.bloch[i].y * avg.bloch[i].y;
        }
        if (kept == 0) throw std::invalid_argument("ensemble: window excludes every offset");
        const double inv = 1.0 / static_cast<double>(kept);
        const double mean_y = sum_y * inv;
        const double sd = std::sqrt(std::max(0.0, sum_y2 * inv - mean_y * mean_y));
        stats += std::to_string(k) + "," + num(sd) + "," + num(sum_absy * inv) + "," +
                 num(sum_z * inv) + "\n";
    }
    const std::string stats_path = redirect(c.out_prefix + "_stats.csv", out_dir);
    write_text(stats_path, stats);
    outputs.push_back(stats_path);
    write_manifest(redirect(c.out_prefix + ".manifest.json", out_dir), "ensemble",
                   ensemble_params(c), outputs, specs);
}

// ---------------------------------------------------------------------
// validity map

struct ValidityMapCmd {
    double theta_total_frac = 2.0;  // Theta = pi / frac (0.5 -> 2 pi)
    double tau_over_tp = 1000.0;
    int n_from = 30;
    int n_to = 300;
    int n_step = 2;
    double ratio_from = 0.0;
    double ratio_to = 2.0;
    double ratio_step = 0.01;
    int order = 2;
    int ridge_orders = 2;
    std::string out = "validity_map.csv";
};

inline json validity_params(const ValidityMapCmd& c) {
    json p;
    p["theta_total_frac"] = c.theta_total_frac;
    p["tau_over_tp"] = c.tau_over_tp;
    p["n_from"] = c.n_from;
    p["n_to"] = c.n_to;
    p["n_step"] = c.n_step;
    p["ratio_from"] = c.ratio_from;
    p["ratio_to"] = c.ratio_to;
    p["ratio_step"] = c.ratio_step;
    p["order"] = c.order;
    p["ridge_orders"] = c.ridge_orders;
    p["out"] = c.out;
    return p;
}

inline ValidityMapCmd validity_from_params(const json& p) {
    ValidityMapCmd c;
    c.theta_total_frac = p.at("theta_total_frac").get<double>();
    c.tau_over_tp = p.at("tau_over_tp").get<double>();
    c.n_from = p.at("n_from").get<int>();
    c.n_to = p.at("n_to").get<int>();
    c.n_step = p.at("n_step").get<int>();
    c.ratio_from = p.at("ratio_from").get<double>();
    c.ratio_to = p.at("ratio_to").get<double>();
    c.ratio_step = p.at("ratio_step").get<double>();
    c.order = p.at("order").get<int>();
    c.ridge_orders = p.at("ridge_orders").get<int>();
    c.out = p.at("out").get<std::string>();
    return c;
}

inline void run_validity_map(const ValidityMapCmd& c, const std::string& out_dir = "") {
    if (c.n_step < 1 || c.n_from < 2 || c.n_to < c.n_from)
        throw std::invalid_argument("validity-map: bad N range");
    const double theta_total = kPi / c.theta_total_frac;
    std::vector<int> ns;
    for (int n = c.n_from; n <= c.n_to; n += c.n_step) ns.push_back(n);
    std::vector<double> ratios = offset_grid(c.ratio_from, c.ratio_to, c.ratio_step);
    const ValidityMap map = validity_map(theta_total, c.tau_over_tp, ns, ratios, c.order);

    std::string csv = "n,offset_ratio,frobenius_distance\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
        for (std::size_t j = 0; j < ratios.size(); ++j)
            csv += std::to_string(ns[i]) + "," + num(ratios[j]) + "," + num(map.at(i, j)) + "\n";
    const std::string out = redirect(c.out, out_dir);
    write_text(out, csv);

    std::string ridge = "resonance_order,offset_ratio,n_center,n_lower,n_upper\n";
    for (int nr = 1; nr <= c.ridge_orders; ++nr)
        for (double r : ratios) {
            const RidgeLine l = dante_resonance_lines(theta_total, c.tau_over_tp, nr, r);
            ridge += std::to_string(nr) + "," + num(r) + "," + num(l.center) + "," +
                     num(l.lower) + "," + num(l.upper) + "\n";
        }
    const std::string ridge_path = redirect(c.out + ".ridges.csv", out_dir);
    write_text(ridge_path, ridge);
    write_manifest(redirect(c.out + ".manifest.json", out_dir), "validity-map", validity_params(c),
                   {out, ridge_path}, {});
}

// ---------------------------------------------------------------------
// resonances

struct ResonancesCmd {
    double tau_ms = 1.5996672532273127;  // 1/tau = 625.13 Hz
    double f = 0.70710678118654752;
    double delta_ratio = 0.70710678118654752;
    int m_max = 3;
    int n_max = 3;
    std::string out;  // empty: text table on stdout
};

inline json resonances_params(const ResonancesCmd& c) {
    json p;
    p["tau_ms"] = c.tau_ms;
    p["f"] = c.f;
    p["delta_ratio"] = c.delta_ratio;
    p["m_max"] = c.m_max;
    p["n_max"] = c.n_max;
    p["out"] = c.out;
    return p;
}

inline ResonancesCmd resonances_from_params(const json& p) {
    ResonancesCmd c;
    c.tau_ms = p.at("tau_ms").get<double>();
    c.f = p.at("f").get<double>();
    c.delta_ratio = p.at("delta_ratio").get<double>();
    c.m_max = p.at("m_max").get<int>();
    c.n_max = p.at("n_max").get<int>();
    c.out = p.at("out").get<std::string>();
    return c;
}

constexpr double kSuppressedScale = 0.06;

inline void run_resonances(const ResonancesCmd& c, const std::string& out_dir = "") {
    const auto preds = pdante_resonances(c.tau_ms * 1e-3, c.f, c.delta_ratio, c.m_max, c.n_max);
    if (c.out.empty()) {
        std::printf("%6s %6s %14s %14s %10s %s\n", "m", "n", "delta_nu_hz", "bessel_arg", "scale",
                    "suppressed");
        for (const auto& r : preds)
            std::printf("%6d %6d %14.4f %14.6f %10.6f %s\n", r.m, r.n, r.delta_nu_hz,
                        r.bessel_argument, r.scale, std::abs(r.scale) < kSuppressedScale ? "yes" : "no");
        return;
    }
    std::string csv = "m,n,delta_nu_hz,bessel_order,bessel_argument,scale,suppressed\n";
    for (const auto& r : preds)
        csv += std::to_string(r.m) + "," + std::to_string(r.n) + "," + num(r.delta_nu_hz) + "," +
               std::to_string(r.bessel_order) + "," + num(r.bessel_argument) + "," + num(r.scale) +
               "," + (std::abs(r.scale) < kSuppressedScale ? "1" : "0") + "\n";
    const std::string out = redirect(c.out, out_dir);
    write_text(out, csv);
    write_manifest(redirect(c.out + ".manifest.json", out_dir), "resonances", resonances_params(c),
                   {out}, {});
}

// ---------------------------------------------------------------------
// replay

// Re-runs the recorded command from its typed parameters (JSON doubles
// round-trip bit-exactly) and checks that regenerated sequences match the
// stored canonical forms. Outputs are byte-identical to the original run.
inline void run_replay(const std::string& manifest_path, const std::string& out_dir = "") {
    std::ifstream f(manifest_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open manifest: " + manifest_path);
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    json m = json::parse(f);
    const std::string command = m.at("command").get<std::string>();
    const json& params = m.at("params");

    std::vector<SequenceSpec> regenerated;
    if (command == "profile") {
        const ProfileCmd c = profile_from_params(params);
        regenerated.push_back(build_spec(c));
        run_profile(c, out_dir);
    } else if (command == "ensemble") {
        const EnsembleCmd c = ensemble_from_params(params);
        regenerated = build_family(c);
        run_ensemble(c, out_dir);
    } else if (command == "validity-map") {
        run_validity_map(validity_from_params(params), out_dir);
    } else if (command == "resonances") {
        run_resonances(resonances_from_params(params), out_dir);
    } else {
        throw std::invalid_argument("replay: unknown command: " + command);
    }

    const json& stored = m.at("specs");
    if (stored.size() != regenerated.size())
        throw numeric_error("replay: spec count mismatch against manifest");
    for (std::size_t i = 0; i < regenerated.size(); ++i) {
        if (to_canonical_json_obj(regenerated[i]) != stored[i])
            throw numeric_error("replay: regenerated sequence differs from manifest record");
    }
}

}  // namespace pdante::cli
