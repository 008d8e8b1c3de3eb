// pdante: selective-excitation simulator for DANTE and pseudorandom
// (p-DANTE) pulse trains on a spin-1/2.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "pdante/cli.hpp"
#include "pdante/version.hpp"

namespace {

// 0 success, 2 usage, 3 domain precondition, 4 internal numeric failure.
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNumeric = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-1/2 selective excitation: DANTE / p-DANTE pulse-train simulator"};
    app.set_version_flag("--version", pdante::kVersion);
    app.require_subcommand(1);

    pdante::cli::ProfileCmd pc;
    auto* prof = app.add_subcommand("profile", "Excitation / z-magnetization profile sweep");
    prof->add_option("--seq", pc.seq, "Sequence type")
        ->check(CLI::IsMember({"dante", "pdante-random", "pdante-cosine", "pdante-udd"}));
    prof->add_option("--n", pc.n, "Number of pulses");
    prof->add_option("--theta-frac", pc.theta_frac, "Per-pulse flip as pi/<frac>");
    prof->add_option("--tp-ns", pc.tp_ns, "Pulse length in ns");
    prof->add_option("--tau-ms", pc.tau_ms, "Base delay in ms (dante, pdante-cosine)");
    prof->add_option("--delta-tau-ms", pc.delta_tau_ms, "Delay modulation depth in ms (pdante-cosine)");
    prof->add_option("--f", pc.f, "Cosine modulation parameter f (pdante-cosine)");
    prof->add_option("--total-delay-ms", pc.total_delay_ms, "Total delay in ms (pdante-random)");
    prof->add_option("--scale-ms", pc.scale_ms, "Delay scale in ms (pdante-udd)");
    prof->add_option("--nu0-hz", pc.nu0_hz, "Target frequency in Hz");
    prof->add_option("--seed", pc.seed, "Seed (pdante-random)");
    prof->add_option("--from-hz", pc.from_hz, "Sweep start in Hz");
    prof->add_option("--to-hz", pc.to_hz, "Sweep end in Hz");
    prof->add_option("--step-hz", pc.step_hz, "Sweep step in Hz");
    prof->add_option("--engine", pc.engine, "Propagator engine")
        ->check(CLI::IsMember({"exact", "aht1", "aht2"}));
    prof->add_option("--out", pc.out, "Output CSV path");
    prof->add_option("--manifest", pc.manifest, "Manifest path (default <out>.manifest.json)");

    pdante::cli::EnsembleCmd ec;
    auto* ens = app.add_subcommand("ensemble", "Averaged profiles over a family of realizations");
    ens->add_option("--family", ec.family, "Family")->check(CLI::IsMember({"random", "cosine-prime"}));
    ens->add_option("--n", ec.n, "Number of pulses");
    ens->add_option("--theta-frac", ec.theta_frac, "Per-pulse flip as pi/<frac>");
    ens->add_option("--tp-ns", ec.tp_ns, "Pulse length in ns");
    ens->add_option("--total-delay-ms", ec.total_delay_ms, "Total delay in ms (random family)");
    ens->add_option("--mean-delay-ms", ec.mean_delay_ms, "Mean delay in ms (cosine-prime family)");
    ens->add_option("--delta-ratio", ec.delta_ratio, "Modulation depth dtau/tau (cosine-prime)");
    ens->add_option("--nu0-hz", ec.nu0_hz, "Target frequency in Hz");
    ens->add_option("--navg", ec.navg, "Number of realizations");
    ens->add_option("--checkpoints", ec.checkpoints, "Averaging checkpoints");
    ens->add_option("--seed", ec.seed, "Base seed (random family)");
    ens->add_option("--from-hz", ec.from_hz, "Sweep start in Hz");
    ens->add_option("--to-hz", ec.to_hz, "Sweep end in Hz");
    ens->add_option("--step-hz", ec.step_hz, "Sweep step in Hz");
    ens->add_option("--window-hz", ec.window_hz, "Baseline exclusion window in Hz");
    ens->add_option("--engine", ec.engine, "Propagator engine")
        ->check(CLI::IsMember({"exact", "aht1", "aht2"}));
    ens->add_option("--out-prefix", ec.out_prefix, "Output file prefix");

    pdante::cli::ValidityMapCmd vc;
    auto* val = app.add_subcommand("validity-map", "||U_exact - U_AHT|| over (N, offset ratio)");
    val->add_option("--theta-total-frac", vc.theta_total_frac, "Total flip as pi/<frac>");
    val->add_option("--tau-over-tp", vc.tau_over_tp, "Delay-to-pulse-length ratio");
    val->add_option("--n-from", vc.n_from, "N range start");
    val->add_option("--n-to", vc.n_to, "N range end");
    val->add_option("--n-step", vc.n_step, "N range step");
    val->add_option("--ratio-from", vc.ratio_from, "Offset ratio start");
    val->add_option("--ratio-to", vc.ratio_to, "Offset ratio end");
    val->add_option("--ratio-step", vc.ratio_step, "Offset ratio step");
    val->add_option("--order", vc.order, "AHT order (1 or 2)");
    val->add_option("--ridge-orders", vc.ridge_orders, "Predicted ridge lines up to this order");
    val->add_option("--out", vc.out, "Output CSV path");

    pdante::cli::ResonancesCmd rc;
    auto* res = app.add_subcommand("resonances", "Cosine-modulated p-DANTE resonance comb");
    res->add_option("--tau-ms", rc.tau_ms, "Base delay in ms");
    res->add_option("--f", rc.f, "Cosine modulation parameter f");
    res->add_option("--delta-ratio", rc.delta_ratio, "Modulation depth dtau/tau");
    res->add_option("--m-max", rc.m_max, "m range");
    res->add_option("--n-max", rc.n_max, "n range");
    res->add_option("--out", rc.out, "Output CSV path (omit for a text table)");

    std::string replay_manifest;
    std::string replay_out_dir;
    auto* rep = app.add_subcommand("replay", "Re-run a recorded manifest byte-identically");
    rep->add_option("--manifest", replay_manifest, "Manifest to replay")->required();
    rep->add_option("--out-dir", replay_out_dir, "Redirect outputs into this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (prof->parsed()) pdante::cli::run_profile(pc);
        if (ens->parsed()) pdante::cli::run_ensemble(ec);
        if (val->parsed()) pdante::cli::run_validity_map(vc);
        if (res->parsed()) pdante::cli::run_resonances(rc);
        if (rep->parsed()) pdante::cli::run_replay(replay_manifest, replay_out_dir);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    } catch (const pdante::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
