// Exact sequence simulation and the derived products: excitation /
// z-magnetization profile sweeps, ensemble averaging with fluctuation
// statistics, AHT validity maps, and AHT-vs-exact error profiles.
#pragma once

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pdante/aht.hpp"
#include "pdante/pulse.hpp"
#include "pdante/sequence.hpp"
#include "pdante/su2.hpp"

namespace pdante {

enum class Engine { exact, aht1, aht2 };

inline const char* engine_tag(Engine e) {
    switch (e) {
        case Engine::exact: return "exact";
        case Engine::aht1: return "aht-1";
        default: return "aht-2";
    }
}

inline Engine engine_from_tag(const std::string& tag) {
    if (tag == "exact") return Engine::exact;
    if (tag == "aht1" || tag == "aht-1") return Engine::aht1;
    if (tag == "aht2" || tag == "aht-2") return Engine::aht2;
    throw std::invalid_argument("unknown engine: " + tag);
}

struct Profile {
    std::vector<double> offsets_hz;   // sorted as given
    std::vector<BlochVector> bloch;   // (<I_X>, <I_Y>, <I_Z>) per offset
    Engine engine = Engine::exact;
    std::string provenance;

    double minus_iy(std::size_t i) const { return -bloch[i].y; }
};

struct EnsembleResult {
    Profile averaged;
    int n_avg = 0;
    double baseline_mean_excitation = 0.0;  // window mean of |averaged <I_Y>|
    double baseline_mean_z = 0.0;           // window mean of averaged <I_Z>
    double fluctuation_std = 0.0;           // window std of averaged -<I_Y>
    double window_hz = kDefaultExclusionWindowHz;
};

struct ValidityMap {
    std::vector<int> n_values;
    std::vector<double> offset_ratios;
    std::vector<double> cells;  // row-major: [i_n * ratios + i_ratio]
    double theta_total = 0.0;
    double tau_over_tp = 0.0;
    int order = 2;

    double at(std::size_t i_n, std::size_t i_ratio) const {
        return cells[i_n * offset_ratios.size() + i_ratio];
    }
};

namespace detail {

// Deterministic parallel map: results land by index, so output is
// independent of the thread count (PDANTE_THREADS; default serial).
inline int thread_count() {
    if (const char* env = std::getenv("PDANTE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 1) return n;
    }
    return 1;
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int threads = thread_count();
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([=, &fn] {
            for (std::size_t i = static_cast<std::size_t>(t); i < count;
                 i += static_cast<std::size_t>(threads))
                fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Ordered product P(t_p) U_free(tau_{N-1}) ... U_free(tau_1) P(t_p); the
// first pulse acts first (rightmost factor).
inline Unitary2 exact_sequence_propagator(const SequenceSpec& s, double omega_z) {
    if (s.n_pulses < 1) throw std::invalid_argument("exact_sequence_propagator: empty spec");
    const double omega_rf = s.omega_rf();
    Mat2 u = exact_pulse(PulseParams{omega_rf, s.phases[0], s.t_p, omega_z}).m;
    for (int k = 1; k < s.n_pulses; ++k) {
        const double ang = 0.5 * omega_z * s.delays[static_cast<std::size_t>(k) - 1];
        const cplx fm = std::polar(1.0, -ang), fp = std::polar(1.0, ang);
        u.e00 *= fm; u.e01 *= fm;
        u.e10 *= fp; u.e11 *= fp;
        u = exact_pulse(PulseParams{omega_rf, s.phases[static_cast<std::size_t>(k)], s.t_p, omega_z}).m * u;
    }
    return Unitary2{u};
}

inline Unitary2 sequence_propagator(const SequenceSpec& s, double omega_z, Engine e) {
    switch (e) {
        case Engine::exact: return exact_sequence_propagator(s, omega_z);
        case Engine::aht1: return aht_propagator(s, omega_z, 1);
        default: return aht_propagator(s, omega_z, 2);
    }
}

// Evolve equilibrium (0,0,1) at w_Z = 2 pi (nu0 + dnu) for each offset.
inline Profile profile(const SequenceSpec& s, const std::vector<double>& offsets_hz, Engine e) {
    Profile out;
    out.offsets_hz = offsets_hz;
    out.bloch.resize(offsets_hz.size());
    out.engine = e;
    out.provenance = s.generator;
    detail::parallel_for(offsets_hz.size(), [&](std::size_t i) {
        const double wz = kTwoPi * (s.nu0_hz + offsets_hz[i]);
        const Unitary2 u = sequence_propagator(s, wz, e);
        out.bloch[i] = bloch_evolve_unchecked(u.m, BlochVector{0.0, 0.0, 1.0});
    });
    return out;
}

inline std::vector<Profile> member_profiles(const std::vector<SequenceSpec>& specs,
                                            const std::vector<double>& offsets_hz, Engine e) {
    std::vector<Profile> out(specs.size());
    detail::parallel_for(specs.size(), [&](std::size_t i) { out[i] = profile(specs[i], offsets_hz, e); });
    return out;
}

inline Profile average_profiles(const std::vector<Profile>& members, std::size_t count) {
    if (count == 0 || count > members.size())
        throw std::invalid_argument("average_profiles: bad prefix length");
    Profile avg = members[0];
    for (std::size_t i = 0; i < avg.bloch.size(); ++i) {
        BlochVector acc{0.0, 0.0, 0.0};
        for (std::size_t p = 0; p < count; ++p) {
            acc.x += members[p].bloch[i].x;
            acc.y += members[p].bloch[i].y;
            acc.z += members[p].bloch[i].z;
        }
        const double inv = 1.0 / static_cast<double>(count);
        avg.bloch[i] = {acc.x * inv, acc.y * inv, acc.z * inv};
    }
    return avg;
}

// Pointwise mean over all members plus baseline / fluctuation statistics
// on the |dnu| > window offsets.
inline EnsembleResult ensemble_average(const std::vector<SequenceSpec>& specs,
                                       const std::vector<double>& offsets_hz, Engine e,
                                       double window_hz = kDefaultExclusionWindowHz) {
    if (specs.empty()) throw std::invalid_argument("ensemble_average: no members");
    for (const auto& s : specs) {
        if (s.n_pulses != specs[0].n_pulses || s.theta != specs[0].theta ||
            s.t_p != specs[0].t_p || s.nu0_hz != specs[0].nu0_hz)
            throw std::invalid_argument("ensemble_average: members must share N, theta, t_p, nu0");
    }
    const std::vector<Profile> members = member_profiles(specs, offsets_hz, e);
    EnsembleResult r;
    r.n_avg = static_cast<int>(specs.size());
    r.window_hz = window_hz;
    r.averaged = average_profiles(members, members.size());

    double sum_absy = 0.0, sum_z = 0.0, sum_y = 0.0, sum_y2 = 0.0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < offsets_hz.size(); ++i) {
        if (std::abs(offsets_hz[i]) <= window_hz) continue;
        ++kept;
        const BlochVector& v = r.averaged.bloch[i];
        sum_absy += std::abs(v.y);
        sum_z += v.z;
        sum_y += -v.y;
        sum_y2 += v.y * v.y;
    }
    if (kept == 0) throw std::invalid_argument("ensemble_average: window excludes every offset");
    const double inv = 1.0 / static_cast<double>(kept);
    r.baseline_mean_excitation = sum_absy * inv;
    r.baseline_mean_z = sum_z * inv;
    const double mean_y = sum_y * inv;
    r.fluctuation_std = std::sqrt(std::max(0.0, sum_y2 * inv - mean_y * mean_y));
    return r;
}

// Window std of the prefix-averaged -<I_Y> for each requested prefix.
inline std::vector<double> fluctuation_stats(const std::vector<Profile>& members,
                                             double exclusion_window_hz,
                                             const std::vector<int>& prefixes) {
    if (members.size() < 2) throw std::invalid_argument("fluctuation_stats: need at least two profiles");
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < members[0].offsets_hz.size(); ++i)
        if (std::abs(members[0].offsets_hz[i]) > exclusion_window_hz) window.push_back(i);
    if (window.empty()) throw std::invalid_argument("fluctuation_stats: window excludes every offset");
    std::vector<double> out;
    out.reserve(prefixes.size());
    for (int n : prefixes) {
        if (n < 1 || static_cast<std::size_t>(n) > members.size())
            throw std::invalid_argument("fluctuation_stats: prefix out of range");
        const Profile avg = average_profiles(members, static_cast<std::size_t>(n));
        double s = 0.0, s2 = 0.0;
        for (std::size_t i : window) {
            const double v = -avg.bloch[i].y;
            s += v;
            s2 += v * v;
        }
        const double inv = 1.0 / static_cast<double>(window.size());
        const double mean = s * inv;
        out.push_back(std::sqrt(std::max(0.0, s2 * inv - mean * mean)));
    }
    return out;
}

// ||U_exact - U_AHT|| over the (N, w_Z/w_RF) grid for a uniform train with
// theta = Theta/N and tau/t_p fixed.
inline ValidityMap validity_map(double theta_total, double tau_over_tp,
                                const std::vector<int>& n_values,
                                const std::vector<double>& offset_ratios, int order) {
    detail::check_order(order);
    if (!(theta_total > 0.0) || tau_over_tp < 0.0)
        throw std::invalid_argument("validity_map: bad parameters");
    for (int n : n_values) {
        if (n < 2) throw std::invalid_argument("validity_map: need N >= 2");
        if (theta_total / n >= kMaxSmallFlip)
            throw std::invalid_argument("validity_map: per-pulse flip outside small-flip regime");
    }
    ValidityMap map;
    map.n_values = n_values;
    map.offset_ratios = offset_ratios;
    map.theta_total = theta_total;
    map.tau_over_tp = tau_over_tp;
    map.order = order;
    map.cells.assign(n_values.size() * offset_ratios.size(), 0.0);

    const double t_p = 1.0;  // distances depend only on the dimensionless products
    detail::parallel_for(n_values.size(), [&](std::size_t i_n) {
        const int n = n_values[i_n];
        const double theta = theta_total / n;
        const double omega_rf = theta / t_p;
        const double tau = tau_over_tp * t_p;
        const double taut = tau + t_p;
        const double t_tot = (n - 1) * taut + t_p;
        for (std::size_t i_r = 0; i_r < offset_ratios.size(); ++i_r) {
            const double wz = offset_ratios[i_r] * omega_rf;
            // exact: (P F)^{N-1} P with F diagonal
            const Mat2 p = exact_pulse(PulseParams{omega_rf, 0.0, t_p, wz}).m;
            Mat2 u = p;
            const cplx fm = std::polar(1.0, -0.5 * wz * tau), fp = std::polar(1.0, 0.5 * wz * tau);
            for (int k = 1; k < n; ++k) {
                u.e00 *= fm; u.e01 *= fm;
                u.e10 *= fp; u.e11 *= fp;
                u = p * u;
            }
            const AhtResult h = dante_avg_hamiltonian(n, theta, t_p, tau, wz, order);
            const Mat2 ua = free_propagator(wz, t_tot).m * expm_hermitian(h.h_avg.m, n * t_p);
            map.cells[i_n * offset_ratios.size() + i_r] = frobenius_distance(u, ua);
        }
    });
    return map;
}

struct ErrorProfile {
    int n_avg = 0;
    std::vector<double> offsets_hz;
    std::vector<double> d_excitation;  // |exact - AHT| of averaged -<I_Y>
    std::vector<double> d_z;           // |exact - AHT| of averaged <I_Z>
};

// Pointwise |averaged exact - averaged AHT| for each N_avg checkpoint.
inline std::vector<ErrorProfile> aht_error_profile(const std::vector<SequenceSpec>& specs,
                                                   const std::vector<double>& offsets_hz, int order,
                                                   const std::vector<int>& checkpoints = {1, 25, 100}) {
    detail::check_order(order);
    if (specs.empty()) throw std::invalid_argument("aht_error_profile: no members");
    for (const auto& s : specs)
        if (s.n_pulses != specs[0].n_pulses || s.theta != specs[0].theta || s.t_p != specs[0].t_p ||
            s.nu0_hz != specs[0].nu0_hz)
            throw std::invalid_argument("aht_error_profile: members must share N, theta, t_p, nu0");
    const std::vector<Profile> exact = member_profiles(specs, offsets_hz, Engine::exact);
    const std::vector<Profile> aht =
        member_profiles(specs, offsets_hz, order == 1 ? Engine::aht1 : Engine::aht2);
    std::vector<ErrorProfile> out;
    for (int n : checkpoints) {
        if (n < 1 || static_cast<std::size_t>(n) > specs.size())
            throw std::invalid_argument("aht_error_profile: checkpoint out of range");
        const Profile ae = average_profiles(exact, static_cast<std::size_t>(n));
        const Profile aa = average_profiles(aht, static_cast<std::size_t>(n));
        ErrorProfile ep;
        ep.n_avg = n;
        ep.offsets_hz = offsets_hz;
        ep.d_excitation.resize(offsets_hz.size());
        ep.d_z.resize(offsets_hz.size());
        for (std::size_t i = 0; i < offsets_hz.size(); ++i) {
            ep.d_excitation[i] = std::abs(-ae.bloch[i].y - (-aa.bloch[i].y));
            ep.d_z[i] = std::abs(ae.bloch[i].z - aa.bloch[i].z);
        }
        out.push_back(std::move(ep));
    }
    return out;
}

}  // namespace pdante
