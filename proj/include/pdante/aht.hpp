// Sequence-level average Hamiltonians: the closed sinc-ratio forms for the
// uniform (DANTE) train, direct toggling-frame sums for arbitrary pulse
// times, the Bessel-series form for cosine-modulated delays, the AHT
// propagator, and resonance predictors.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pdante/bessel.hpp"
#include "pdante/pulse.hpp"
#include "pdante/sequence.hpp"
#include "pdante/su2.hpp"

namespace pdante {

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AhtResult {
    Hermitian2 h_avg{Mat2{}};       // rad/s
    int order = 1;
    double duration = 0.0;          // N t_p, s
    double transverse_amplitude = 0.0;  // sqrt(hx^2 + hy^2), rad/s
    double z_amplitude = 0.0;           // coefficient of I_Z, rad/s
};

namespace detail {

struct Reduced {
    double delta;     // x - 2 pi m
    long long m;
};

inline Reduced reduce_two_pi(double x) {
    const double m = std::nearbyint(x / kTwoPi);
    return {x - kTwoPi * m, static_cast<long long>(m)};
}

inline double parity_sign(long long a, long long b) {
    return ((a & 1LL) && (b & 1LL)) ? -1.0 : 1.0;
}

// sinc(N x / 2) / sinc(x / 2) = sin(N x / 2) / (N sin(x / 2)), with the
// removable singularities at x = 2 pi m evaluated by limit: value
// (-1)^{m(N-1)} there.
inline double sinc_ratio(int n, double x) {
    if (n == 1) return 1.0;
    const auto [delta, m] = reduce_two_pi(x);
    const double sign = parity_sign(m, n - 1);
    if (delta == 0.0) return sign;
    return sign * std::sin(0.5 * n * delta) / (n * std::sin(0.5 * delta));
}

// zeta(N, x) = [N sin x - sin(N x)] / (4 sin^2(x/2)); the pair sum
// sum_{d=1}^{N-1} (N-d) sin(d x) in closed form. Series branch keeps the
// cancellation-prone numerator accurate through the x -> 2 pi m limits.
inline double pair_sum_z(int n, double x) {
    const auto [delta, m] = reduce_two_pi(x);
    (void)m;  // sin(2 pi m k + u) = sin(u) for integer multiples
    if (delta == 0.0) return 0.0;
    const double nd = n * delta;
    double num;
    if (std::abs(nd) < 0.1) {
        // N sin(d) - sin(N d) = sum_j (-1)^{j+1} N (N^{2j}-1) d^{2j+1}/(2j+1)!
        num = 0.0;
        double dpow = delta * delta * delta;
        double n2j = static_cast<double>(n) * n;
        double fact = 6.0;  // 3!
        double sgn = 1.0;
        for (int j = 1; j <= 6; ++j) {
            num += sgn * n * (n2j - 1.0) * dpow / fact;
            dpow *= delta * delta;
            n2j *= static_cast<double>(n) * n;
            fact *= (2.0 * j + 2.0) * (2.0 * j + 3.0);
            sgn = -sgn;
        }
    } else {
        num = n * std::sin(delta) - std::sin(nd);
    }
    const double s = std::sin(0.5 * delta);
    return num / (4.0 * s * s);
}

// g(N, x) = 4 sum_{s>0} s sin(s x) over s = j - (N-1)/2, j = 0..N-1;
// equals -[(N-1) sin((N+1)x/2) - (N+1) sin((N-1)x/2)] / (2 sin^2(x/2)).
inline double pair_sum_t(int n, double x) {
    const auto [delta, m] = reduce_two_pi(x);
    const double sign = parity_sign(m, n + 1);
    if (delta == 0.0) return 0.0;
    const double u = 0.5 * delta;
    const double nd = n * delta;
    double num;
    if (std::abs(nd) < 0.1) {
        // (N-1) sin((N+1)u) - (N+1) sin((N-1)u)
        //   = sum_{j>=1} (-1)^j u^{2j+1} (N^2-1)[(N+1)^{2j} - (N-1)^{2j}]/(2j+1)!
        num = 0.0;
        double upow = u * u * u;
        double p2j = static_cast<double>(n + 1) * (n + 1);
        double q2j = static_cast<double>(n - 1) * (n - 1);
        double fact = 6.0;
        double sgn = -1.0;
        const double n2m1 = static_cast<double>(n) * n - 1.0;
        for (int j = 1; j <= 6; ++j) {
            num += sgn * upow * n2m1 * (p2j - q2j) / fact;
            upow *= u * u;
            p2j *= static_cast<double>(n + 1) * (n + 1);
            q2j *= static_cast<double>(n - 1) * (n - 1);
            fact *= (2.0 * j + 2.0) * (2.0 * j + 3.0);
            sgn = -sgn;
        }
    } else {
        num = (n - 1.0) * std::sin((n + 1.0) * u) - (n + 1.0) * std::sin((n - 1.0) * u);
    }
    const double s = std::sin(u);
    return -sign * num / (2.0 * s * s);
}

inline void check_order(int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("aht: order must be 1 or 2");
}

inline AhtResult finish(Mat2 h, int order, double duration) {
    AhtResult r;
    r.h_avg = Hermitian2{h};
    r.order = order;
    r.duration = duration;
    r.transverse_amplitude = 2.0 * std::abs(h.e01);
    r.z_amplitude = coeff_z(h);
    return r;
}

}  // namespace detail

// Uniform train: N pulses of flip theta = w_rf t_p, constant delay tau.
// H1 = a R(N, w_z taut) I_T + b I_Z with R the sinc ratio; H2 carries the
// pair-commutator I_Z and I_T corrections. Exactly zero second order at
// w_z taut = 2 pi n.
inline AhtResult dante_avg_hamiltonian(int n, double theta, double t_p, double tau,
                                       double omega_z, int order) {
    if (n < 1) throw std::invalid_argument("dante_avg_hamiltonian: need at least one pulse");
    if (!(t_p > 0.0) || tau < 0.0) throw std::invalid_argument("dante_avg_hamiltonian: bad timing");
    if (!(theta > 0.0) || theta >= kMaxSmallFlip)
        throw std::invalid_argument("dante_avg_hamiltonian: theta outside small-flip regime");
    detail::check_order(order);

    const double omega_rf = theta / t_p;
    const PulseParams p{omega_rf, 0.0, t_p, omega_z};
    const double a = aht_a(p);
    const double b = aht_b(p);
    const double taut = tau + t_p;
    const double x = omega_z * taut;
    const double t_tot = (n - 1) * taut + t_p;
    const double psi = 0.5 * omega_z * t_tot;  // I_T axis phase

    double c_trans = a * detail::sinc_ratio(n, x);
    double c_z = b;
    if (order == 2) {
        c_z += a * a * t_p / (2.0 * n) * detail::pair_sum_z(n, x);
        c_trans += -(a * b * t_p / (2.0 * n)) * detail::pair_sum_t(n, x);
    }
    const Mat2 h = hermitian_from_coeffs(c_trans * std::cos(psi), -c_trans * std::sin(psi), c_z);
    return detail::finish(h, order, n * t_p);
}

// Toggling-frame sums for arbitrary pulse start times and stored pulse
// phases: phase of pulse k+1 in frame = w_z T_k + w_z t_p/2 - phi_{k+1}.
// Order 2 is the direct pair sum.
inline AhtResult avg_hamiltonian_from_phases(const std::vector<double>& times,
                                             const std::vector<double>& phases, double omega_rf,
                                             double t_p, double omega_z, int order) {
    detail::check_order(order);
    const int n = static_cast<int>(times.size());
    if (n < 1 || phases.size() != times.size())
        throw std::invalid_argument("avg_hamiltonian_from_phases: inconsistent inputs");
    for (int k = 1; k < n; ++k)
        if (!(times[static_cast<std::size_t>(k)] > times[static_cast<std::size_t>(k) - 1]))
            throw std::invalid_argument("avg_hamiltonian_from_phases: times must be increasing");

    const PulseParams p{omega_rf, 0.0, t_p, omega_z};
    const double a = aht_a(p);
    const double b = aht_b(p);

    std::vector<cplx> half(static_cast<std::size_t>(n));  // e^{i phase_k / 2}
    cplx s1{};
    for (int k = 0; k < n; ++k) {
        const double ph = omega_z * times[static_cast<std::size_t>(k)] + 0.5 * omega_z * t_p -
                          phases[static_cast<std::size_t>(k)];
        half[static_cast<std::size_t>(k)] = std::polar(1.0, 0.5 * ph);
        s1 += std::polar(1.0, ph);
    }
    s1 /= static_cast<double>(n);

    cplx h01 = 0.5 * a * s1;
    double c_z = b;
    if (order == 2) {
        double zt = 0.0;
        cplx tt{};
        for (int k = 1; k < n; ++k) {
            const cplx hk = half[static_cast<std::size_t>(k)];
            const cplx ek = hk * hk;
            for (int j = 0; j < k; ++j) {
                const cplx hj = half[static_cast<std::size_t>(j)];
                zt += (ek * std::conj(hj * hj)).imag();           // sin(ph_k - ph_j)
                tt += (hj * std::conj(hk)).imag() * (hj * hk);    // sin((ph_j-ph_k)/2) e^{i(ph_j+ph_k)/2}
            }
        }
        c_z += a * a * t_p / (2.0 * n) * zt;
        h01 += a * b * t_p / (2.0 * n) * tt;
    }
    Mat2 h{cplx(0.5 * c_z, 0.0), h01, std::conj(h01), cplx(-0.5 * c_z, 0.0)};
    return detail::finish(h, order, n * t_p);
}

// Eq.-(11)/(12)-style sums with dw = 2 pi (nu_Z - nu0); equivalent to
// phases phi_{k+1} = +2 pi nu0 T_k. Generated specs carry the mirrored
// sign; use aht_propagator for those (identical at nu0 = 0).
inline AhtResult pdante_avg_hamiltonian(const std::vector<double>& times, double theta, double t_p,
                                        double omega_z, double nu0_hz, int order) {
    if (!(t_p > 0.0)) throw std::invalid_argument("pdante_avg_hamiltonian: t_p must be > 0");
    std::vector<double> phases(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) phases[k] = kTwoPi * nu0_hz * times[k];
    return avg_hamiltonian_from_phases(times, phases, theta / t_p, t_p, omega_z, order);
}

struct BesselAht {
    AhtResult result;
    bool converged = false;
    double tail_magnitude = 0.0;  // I_T coefficient of the last retained terms, rad/s
    int n_max = 0;
};

// First-order average Hamiltonian of the cosine-modulated train from the
// Jacobi-Anger expansion: a/2 sum_n J_n(beta) R(N, dw tau + 2 n pi/f)
// e^{i chi_n}, beta = dw dtau csc(pi/f)/2. Delay-only times (t_p enters
// only the per-pulse sinc and the chi_n offset), matching the closed form
// it is derived from.
inline BesselAht pdante_bessel_first_order(double tau, double delta_tau, double f, int n,
                                           double theta, double t_p, double omega_z, double nu0_hz,
                                           int n_max) {
    if (n_max < 1) throw std::invalid_argument("pdante_bessel_first_order: n_max must be >= 1");
    if (delta_tau < 0.0 || tau < delta_tau)
        throw std::invalid_argument("pdante_bessel_first_order: need tau >= delta_tau >= 0");
    if (f == 0.0) throw std::invalid_argument("pdante_bessel_first_order: f must be nonzero");
    if (n < 1 || !(t_p > 0.0)) throw std::invalid_argument("pdante_bessel_first_order: bad train");
    const double sf = std::sin(kPi / f);
    if (std::abs(sf) < 1e-12)
        throw std::invalid_argument("pdante_bessel_first_order: 1/f integer, modulation degenerate");

    const double omega_rf = theta / t_p;
    const PulseParams p{omega_rf, 0.0, t_p, omega_z};
    const double a = aht_a(p);
    const double b = aht_b(p);
    const double dw = omega_z - kTwoPi * nu0_hz;
    const double beta = 0.5 * dw * delta_tau / sf;

    const std::vector<double> jt = bessel_jn_table(n_max, beta);
    cplx acc{};
    double tail = 0.0;
    for (int k = -n_max; k <= n_max; ++k) {
        double jk = jt[static_cast<std::size_t>(std::abs(k))];
        if (k < 0 && (std::abs(k) % 2)) jk = -jk;
        const double arg = dw * tau + 2.0 * k * kPi / f;
        const double ratio = detail::sinc_ratio(n, arg);
        const double chi = 0.5 * dw * ((n - 1) * tau - delta_tau) + n * k * kPi / f +
                           0.5 * omega_z * t_p;
        acc += jk * ratio * std::polar(1.0, chi);
        if (std::abs(k) == n_max) tail = std::max(tail, std::abs(a * jk * ratio));
    }
    BesselAht out;
    const cplx h01 = 0.5 * a * acc;
    Mat2 h{cplx(0.5 * b, 0.0), h01, std::conj(h01), cplx(-0.5 * b, 0.0)};
    out.result = detail::finish(h, 1, n * t_p);
    out.tail_magnitude = tail;
    out.converged = tail <= 1e-10 * std::abs(a) || a == 0.0;
    out.n_max = n_max;
    return out;
}

// Convenience: doubles the truncation until the tail criterion passes.
inline BesselAht pdante_bessel_auto(double tau, double delta_tau, double f, int n, double theta,
                                    double t_p, double omega_z, double nu0_hz,
                                    int n_max_start = 64) {
    for (int nm = n_max_start; nm <= 4096; nm *= 2) {
        BesselAht r = pdante_bessel_first_order(tau, delta_tau, f, n, theta, t_p, omega_z, nu0_hz, nm);
        if (r.converged) return r;
    }
    throw numeric_error("pdante_bessel_auto: Bessel series did not converge by n_max = 4096");
}

// U_AHT(T_tot) = U_free(w_z T_tot) exp(-i N t_p Havg), with Havg built
// from the train's stored pulse phases.
inline Unitary2 aht_propagator(const SequenceSpec& s, double omega_z, int order) {
    const AhtResult r = avg_hamiltonian_from_phases(cumulative_times(s), s.phases, s.omega_rf(),
                                                    s.t_p, omega_z, order);
    return free_propagator(omega_z, total_duration(s)) *
           Unitary2{expm_hermitian(r.h_avg.m, r.duration)};
}

struct RidgeLine {
    double center = 0.0;   // N on the resonance line
    double lower = 0.0;    // center - 3/(5 n)
    double upper = 0.0;    // center + 3/(5 n)
    long long nearest = 0;
};

// N = INT[(w_Z/w_RF)(Theta / 2 pi n)(tau/t_p + 1)], plus the +-3/(5n)
// ridge offsets flanking it.
inline RidgeLine dante_resonance_lines(double theta_total, double tau_over_tp, int n,
                                       double omega_ratio) {
    if (n == 0) throw std::invalid_argument("dante_resonance_lines: n must be nonzero");
    RidgeLine r;
    r.center = omega_ratio * theta_total / (kTwoPi * n) * (tau_over_tp + 1.0);
    const double off = 3.0 / (5.0 * std::abs(n));
    r.lower = r.center - off;
    r.upper = r.center + off;
    r.nearest = std::llround(r.center);
    return r;
}

struct ResonancePrediction {
    double delta_nu_hz = 0.0;
    int m = 0;
    int n = 0;
    int bessel_order = 0;
    double bessel_argument = 0.0;
    double scale = 0.0;  // J_n(argument)
};

// Resonance comb dnu = (m - n/f)/tau with first-order scales
// J_n((m - n/f) pi (dtau/tau) csc(pi/f)), sorted by |dnu|.
inline std::vector<ResonancePrediction> pdante_resonances(double tau, double f, double delta_ratio,
                                                          int m_max, int n_max) {
    if (!(tau > 0.0)) throw std::invalid_argument("pdante_resonances: tau must be > 0");
    if (f == 0.0) throw std::invalid_argument("pdante_resonances: f must be nonzero");
    if (delta_ratio < 0.0 || delta_ratio > 1.0)
        throw std::invalid_argument("pdante_resonances: delta_ratio must be in [0, 1]");
    const double sf = std::sin(kPi / f);
    if (std::abs(sf) < 1e-12)
        throw std::invalid_argument("pdante_resonances: 1/f integer, modulation degenerate");
    std::vector<ResonancePrediction> out;
    out.reserve(static_cast<std::size_t>(2 * m_max + 1) * static_cast<std::size_t>(2 * n_max + 1));
    for (int m = -m_max; m <= m_max; ++m) {
        for (int n = -n_max; n <= n_max; ++n) {
            ResonancePrediction r;
            r.m = m;
            r.n = n;
            r.bessel_order = n;
            r.delta_nu_hz = (m - n / f) / tau;
            r.bessel_argument = (m - n / f) * kPi * delta_ratio / sf;
            r.scale = bessel_jn(n, r.bessel_argument);
            out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end(), [](const ResonancePrediction& a, const ResonancePrediction& b) {
        const double da = std::abs(a.delta_nu_hz), db = std::abs(b.delta_nu_hz);
        if (da != db) return da < db;
        if (a.m != b.m) return a.m < b.m;
        return a.n < b.n;
    });
    return out;
}

struct EffectivePulse {
    double omega_z_eff = 0.0;   // rad/s
    double omega_rf_eff = 0.0;  // rad/s
    double phase_eff = 0.0;     // rad
};

// Diagnostic only: the uniform train viewed as one off-resonant pulse of
// length N t_p. The phase increment per period maps to an effective offset
// w_z' = mod[w_z taut, 2 pi] / t_p (validated numerically; the literal
// (2 pi / t_p) mod[...] variant does not reproduce the exact propagator).
inline EffectivePulse dante_effective_pulse(double omega_z, double omega_rf, double tau_t,
                                            double t_p) {
    if (!(t_p > 0.0)) throw std::invalid_argument("dante_effective_pulse: t_p must be > 0");
    double r = std::fmod(omega_z * tau_t, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    EffectivePulse e;
    e.omega_z_eff = r / t_p;
    e.omega_rf_eff = omega_rf * sinc(0.5 * omega_z * t_p) / sinc(0.5 * e.omega_z_eff * t_p);
    e.phase_eff = 0.5 * t_p * (e.omega_z_eff - omega_z);
    return e;
}

// Companion to the diagnostic: U_free(w_z T_tot - w_z' N t_p) x effective pulse.
inline Unitary2 dante_effective_propagator(int n, double omega_z, double omega_rf, double tau_t,
                                           double t_p) {
    const EffectivePulse e = dante_effective_pulse(omega_z, omega_rf, tau_t, t_p);
    const double big_tp = n * t_p;
    const PulseParams p{e.omega_rf_eff, e.phase_eff, big_tp, e.omega_z_eff};
    const double t_tot = (n - 1) * tau_t + t_p;
    return free_propagator(omega_z * t_tot - e.omega_z_eff * big_tp, 1.0) * exact_pulse(p);
}

}  // namespace pdante
