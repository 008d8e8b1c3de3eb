// Single rectangular pulse physics: exact propagator, free evolution,
// one- and two-term average Hamiltonian, the approximate propagator built
// from them, and the split-pulse decomposition of an off-resonant pulse.
#pragma once

#include <stdexcept>
#include <vector>

#include "pdante/su2.hpp"

namespace pdante {

// Small-flip regime boundary used by the sequence generators.
constexpr double kMaxSmallFlip = kTwoPi / 9.0;

// sinc(x) = sin(x)/x, sinc(0) = 1 (unnormalized; not the sin(pi x)/(pi x)
// variant most libraries ship).
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

// (1 - sinc(x))/x without cancellation near 0; odd in x.
inline double one_minus_sinc_over(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return x / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
    }
    return (1.0 - std::sin(x) / x) / x;
}

struct PulseParams {
    double omega_rf = 0.0;  // rad/s, >= 0
    double phase = 0.0;     // rad
    double t_p = 0.0;       // s, > 0
    double omega_z = 0.0;   // resonance offset, rad/s

    double flip_angle() const { return omega_rf * t_p; }
};

// Transverse scale a = w_rf sinc(w_z t_p / 2) of the first-order term.
inline double aht_a(const PulseParams& p) {
    return p.omega_rf * sinc(p.omega_z * p.t_p / 2.0);
}

// Second-order longitudinal scale b = (w_rf^2 / 2 w_z)(1 - sinc(w_z t_p)),
// evaluated as (w_rf^2 t_p / 2) * (1 - sinc(x))/x to keep the w_z -> 0
// limit exact (b -> w_rf^2 w_z t_p^2 / 12).
inline double aht_b(const PulseParams& p) {
    return 0.5 * p.omega_rf * p.omega_rf * p.t_p * one_minus_sinc_over(p.omega_z * p.t_p);
}

inline Unitary2 exact_pulse(const PulseParams& p) {
    if (!(p.t_p > 0.0)) throw std::invalid_argument("exact_pulse: t_p must be > 0");
    const Mat2 h = hermitian_from_coeffs(p.omega_rf * std::cos(p.phase),
                                         p.omega_rf * std::sin(p.phase), p.omega_z);
    return Unitary2{expm_hermitian(h, p.t_p)};
}

inline Unitary2 free_propagator(double omega_z, double tau) {
    if (tau < 0.0) throw std::invalid_argument("free_propagator: tau must be >= 0");
    const double ang = 0.5 * omega_z * tau;
    return Unitary2{{std::polar(1.0, -ang), 0.0, 0.0, std::polar(1.0, ang)}};
}

// First term: (a/2)(I+ e^{i(w_z t_p/2 - phi)} + h.c.). Second adds b I_Z.
inline Hermitian2 single_pulse_aht(const PulseParams& p, int order) {
    if (!(p.t_p > 0.0)) throw std::invalid_argument("single_pulse_aht: t_p must be > 0");
    if (order != 1 && order != 2) throw std::invalid_argument("single_pulse_aht: order must be 1 or 2");
    const double a = aht_a(p);
    const cplx up = 0.5 * a * std::polar(1.0, p.omega_z * p.t_p / 2.0 - p.phase);
    Mat2 h{0.0, up, std::conj(up), 0.0};
    if (order == 2) {
        const double b = aht_b(p);
        h.e00 += 0.5 * b;
        h.e11 -= 0.5 * b;
    }
    return Hermitian2{h};
}

// U_free(w_z t_p) * exp(-i t_p Havg), the two-term approximation of the
// exact pulse. Exact when w_z = 0.
inline Unitary2 approx_pulse(const PulseParams& p, int order) {
    const Hermitian2 h = single_pulse_aht(p, order);
    return free_propagator(p.omega_z, p.t_p) * Unitary2{expm_hermitian(h.m, p.t_p)};
}

struct SplitPulse {
    std::vector<PulseParams> segments;  // on-resonance, apply in order
    double final_z_rotation = 0.0;      // rad, about z after the segments
};

// Rewrites an off-resonant pulse as N on-resonance segments of effective
// flip w_rf (T_p/N) sinc(w_z T_p / 2N) with a phase ramp, plus a trailing
// z-rotation by w_z T_p. Composition converges to the exact pulse as 1/N^2.
inline SplitPulse split_pulse(double omega_z, double omega_rf, double phase, double t_p,
                              int n_segments) {
    if (n_segments < 1) throw std::invalid_argument("split_pulse: need at least one segment");
    if (!(t_p > 0.0)) throw std::invalid_argument("split_pulse: t_p must be > 0");
    SplitPulse out;
    out.segments.reserve(static_cast<std::size_t>(n_segments));
    const double dt = t_p / n_segments;
    const double wrf_eff = omega_rf * sinc(omega_z * t_p / (2.0 * n_segments));
    for (int j = 1; j <= n_segments; ++j) {
        const double phi_star = omega_z * (j - 1) * dt + omega_z * dt / 2.0 - phase;
        out.segments.push_back(PulseParams{wrf_eff, -phi_star, dt, 0.0});
    }
    out.final_z_rotation = omega_z * t_p;
    return out;
}

inline Unitary2 compose_split_pulse(const SplitPulse& sp) {
    Mat2 u = Mat2::identity();
    for (const auto& seg : sp.segments) u = exact_pulse(seg).m * u;
    const double ang = 0.5 * sp.final_z_rotation;
    const Mat2 f{std::polar(1.0, -ang), 0.0, 0.0, std::polar(1.0, ang)};
    return Unitary2{f * u};
}

}  // namespace pdante
