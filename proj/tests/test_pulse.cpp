#include <catch_amalgamated.hpp>

#include "pdante/pulse.hpp"
#include "support/oracles.hpp"

using namespace pdante;

namespace {
const double kWrf = (kPi / 60.0) / 720e-9;  // the tp = 720 ns, theta = pi/60 train
}

TEST_CASE("sinc conventions") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(kPi)) < 1e-15);
    // series vs direct across the switchover
    for (double x : {1e-5, 9.9e-5, 1.01e-4, 5e-5})
        CHECK(std::abs(sinc(x) - std::sin(x) / x) < 1e-15);
}

TEST_CASE("exact_pulse: resonant quarter turns") {
    const double tp = kPi / 2.0 / kWrf;
    const BlochVector vx = bloch_evolve(exact_pulse({kWrf, 0.0, tp, 0.0}), {0, 0, 1});
    CHECK(std::abs(vx.y + 1.0) < 1e-12);
    const BlochVector vy = bloch_evolve(exact_pulse({kWrf, kPi / 2.0, tp, 0.0}), {0, 0, 1});
    CHECK(std::abs(vy.x - 1.0) < 1e-12);
    CHECK(std::abs(vy.z) < 1e-12);
}

TEST_CASE("exact_pulse equals expm_h of the full Hamiltonian") {
    const double tp = kPi / kWrf;
    const Unitary2 u = exact_pulse({kWrf, 0.0, tp, kWrf});
    const Mat2 h = hermitian_from_coeffs(kWrf, 0.0, kWrf);
    CHECK(frobenius_distance(u.m, expm_hermitian(h, tp)) < 1e-13);
    CHECK(frobenius_distance(u.m, oracles::expm_series(h, tp)) < 1e-12);
}

TEST_CASE("exact_pulse rejects non-positive length") {
    CHECK_THROWS_AS(exact_pulse({kWrf, 0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(exact_pulse({kWrf, 0.0, -1e-6, 0.0}), std::invalid_argument);
}

TEST_CASE("free_propagator: full turn is the identity on Bloch vectors") {
    const Unitary2 u = free_propagator(kTwoPi, 1.0);
    const BlochVector v = bloch_evolve(u, {0.3, -0.4, 0.5});
    CHECK(std::abs(v.x - 0.3) < 1e-12);
    CHECK(std::abs(v.y + 0.4) < 1e-12);
    CHECK(std::abs(v.z - 0.5) < 1e-12);
}

TEST_CASE("free_propagator: quarter turn moves x into y") {
    const BlochVector v = bloch_evolve(free_propagator(kPi / 2.0, 1.0), {1, 0, 0});
    CHECK(std::abs(v.x) < 1e-12);
    CHECK(std::abs(v.y - 1.0) < 1e-12);
}

TEST_CASE("free_propagator matches expm_h of w_z I_Z") {
    oracles::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double wz = rng.uniform(-1e5, 1e5), tau = rng.uniform(0.0, 1e-2);
        CHECK(frobenius_distance(free_propagator(wz, tau).m,
                                 expm_hermitian(wz * kSpinZ, tau)) < 1e-13);
    }
    CHECK_THROWS_AS(free_propagator(1.0, -1e-9), std::invalid_argument);
}

TEST_CASE("single_pulse_aht: resonant limit and sinc zero") {
    const double tp = 720e-9;
    const Hermitian2 h = single_pulse_aht({kWrf, 0.4, tp, 0.0}, 2);
    // w_z = 0: pure transverse with amplitude w_rf, no I_Z part
    CHECK(std::abs(2.0 * std::abs(h.m.e01) - kWrf) < 1e-9);
    CHECK(std::abs(coeff_z(h.m)) < 1e-12);
    CHECK(std::abs(coeff_x(h.m) - kWrf * std::cos(-0.4)) < 1e-9);

    // w_z t_p = 2 pi: transverse part vanishes with sinc(pi) = 0
    const double wz = kTwoPi / tp;
    const Hermitian2 h2 = single_pulse_aht({kWrf, 0.0, tp, wz}, 1);
    CHECK(std::abs(h2.m.e01) < 1e-9 * kWrf);
}

TEST_CASE("single_pulse_aht matches quadrature of the frame integrals") {
    for (const auto& [wz_over, phi] : {std::pair{0.7, 0.4}, {3.3, -1.1}, {0.0, 0.0}, {11.0, 2.0}}) {
        const double tp = 720e-9;
        const double wz = wz_over * kWrf;
        const Mat2 got1 = single_pulse_aht({kWrf, phi, tp, wz}, 1).m;
        const Mat2 want1 = oracles::single_pulse_aht_quadrature(kWrf, phi, tp, wz, 1);
        CHECK(frobenius_distance(got1, want1) < 1e-8 * kWrf);
        const Mat2 got2 = single_pulse_aht({kWrf, phi, tp, wz}, 2).m;
        const Mat2 want2 = oracles::single_pulse_aht_quadrature(kWrf, phi, tp, wz, 2);
        CHECK(frobenius_distance(got2, want2) < 1e-8 * kWrf);
    }
}

TEST_CASE("single_pulse_aht first-order transverse amplitude is w_rf |sinc(w_z t_p/2)|") {
    oracles::Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const double tp = rng.uniform(1e-7, 1e-5);
        const double wz = rng.uniform(-5e6, 5e6);
        const Mat2 h = single_pulse_aht({kWrf, rng.uniform(0, kTwoPi), tp, wz}, 1).m;
        CHECK(std::abs(2.0 * std::abs(h.e01) - kWrf * std::abs(sinc(wz * tp / 2.0))) < 1e-7);
    }
}

TEST_CASE("b coefficient: series branch agrees with the direct expression") {
    const PulseParams lo{kWrf, 0.0, 1e-9, 90.0};          // |x| ~ 9e-8, series branch
    const PulseParams hi{kWrf, 0.0, 1e-9, 2.0e5};         // |x| = 2e-4, direct branch
    CHECK(std::abs(aht_b(lo) - kWrf * kWrf * 90.0 * 1e-18 / 12.0) < 1e-12);
    const double x = hi.omega_z * hi.t_p;
    CHECK(std::abs(aht_b(hi) - kWrf * kWrf / (2.0 * hi.omega_z) * (1.0 - std::sin(x) / x)) <
          1e-7 * std::abs(aht_b(hi)) + 1e-12);
}

TEST_CASE("approx_pulse is exact on resonance") {
    const double tp = 720e-9;
    CHECK(frobenius_distance(approx_pulse({kWrf, 0.7, tp, 0.0}, 2),
                             exact_pulse({kWrf, 0.7, tp, 0.0})) < 1e-12);
}

TEST_CASE("approx_pulse golden distance at theta = pi/60, w_z = 5 w_rf") {
    // Frozen from the quadrature-validated run of this implementation.
    const double wrf = kPi / 60.0;  // t_p = 1 s
    const double d = frobenius_distance(exact_pulse({wrf, 0.0, 1.0, 5.0 * wrf}),
                                        approx_pulse({wrf, 0.0, 1.0, 5.0 * wrf}, 2));
    CHECK(std::abs(d - 2.8922267e-08) < 2e-12);
}

TEST_CASE("approx_pulse error is monotone in the flip angle") {
    double prev = -1.0;
    for (const double frac : {60.0, 18.0, 9.0, 4.5}) {  // theta = pi/frac increasing
        const double wrf = kPi / frac;
        double worst = 0.0;
        for (double r = -20.0; r <= 20.0; r += 0.25) {
            const double d = frobenius_distance(exact_pulse({wrf, 0.0, 1.0, r * wrf}),
                                                approx_pulse({wrf, 0.0, 1.0, r * wrf}, 2));
            worst = std::max(worst, d);
        }
        if (prev >= 0.0) CHECK(worst > prev);  // larger flip, larger worst-case error
        prev = worst;
    }
}

TEST_CASE("split_pulse: on-resonance composition is exact for any N") {
    const double tp = kPi / 2.0 / kWrf;
    for (int n : {1, 3, 16}) {
        const SplitPulse sp = split_pulse(0.0, kWrf, 0.3, tp, n);
        CHECK(sp.segments.size() == static_cast<std::size_t>(n));
        CHECK(frobenius_distance(compose_split_pulse(sp), exact_pulse({kWrf, 0.3, tp, 0.0})) < 1e-12);
    }
    CHECK_THROWS_AS(split_pulse(0.0, kWrf, 0.0, tp, 0), std::invalid_argument);
}

TEST_CASE("split_pulse: single segment carries the sinc-scaled flip") {
    const double tp = 1.0, wz = 0.8;
    const SplitPulse sp = split_pulse(wz, 0.3, 0.0, tp, 1);
    CHECK(std::abs(sp.segments[0].flip_angle() - 0.3 * sinc(wz * tp / 2.0)) < 1e-14);
    CHECK(std::abs(sp.final_z_rotation - wz * tp) < 1e-14);
}

TEST_CASE("split_pulse converges to the exact pulse as 1/N^2") {
    const double wz = 1.0, wrf = 1.0, tp = kPi / 2.0;
    const Unitary2 want = exact_pulse({wrf, 0.0, tp, wz});
    double prev = -1.0;
    for (int n = 8; n <= 512; n *= 2) {
        const double d = frobenius_distance(compose_split_pulse(split_pulse(wz, wrf, 0.0, tp, n)), want);
        if (prev > 0.0) CHECK(d < prev / 3.5);  // expect a factor 4 per doubling
        prev = d;
    }
    CHECK(prev < 1e-4);  // N = 512
}
