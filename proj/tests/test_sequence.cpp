#include <catch_amalgamated.hpp>

#include <numeric>

#include "pdante/sequence.hpp"
#include "support/oracles.hpp"

using namespace pdante;

namespace {
constexpr int kN = 30;
constexpr double kTheta = kPi / 60.0;
constexpr double kTp = 720e-9;
}  // namespace

TEST_CASE("dante: uniform delays, zero phases, totals") {
    const SequenceSpec s = dante(kN, kTheta, kTp, 2e-3);
    CHECK(std::abs(s.total_flip() - kPi / 2.0) < 1e-15);
    for (double d : s.delays) CHECK(d == 2e-3);
    for (double p : s.phases) CHECK(p == 0.0);
    CHECK(std::abs(total_duration(s) - ((kN - 1) * (2e-3 + kTp) + kTp)) < 1e-12);

    const SequenceSpec one = dante(1, kTheta, kTp, 2e-3);
    CHECK(one.delays.empty());
    const SequenceSpec packed = dante(kN, kTheta, kTp, 0.0);
    CHECK(std::abs(total_duration(packed) - kN * kTp) < 1e-18);
}

TEST_CASE("generators reject flips outside the small-flip regime") {
    CHECK_THROWS_AS(dante(kN, kTwoPi / 9.0, kTp, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(pdante_random(kN, 1.0, kTp, 1e-3, 0.0, 1), std::invalid_argument);
    CHECK_NOTHROW(dante(kN, kTwoPi / 9.0 - 1e-6, kTp, 1e-3));
}

TEST_CASE("pdante_random: normalization, determinism, phases") {
    const SequenceSpec s = pdante_random(kN, kTheta, kTp, kFig4TotalDelay, 0.0, 99);
    CHECK(s.delays.size() == kN - 1);
    const double sum = std::accumulate(s.delays.begin(), s.delays.end(), 0.0);
    CHECK(sum == kFig4TotalDelay);  // compensated rescale pins the sum
    CHECK(std::abs(sum / (kN - 1) - 1.6e-3) < 1e-12);
    for (double d : s.delays) CHECK(d >= 0.0);
    for (double p : s.phases) CHECK(p == 0.0);  // nu0 = 0

    const SequenceSpec again = pdante_random(kN, kTheta, kTp, kFig4TotalDelay, 0.0, 99);
    CHECK(again.delays == s.delays);
    const SequenceSpec other = pdante_random(kN, kTheta, kTp, kFig4TotalDelay, 0.0, 100);
    CHECK(other.delays != s.delays);

    CHECK_THROWS_AS(pdante_random(kN, kTheta, kTp, -1e-3, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(pdante_random(1, kTheta, kTp, 1e-3, 0.0, 1), std::invalid_argument);
}

TEST_CASE("phase lock invariant across generators") {
    oracles::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const double nu0 = rng.uniform(-800.0, 800.0);
        SequenceSpec s;
        switch (trial % 3) {
            case 0: s = pdante_random(kN, kTheta, kTp, kFig4TotalDelay, nu0, 7 + trial); break;
            case 1: s = pdante_cosine(kN, kTheta, kTp, 1.6e-3, 1.1e-3, 1.0 / std::sqrt(2.0), nu0); break;
            default: s = pdante_udd_like(kN, kTheta, kTp, 2.063e-3, nu0); break;
        }
        const std::vector<double> t = cumulative_times(s);
        CHECK(s.phases[0] == 0.0);
        for (int k = 1; k < s.n_pulses; ++k) {
            // pulse k+1 starts at T_k and carries phi_{k+1} = -2 pi nu0 T_k
            const double resid = std::remainder(
                s.phases[static_cast<std::size_t>(k)] + kTwoPi * nu0 * t[static_cast<std::size_t>(k)],
                kTwoPi);
            CHECK(std::abs(resid) < 1e-9);
        }
    }
}

TEST_CASE("pdante_cosine: law, degenerate modulation, rejections") {
    const double tau = 2.096e-3, f = 23.0;
    const SequenceSpec s = pdante_cosine(kN, kTheta, kTp, tau, tau / 3.0, f, 0.0);
    for (int k = 1; k < kN; ++k)
        CHECK(std::abs(s.delays[static_cast<std::size_t>(k) - 1] -
                       tau * (1.0 + std::cos(kTwoPi * k / f) / 3.0)) < 1e-18);
    // direct-sum mean of this preset (the idealized 2 ms is not what the law gives)
    const double mean = std::accumulate(s.delays.begin(), s.delays.end(), 0.0) / (kN - 1);
    CHECK(std::abs(mean - 2.17055e-3) < 1e-7);

    const SequenceSpec flat = pdante_cosine(kN, kTheta, kTp, 2e-3, 0.0, 0.7, 0.0);
    CHECK(flat.delays == dante(kN, kTheta, kTp, 2e-3).delays);

    CHECK_THROWS_AS(pdante_cosine(kN, kTheta, kTp, 1e-3, 2e-3, 0.7, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pdante_cosine(kN, kTheta, kTp, 1e-3, -1e-4, 0.7, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pdante_cosine(kN, kTheta, kTp, 1e-3, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("pdante_udd_like: sin^2 law and closed-form sum") {
    const double scale = 2.063e-3;
    const SequenceSpec s = pdante_udd_like(kN, kTheta, kTp, scale, 0.0);
    for (int k = 1; k < kN; ++k) {
        const double want = 4.126e-3 * std::pow(std::sin(k * kPi / 60.0), 2);
        CHECK(std::abs(s.delays[static_cast<std::size_t>(k) - 1] - want) < 1e-15);
    }
    // midpoint delay ~ scale
    CHECK(std::abs(s.delays[14] - scale) < 0.05 * scale);
    // direct sum vs Dirichlet-kernel closed form:
    // sum_{k=1}^{M} cos(k a) = sin(M a/2) cos((M+1) a/2) / sin(a/2)
    const double a = kPi / kN;
    const int m = kN - 1;
    const double csum = std::sin(m * a / 2.0) * std::cos((m + 1) * a / 2.0) / std::sin(a / 2.0);
    const double closed = scale * (m - csum);
    const double direct = std::accumulate(s.delays.begin(), s.delays.end(), 0.0);
    CHECK(std::abs(direct - closed) < 1e-15);
    // and the mean equals the scale exactly here (the cosine sum vanishes)
    CHECK(std::abs(direct / m - scale) < 1e-12);
}

TEST_CASE("cosine_family: prime-indexed members with exact mean delay") {
    const auto fam = cosine_family(kN, kTheta, kTp, 1.6e-3, 1.0 / std::sqrt(2.0), 100, 0.0);
    REQUIRE(fam.size() == 100);
    CHECK(nth_prime(1) == 2);
    CHECK(nth_prime(2) == 3);
    CHECK(nth_prime(100) == 541);
    CHECK(nth_prime(101) == 547);

    for (int p : {1, 2, 100}) {
        const auto& s = fam[static_cast<std::size_t>(p) - 1];
        const double mean =
            std::accumulate(s.delays.begin(), s.delays.end(), 0.0) / (kN - 1);
        CHECK(std::abs(mean - 1.6e-3) < 1e-17);
        for (double d : s.delays) CHECK(d >= 0.0);
    }
    // member 1 base delay reproduces 1/tau = 625.13 Hz
    const auto& s1 = fam[0];
    double dmax = 0.0, dmin = 1.0;
    for (double d : s1.delays) {
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    const double tau1 = (dmax + dmin) / 2.0;  // tau (1 +- dr) envelope midpoint: approximate
    CHECK(std::abs(1.0 / tau1 - 625.13) < 1.0);

    const auto flat = cosine_family(kN, kTheta, kTp, 1.6e-3, 0.0, 2, 0.0);
    CHECK(flat[0].delays == dante(kN, kTheta, kTp, 1.6e-3).delays);
    CHECK_THROWS_AS(cosine_family(kN, kTheta, kTp, 1.6e-3, 1.2, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cosine_family(kN, kTheta, kTp, 1.6e-3, 0.5, 0, 0.0), std::invalid_argument);
}

TEST_CASE("cumulative_times: uniform, arithmetic, cosine closed form") {
    const SequenceSpec s = dante(5, kTheta, kTp, 2e-3);
    const auto t = cumulative_times(s);
    CHECK(t[0] == 0.0);
    for (int k = 1; k < 5; ++k) {
        CHECK(std::abs(t[static_cast<std::size_t>(k)] - k * (2e-3 + kTp)) < 1e-15);
        CHECK(t[static_cast<std::size_t>(k)] > t[static_cast<std::size_t>(k) - 1]);
    }

    SequenceSpec two = dante(2, kTheta, 1e-6, 1e-3);
    CHECK(std::abs(cumulative_times(two)[1] - 1.001e-3) < 1e-15);

    // delay-only cumulative sums against the csc closed form
    const double tau = 1.6e-3, dtau = tau / std::sqrt(2.0), f = 1.0 / std::sqrt(2.0);
    const SequenceSpec cs = pdante_cosine(kN, kTheta, kTp, tau, dtau, f, 0.0);
    double acc = 0.0;
    for (int k = 1; k < kN; ++k) {
        acc += cs.delays[static_cast<std::size_t>(k) - 1];
        const double closed =
            k * tau -
            0.5 * dtau * (1.0 - std::sin((2.0 * k + 1.0) * kPi / f) / std::sin(kPi / f));
        CHECK(std::abs(acc - closed) < 1e-9 * std::abs(closed));
    }
}

TEST_CASE("canonical JSON: golden serialization and stable fields") {
    SequenceSpec s = dante(2, kPi / 60.0, 720e-9, 2e-3);
    const std::string got = to_canonical_json(s);
    const std::string want = R"({
  "format": "pdante-sequence/v1",
  "generator": "dante/v1",
  "seed": 0,
  "n_pulses": 2,
  "theta_rad": 0.05235987755982988,
  "total_flip_rad": 0.10471975511965977,
  "nu0_hz": 0.0,
  "t_p_s": "7.20000000000e-07",
  "delays_s": [
    "2.00000000000e-03"
  ],
  "phases_rad": [
    0.0,
    0.0
  ]
})";
    CHECK(got == want);
}
