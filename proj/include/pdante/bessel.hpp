// Bessel functions of the first kind by normalized downward recurrence
// (Miller's algorithm). Arguments here are O(1..40), where the recurrence
// converges quickly.
#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace pdante {

// J_0..J_n_max at x. Negative x handled through J_n(-x) = (-1)^n J_n(x).
inline std::vector<double> bessel_jn_table(int n_max, double x) {
    if (n_max < 0) throw std::invalid_argument("bessel_jn_table: n_max must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double ax = std::abs(x);
    if (ax < 1e-12) {
        out[0] = 1.0;
        if (n_max >= 1) out[1] = x / 2.0;
        return out;
    }
    int start = n_max + static_cast<int>(std::ceil(std::sqrt(40.0 * std::max(n_max, 1)))) +
                static_cast<int>(1.5 * ax) + 22;
    if (start % 2) ++start;
    std::vector<double> b(static_cast<std::size_t>(start) + 2, 0.0);
    b[static_cast<std::size_t>(start) + 1] = 0.0;
    b[static_cast<std::size_t>(start)] = 1e-280;
    for (int k = start; k >= 1; --k) {
        b[static_cast<std::size_t>(k) - 1] = (2.0 * k / ax) * b[static_cast<std::size_t>(k)] -
                                             b[static_cast<std::size_t>(k) + 1];
        if (std::abs(b[static_cast<std::size_t>(k) - 1]) > 1e260) {
            for (int j = k - 1; j <= start + 1; ++j) b[static_cast<std::size_t>(j)] *= 1e-260;
        }
    }
    double norm = b[0];
    for (int k = 2; k < start; k += 2) norm += 2.0 * b[static_cast<std::size_t>(k)];
    for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = b[static_cast<std::size_t>(n)] / norm;
    if (x < 0.0) {
        for (int n = 1; n <= n_max; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
    }
    return out;
}

// J_n(x) for any integer n: J_{-n}(x) = (-1)^n J_n(x).
inline double bessel_jn(int n, double x) {
    const int an = std::abs(n);
    const double v = bessel_jn_table(an, x)[static_cast<std::size_t>(an)];
    return (n < 0 && (an % 2)) ? -v : v;
}

}  // namespace pdante
