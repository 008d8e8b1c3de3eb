// Exact complex 2x2 algebra for spin-1/2 propagators: spin operators,
// analytic matrix exponential of Hermitian matrices, Frobenius distances,
// Bloch-vector evolution. All angular frequencies are rad/s.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace pdante {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Row-major complex 2x2.
struct Mat2 {
    cplx e00{}, e01{}, e10{}, e11{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 operator+(const Mat2& o) const { return {e00 + o.e00, e01 + o.e01, e10 + o.e10, e11 + o.e11}; }
    Mat2 operator-(const Mat2& o) const { return {e00 - o.e00, e01 - o.e01, e10 - o.e10, e11 - o.e11}; }
    Mat2 operator*(const Mat2& o) const {
        return {e00 * o.e00 + e01 * o.e10, e00 * o.e01 + e01 * o.e11,
                e10 * o.e00 + e11 * o.e10, e10 * o.e01 + e11 * o.e11};
    }
    Mat2 operator*(cplx s) const { return {s * e00, s * e01, s * e10, s * e11}; }
    friend Mat2 operator*(cplx s, const Mat2& m) { return m * s; }

    Mat2 adjoint() const {
        return {std::conj(e00), std::conj(e10), std::conj(e01), std::conj(e11)};
    }
    cplx trace() const { return e00 + e11; }
    cplx det() const { return e00 * e11 - e01 * e10; }
};

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

inline double frobenius_norm(const Mat2& m) {
    return std::sqrt(std::norm(m.e00) + std::norm(m.e01) + std::norm(m.e10) + std::norm(m.e11));
}

// Spin-1/2 operators, I_alpha = sigma_alpha / 2.
inline const Mat2 kSpinX{0.0, 0.5, 0.5, 0.0};
inline const Mat2 kSpinY{0.0, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.0};
inline const Mat2 kSpinZ{0.5, 0.0, 0.0, -0.5};
inline const Mat2 kSpinPlus{0.0, 1.0, 0.0, 0.0};   // I_X + i I_Y
inline const Mat2 kSpinMinus{0.0, 0.0, 1.0, 0.0};  // I_X - i I_Y

// H = c*1 + hx*I_X + hy*I_Y + hz*I_Z, coefficients in rad/s.
inline Mat2 hermitian_from_coeffs(double hx, double hy, double hz, double c = 0.0) {
    return {cplx(c + hz / 2.0, 0.0), cplx(hx / 2.0, -hy / 2.0),
            cplx(hx / 2.0, hy / 2.0), cplx(c - hz / 2.0, 0.0)};
}

inline double coeff_x(const Mat2& h) { return 2.0 * h.e01.real(); }
inline double coeff_y(const Mat2& h) { return -2.0 * h.e01.imag(); }
inline double coeff_z(const Mat2& h) { return (h.e00 - h.e11).real(); }

inline double hermiticity_defect(const Mat2& m) { return frobenius_norm(m - m.adjoint()); }

inline double unitarity_defect(const Mat2& m) {
    return frobenius_norm(m.adjoint() * m - Mat2::identity());
}

// Hamiltonian matrix; entries carry rad/s. Factory checks H = H^dagger.
struct Hermitian2 {
    Mat2 m;

    static Hermitian2 from_matrix(const Mat2& m) {
        const double defect = hermiticity_defect(m);
        if (defect > 1e-9 * (frobenius_norm(m) + 1e-300) && defect > 1e-300)
            throw std::invalid_argument("Hermitian2: matrix is not Hermitian");
        return Hermitian2{m};
    }
};

// Propagator matrix. Internal operations construct these directly; foreign
// matrices go through from_matrix.
struct Unitary2 {
    Mat2 m;

    static Unitary2 from_matrix(const Mat2& m, double tol = 1e-9) {
        if (unitarity_defect(m) > tol)
            throw std::invalid_argument("Unitary2: matrix is not unitary");
        return Unitary2{m};
    }

    Unitary2 operator*(const Unitary2& o) const { return Unitary2{m * o.m}; }
    Unitary2 adjoint() const { return Unitary2{m.adjoint()}; }
};

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// exp(-i M t) for Hermitian M, via the two-level closed form
// exp(-i(c + M0)t) = e^{-ict}(cos(L t) - i sin(L t)/L * M0), L = |M0| eigenvalue.
inline Mat2 expm_hermitian(const Mat2& m, double t) {
    const double c = 0.5 * (m.e00 + m.e11).real();
    const double d = 0.5 * (m.e00 - m.e11).real();
    const cplx off = m.e01;
    const double lam = std::sqrt(d * d + std::norm(off));
    const double u = lam * t;
    double cu = std::cos(u);
    // sin(L t)/L, finite at L -> 0
    double s_over_l = (std::abs(u) < 1e-8) ? t * (1.0 - u * u / 6.0)
                                           : std::sin(u) / lam;
    if (lam == 0.0) s_over_l = t;
    const cplx ph = std::polar(1.0, -c * t);
    const cplx f = cplx(0.0, -1.0) * s_over_l;
    return {ph * (cu + f * d), ph * (f * off),
            ph * (f * std::conj(off)), ph * (cu - f * d)};
}

inline Unitary2 expm_h(const Hermitian2& h, double t) {
    if (t < 0.0) throw std::invalid_argument("expm_h: negative duration");
    return Unitary2{expm_hermitian(h.m, t)};
}

inline double frobenius_distance(const Mat2& a, const Mat2& b) { return frobenius_norm(a - b); }
inline double frobenius_distance(const Unitary2& a, const Unitary2& b) {
    return frobenius_norm(a.m - b.m);
}

// min over global phase of ||A - e^{i phi} B||, for unitary A, B. The
// optimum is e^{i phi} = Tr[B^dag A]/|Tr[B^dag A]|; forming the aligned
// difference explicitly keeps full resolution near zero.
inline double frobenius_distance_phase_aligned(const Unitary2& a, const Unitary2& b) {
    const cplx t = (b.m.adjoint() * a.m).trace();
    const double at = std::abs(t);
    if (at == 0.0) return frobenius_norm(a.m - b.m);
    return frobenius_norm(a.m - (t / at) * b.m);
}

// rho(v) = 1/2 + v.(I_X,I_Y,I_Z); components back out as 2 Tr[rho I_alpha].
inline BlochVector bloch_evolve_unchecked(const Mat2& u, const BlochVector& v) {
    const Mat2 rho{cplx(0.5 * (1.0 + v.z), 0.0), cplx(0.5 * v.x, -0.5 * v.y),
                   cplx(0.5 * v.x, 0.5 * v.y), cplx(0.5 * (1.0 - v.z), 0.0)};
    const Mat2 r = u * rho * u.adjoint();
    return {2.0 * r.e01.real(), -2.0 * r.e01.imag(), (r.e00 - r.e11).real()};
}

inline BlochVector bloch_evolve(const Unitary2& u, const BlochVector& v) {
    if (unitarity_defect(u.m) > 1e-9)
        throw std::invalid_argument("bloch_evolve: propagator is not unitary");
    return bloch_evolve_unchecked(u.m, v);
}

}  // namespace pdante
