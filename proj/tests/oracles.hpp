#pragma once

// Closed-form reference values for the free potential, written independently of the library.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline double dd_eigenvalue(int n) { return double(n) * n; }
inline double nd_eigenvalue(int n) { return (n - 0.5) * (n - 0.5); }
inline double nn_eigenvalue(int n) { return double(n - 1) * (n - 1); }

inline double dd_mass(int n) { return 2.0 * n * n / pi; }
inline double nd_mass(int) { return 2.0 / pi; }

/// cot(v) through exponentials of the decaying sign, stable for large |Im v|.
inline cplx cot(cplx v) {
    const cplx I(0.0, 1.0);
    if (v.imag() >= 0) {
        const cplx e = std::exp(2.0 * I * v);
        return I * (e + 1.0) / (e - 1.0);
    }
    const cplx e = std::exp(-2.0 * I * v);
    return -I * (1.0 + e) / (1.0 - e);
}

/// m_{0,0}(z) = -sqrt(z) cot(sqrt(z) pi)
inline cplx m_dd(cplx z) {
    const cplx w = std::sqrt(z);
    return -w * cot(w * pi);
}

/// m_{pi/2,0}(z) = tan(sqrt(z) pi) / sqrt(z)
inline cplx m_nd(cplx z) {
    const cplx w = std::sqrt(z);
    return 1.0 / (cot(w * pi) * w);
}

}  // namespace oracle
