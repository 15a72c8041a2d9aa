#pragma once

#include <cmath>
#include <complex>

namespace spectralmix::numerics {

using cplx = std::complex<double>;

/// log(1 + w) without cancellation for small |w|.
inline cplx log1p(cplx w) {
    const double r = std::abs(w);
    if (r < 1e-3) {
        // alternating series, 7 terms give < 1e-22 relative remainder
        cplx term = w, sum = 0.0;
        for (int k = 1; k <= 7; ++k) {
            sum += term / static_cast<double>(k);
            term *= -w;
        }
        return sum;
    }
    return std::log(1.0 + w);
}

}  // namespace spectralmix::numerics
