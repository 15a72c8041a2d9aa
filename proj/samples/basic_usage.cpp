// Forward solve, m-function evaluation and recovery of one hidden zero for a cosine potential.

#include <cstdio>

#include "spectralmix/completion.hpp"
#include "spectralmix/sturm.hpp"
#include "spectralmix/weyl.hpp"

using namespace spectralmix;

int main() {
    const PotentialSpec q = PotentialSpec::cosine({0.0, 2.0});
    const auto tb = TripleBoundary::from_pair(dirichlet_dirichlet);
    const std::size_t N = 40;

    const auto mu = sturm::spectral_measure(q, tb.pole_bc(), N);
    const auto b = sturm::eigenvalues(q, tb.zero_bc(), N);
    for (std::size_t n = 1; n <= 5; ++n)
        std::printf("a_%zu = %.12f  gamma_%zu = %.12f  b_%zu = %.12f\n", n, mu.eigenvalues[n - 1], n,
                    mu.masses[n - 1], n, b[n]);

    const cplx m = weyl::m_direct(q, tb, cplx(2.0, 1.0));
    std::printf("m(2+i) = %.12f %+.12fi\n", m.real(), m.imag());

    // hide b_2 and supply gamma_2 in its place
    MixedSpectralData d;
    d.spectrum = mu.eigenvalues;
    d.bc = tb;
    d.A = {2};
    d.masses[2] = mu.masses[1];
    for (std::size_t n = 1; n <= N; ++n)
        if (n != 2) d.known_zeros[n] = b[n];
    const auto r = completion::complete_matching(d);
    std::printf("recovered b_2 = %.12f (true %.12f)\n", r.recovered_zeros[0], b[2]);
    return 0;
}
