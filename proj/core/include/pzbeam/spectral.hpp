#ifndef PZBEAM_SPECTRAL_HPP
#define PZBEAM_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pzbeam/discretization.hpp"

namespace pzbeam {

/// First-order closed-loop form E z' = A z with z = (u, v):
///   E = [[I, 0], [0, Mh]],  A = [[0, I], [-Keff, -Deff]].
/// E is singular (Mh carries the order-reduction kernel), so the closed
/// loop is a matrix pencil rather than a single matrix; its finite
/// eigenvalues are the physical closed-loop spectrum.
struct FirstOrderSystem {
    Eigen::MatrixXd E;
    Eigen::MatrixXd A;
};

FirstOrderSystem first_order_system(const SemiDiscreteSystem& system);

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;  // finite spectrum (1/s)
    double abscissa = 0.0;                          // max real part
    int N = 0;
    GainSet gains;
};

/// Finite spectrum of the closed-loop pencil. The nonphysical infinite
/// modes (per-field alternating Kronecker chains, length 1 for fields with
/// a velocity gain, 2 otherwise) and the rigid constant modes of fields
/// with no gains at all (exact Jordan pairs at 0) are deflated with their
/// analytically known subspaces before the QZ solve; rigid zeros are
/// reported back in the eigenvalue list.
SpectrumReport spectral_abscissa(const SemiDiscreteSystem& system);

/// Dense nonsymmetric eigenvalue computation for an explicitly given
/// closed-loop matrix. Throws EigenFailureError when the iteration fails.
SpectrumReport spectral_abscissa(const Eigen::MatrixXd& matrix);

}  // namespace pzbeam

#endif
