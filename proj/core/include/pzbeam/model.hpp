#ifndef PZBEAM_MODEL_HPP
#define PZBEAM_MODEL_HPP

#include <Eigen/Dense>

#include "pzbeam/errors.hpp"

namespace pzbeam {

/// Raw material constants as they appear in a config file.
struct MaterialInput {
    double rho = 0.0;    // mass density (kg/m^3)
    double mu = 0.0;     // magnetic permeability (H/m)
    double alpha = 0.0;  // piezoelectric-augmented stiffness (N/m^2)
    double beta = 0.0;   // impermeability (m/F)
    double gamma = 0.0;  // piezoelectric constant (C/m^3)
    double L = 0.0;      // beam length (m)
};

/// Validated material constants. alpha1 = alpha - gamma^2*beta is derived;
/// alpha is the stored primary stiffness (the experiment reports alpha).
struct MaterialParams {
    double rho;
    double mu;
    double alpha;
    double beta;
    double gamma;
    double alpha1;
    double L;
};

/// M = diag(rho, mu), A = [[alpha, -gamma*beta], [-gamma*beta, beta]].
/// A is symmetric positive definite whenever alpha1 > 0 (det A = beta*alpha1).
struct CouplingMatrices {
    Eigen::Matrix2d M;
    Eigen::Matrix2d A;
};

/// Checks positivity and the definiteness constraint alpha > gamma^2*beta.
/// Throws NonPositiveParameterError or IndefiniteCouplingError.
MaterialParams validate_material(const MaterialInput& raw);

CouplingMatrices coupling_matrices(const MaterialParams& params);

}  // namespace pzbeam

#endif
