#include "pzbeam/model.hpp"

#include <cmath>

namespace pzbeam {

MaterialParams validate_material(const MaterialInput& raw) {
    const double vals[] = {raw.rho, raw.mu, raw.alpha, raw.beta, raw.gamma, raw.L};
    for (double v : vals) {
        if (!std::isfinite(v)) {
            throw NonPositiveParameterError("material parameter is not a finite number");
        }
    }
    if (raw.rho <= 0.0) throw NonPositiveParameterError("rho must be > 0");
    if (raw.mu <= 0.0) throw NonPositiveParameterError("mu must be > 0");
    if (raw.beta <= 0.0) throw NonPositiveParameterError("beta must be > 0");
    if (raw.L <= 0.0) throw NonPositiveParameterError("L must be > 0");

    const double alpha1 = raw.alpha - raw.gamma * raw.gamma * raw.beta;
    if (alpha1 <= 0.0) {
        throw IndefiniteCouplingError("alpha <= gamma^2*beta: coupling matrix A is not positive definite");
    }
    return MaterialParams{raw.rho, raw.mu, raw.alpha, raw.beta, raw.gamma, alpha1, raw.L};
}

CouplingMatrices coupling_matrices(const MaterialParams& params) {
    CouplingMatrices cm;
    cm.M << params.rho, 0.0, 0.0, params.mu;
    const double gb = params.gamma * params.beta;
    cm.A << params.alpha, -gb, -gb, params.beta;
    return cm;
}

}  // namespace pzbeam
