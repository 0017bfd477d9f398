#ifndef PZBEAM_GAINS_HPP
#define PZBEAM_GAINS_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "pzbeam/errors.hpp"
#include "pzbeam/model.hpp"

namespace pzbeam {

/// The eight boundary feedback gains. Certification requires all of them
/// strictly positive; simulation also admits zeros (conservative and
/// single-controller experiments).
struct GainSet {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
    double k5 = 0.0, k6 = 0.0, k7 = 0.0, k8 = 0.0;

    std::array<double, 8> as_array() const { return {k1, k2, k3, k4, k5, k6, k7, k8}; }
    bool all_positive() const;
    bool all_finite_nonnegative() const;
};

/// K_ij = diag(k_i, k_j), j = i + 2.
struct GainMatrices {
    Eigen::Matrix2d K13;
    Eigen::Matrix2d K24;
    Eigen::Matrix2d K57;
    Eigen::Matrix2d K68;
};

GainMatrices gain_matrices(const GainSet& gains);

/// Certificate parameters: L(t) = Ce*L_e(t) + Lhat(t) with
/// L_e = E_e + eps1*(psi11+psi12 + N1*(psi21+psi22)),
/// Lhat = Ehat + eps2*(psi31+psi32 + N2*(psi41+psi42)).
struct LyapunovParams {
    double Ce = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double N1 = 0.0;
    double N2 = 0.0;
};

struct EquivalenceConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double omega = 0.0;  // decay rate (1/s)
};

struct EquivalenceOptions {
    /// When true, use the C1/C2 gain numerators exactly as printed in the
    /// equivalence statement ((1+k1)/k2 and (1/rho+k5)/k6 style). The default
    /// uses the proof-consistent numerators (rho+k1)/k2, (mu+k3)/k4,
    /// (rho+k5)/k6, (mu+k7)/k8.
    bool printed_numerators = false;
};

/// Evaluates C1, C2, then p1 = min{Ce(1-eps1*C1), 1-eps2*C2},
/// p2 = max{Ce(1+eps1*C1), 1+eps2*C2} and
/// omega = min(eps1(1-L/2)/(1+C1 eps1), (2 eps2/3)/(1+C2 eps2)).
/// Throws EquivalenceViolatedError when eps1*C1 >= 1 or eps2*C2 >= 1.
EquivalenceConstants equivalence_constants(const MaterialParams& mat, const GainSet& gains,
                                           const LyapunovParams& lyap,
                                           const EquivalenceOptions& opts = {});

/// One inequality of the feasibility test. For upper bounds (lhs < rhs) the
/// margin is rhs - lhs, for lower bounds (lhs > rhs) it is lhs - rhs; the
/// two-sided beam-length condition 0 < L < 2 uses min(L, 2 - L). Strict
/// inequalities throughout: margin <= 0 (or NaN) means unsatisfied.
struct Condition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double margin = 0.0;
};

struct ConditionReport {
    std::vector<Condition> rows;
    bool feasible = false;
};

/// Evaluates every feasibility inequality: the L-range, the two delta
/// bounds, the four-term lower bound on Ce, the two-term upper bounds on
/// eps1 and eps2, and the lower bounds on N1 and N2. Infeasibility is
/// reported, never thrown.
ConditionReport check_feasibility(const MaterialParams& mat, const GainSet& gains,
                             const LyapunovParams& lyap);

struct Certificate {
    LyapunovParams params;
    EquivalenceConstants constants;
};

/// Deterministic log-spaced grid search over (eps1, eps2), seven decades at
/// eight points per decade below the feasibility upper bounds; N1, N2 are
/// set just above their lower bounds, delta_i just below 2*eps2*rho (resp.
/// mu), Ce just above its lower bound. Maximizes omega over candidates that
/// pass check_feasibility and yield p1 > 0. `budget` caps the number of candidate
/// evaluations. Throws InfeasibleError when no candidate qualifies.
Certificate search_certificate(const MaterialParams& mat, const GainSet& gains,
                               long budget = 3136, const EquivalenceOptions& opts = {});

}  // namespace pzbeam

#endif
