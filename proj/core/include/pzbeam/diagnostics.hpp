#ifndef PZBEAM_DIAGNOSTICS_HPP
#define PZBEAM_DIAGNOSTICS_HPP

#include <array>
#include <optional>
#include <vector>

#include "pzbeam/gains.hpp"
#include "pzbeam/integrator.hpp"

namespace pzbeam {

struct EnergyBreakdown {
    double E_hat = 0.0;
    double E_e = 0.0;
    double E_total = 0.0;
};

/// Scheme-exact discrete energy: (h/2)-weighted A-quadratic of differenced
/// fields plus M-weighted averaged-velocity quadratic (i.e. the Mh/Kh
/// quadratic forms of the assembled system), plus the boundary position
/// terms (k6/2) hat_w(L)^2 + (k8/2) hat_p(L)^2 and (k2/2) e1(0)^2 +
/// (k4/2) e2(0)^2 evaluated at the boundary nodes. With this definition the
/// implicit-midpoint trace obeys the discrete dissipation identities
/// exactly (conservation at zero gains, E_e' = -k1 e1_t(0)^2 - k3 e2_t(0)^2).
EnergyBreakdown discrete_energy(const SemiDiscreteSystem& system, const SimState& state);

/// Trapezoidal quadrature of the continuum energy integrals (gradients by
/// central differences, one-sided at the ends) plus the same boundary terms.
EnergyBreakdown continuum_energy(const MaterialParams& mat, const GainSet& gains,
                                 const FieldSnapshot& snapshot);

/// All eight psi cross terms plus the assembled Lyapunov pieces:
/// L_e = E_e + eps1*(psi11 + psi12 + N1*(psi21 + psi22)),
/// L_hat = E_hat + eps2*(psi31 + psi32 + N2*(psi41 + psi42)),
/// L_total = Ce*L_e + L_hat. E_hat/E_e are the continuum-quadrature values
/// used in the assembly (returned for sandwich checks).
struct LyapunovBreakdown {
    double L_e = 0.0;
    double L_hat = 0.0;
    double L_total = 0.0;
    std::array<double, 8> psi{};  // psi11, psi12, psi21, psi22, psi31, psi32, psi41, psi42
    double E_hat = 0.0;
    double E_e = 0.0;
};

LyapunovBreakdown lyapunov_value(const MaterialParams& mat, const GainSet& gains,
                                 const LyapunovParams& lyap, const FieldSnapshot& snapshot);

struct TraceRow {
    double t = 0.0;
    double E_hat = 0.0;
    double E_e = 0.0;
    double E_total = 0.0;
    double L_value = 0.0;      // NaN when no certificate parameters are available
    double bound_value = 0.0;  // (p2/p1) E(0) exp(-omega t); NaN without certificate
    double what_wL = 0.0;      // hat_w(L, t)
    double phat_pL = 0.0;      // hat_p(L, t)
    double e1_0 = 0.0;         // e1(0, t)
    double e2_0 = 0.0;         // e2(0, t)
};

using EnergyTrace = std::vector<TraceRow>;

/// Discrete energies per snapshot; Lyapunov and bound columns filled when a
/// certificate is provided, NaN otherwise.
EnergyTrace build_trace(const SemiDiscreteSystem& system, const std::vector<SimState>& snapshots,
                        const std::optional<Certificate>& cert = std::nullopt);

/// Central-difference dE_e/dt compared with -k1 e1_t(0)^2 - k3 e2_t(0)^2 at
/// the interior snapshots. Requires at least three snapshots at uniform
/// spacing; the boundary-velocity series are sampled at the snapshot times.
std::vector<double> dissipation_residual(const EnergyTrace& trace,
                                         const std::vector<double>& e1dot0,
                                         const std::vector<double>& e2dot0, const GainSet& gains);

struct DecayFit {
    double sigma = 0.0;      // fitted exponential rate (1/s)
    double prefactor = 0.0;  // E(t) ~ prefactor * exp(-sigma t)
    double t0 = 0.0;
    double t1 = 0.0;
    double residual = 0.0;  // rms of log-residuals over the window
};

/// Least-squares line fit of ln E_total on [t0, t1]; sigma = -slope.
/// Throws NonPositiveEnergyError when the window contains E <= 0.
DecayFit decay_fit(const EnergyTrace& trace, double t0, double t1);

struct BoundCheck {
    bool holds = false;
    double worst_margin = 0.0;  // min over t of (bound - E)/bound
};

/// Checks E(t) <= (p2/p1) E(0) exp(-omega t) at every snapshot.
BoundCheck bound_check(const EnergyTrace& trace, const EquivalenceConstants& constants);

}  // namespace pzbeam

#endif
