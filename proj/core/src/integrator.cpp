#include "pzbeam/integrator.hpp"

#include <cmath>

namespace pzbeam {

namespace {

Eigen::Matrix4d kernel_gram(const SemiDiscreteSystem& sys, const Eigen::MatrixXd& Nbasis) {
    return Nbasis.transpose() * (sys.Keff * Nbasis);
}

Eigen::MatrixXd kernel_basis(const SemiDiscreteSystem& sys) {
    Eigen::MatrixXd N(sys.size(), 4);
    for (int f = 0; f < 4; ++f) N.col(f) = sys.alternating_vector(static_cast<Field>(f));
    return N;
}

}  // namespace

void project_consistent(const SemiDiscreteSystem& sys, SimState& state) {
    const Eigen::MatrixXd N = kernel_basis(sys);
    const Eigen::Matrix4d Kc = kernel_gram(sys, N);
    const Eigen::PartialPivLU<Eigen::Matrix4d> lu(Kc);
    // Hidden (velocity-level) constraint first, then the position-level one
    // with the corrected velocity.
    const Eigen::Vector4d b = lu.solve(-(N.transpose() * (sys.Keff * state.v)));
    state.v += N * b;
    const Eigen::Vector4d a =
        lu.solve(-(N.transpose() * (sys.Keff * state.u + sys.Deff * state.v)));
    state.u += N * a;
}

SimState make_initial_state(const SemiDiscreteSystem& sys, const InitialConditions& ic) {
    const int nn = sys.node_count();
    SimState state;
    state.t = 0.0;
    state.u = Eigen::VectorXd::Zero(sys.size());
    state.v = Eigen::VectorXd::Zero(sys.size());

    Eigen::VectorXd profile(nn);
    for (int j = 0; j < nn; ++j) {
        profile[j] =
            initial_profile(sys.grid.nodes[j], ic.amplitude, ic.kmin, ic.kmax, sys.grid.L);
    }

    const double s = ic.mismatch_scale;
    state.u.segment(sys.offset(FieldHatW), nn) = (1.0 - s) * profile;
    state.u.segment(sys.offset(FieldHatP), nn) = (1.0 - s) * profile;
    state.v.segment(sys.offset(FieldHatW), nn) = profile;
    state.v.segment(sys.offset(FieldHatP), nn) = profile;
    state.u.segment(sys.offset(FieldE1), nn) = -s * profile;
    state.u.segment(sys.offset(FieldE2), nn) = -s * profile;
    // e velocities stay zero: observer mismatch scales displacements only.

    project_consistent(sys, state);
    return state;
}

Stepper::Stepper(const SemiDiscreteSystem& system, double dt, double solve_tol)
    : system_(&system), dt_(dt), solve_tol_(solve_tol) {
    if (dt == 0.0 || !std::isfinite(dt)) throw SolveFailureError("dt must be finite and nonzero");
    S_ = 2.0 * system.Mh + dt * system.Deff + 0.5 * dt * dt * system.Keff;
    lu_.compute(S_);
}

SimState Stepper::step(const SimState& state) const {
    const SemiDiscreteSystem& sys = *system_;
    const Eigen::VectorXd rhs = 2.0 * (sys.Mh * state.v) - dt_ * (sys.Keff * state.u);
    const Eigen::VectorXd vbar = lu_.solve(rhs);
    const double resid = (S_ * vbar - rhs).lpNorm<Eigen::Infinity>();
    if (!(resid <= solve_tol_ * (rhs.lpNorm<Eigen::Infinity>() + 1.0)) || !vbar.allFinite()) {
        throw SolveFailureError("implicit midpoint solve failed the residual check");
    }
    SimState next;
    next.t = state.t + dt_;
    next.u = state.u + dt_ * vbar;
    next.v = 2.0 * vbar - state.v;
    return next;
}

SimState step(const SemiDiscreteSystem& system, const SimState& state, const StepperConfig& cfg) {
    return Stepper(system, cfg.dt, cfg.solve_tol).step(state);
}

std::vector<SimState> simulate(const SemiDiscreteSystem& system, const SimState& initial,
                               const StepperConfig& cfg) {
    if (!(cfg.T >= 0.0)) throw NonPositiveParameterError("T must be >= 0");
    std::vector<SimState> snaps;
    snaps.push_back(initial);
    if (cfg.T == 0.0) return snaps;
    if (!(cfg.dt > 0.0) || cfg.dt > cfg.T) {
        throw NonPositiveParameterError("need 0 < dt <= T");
    }
    const int stride = cfg.snapshot_stride > 0 ? cfg.snapshot_stride : 1;

    long nsteps = std::lround(cfg.T / cfg.dt);
    double last_dt = 0.0;  // shortened final step when dt does not divide T
    if (std::abs(nsteps * cfg.dt - cfg.T) > 1e-9 * std::max(cfg.T, 1.0)) {
        nsteps = static_cast<long>(std::floor(cfg.T / cfg.dt));
        last_dt = cfg.T - nsteps * cfg.dt;
    }

    const Stepper stepper(system, cfg.dt, cfg.solve_tol);
    SimState state = initial;
    for (long k = 0; k < nsteps; ++k) {
        state = stepper.step(state);
        state.t = (k + 1) * cfg.dt;
        const bool last = (k + 1 == nsteps) && last_dt == 0.0;
        if ((k + 1) % stride == 0 || last) snaps.push_back(state);
    }
    if (last_dt > 0.0) {
        const Stepper tail(system, last_dt, cfg.solve_tol);
        state = tail.step(state);
        state.t = cfg.T;
        snaps.push_back(state);
    }
    return snaps;
}

std::vector<SimState> simulate(const MaterialParams& mat, const GainSet& gains, const Grid& grid,
                               const InitialConditions& ic, const StepperConfig& cfg) {
    const SemiDiscreteSystem sys = assemble(mat, gains, grid);
    return simulate(sys, make_initial_state(sys, ic), cfg);
}

FieldSnapshot split_state(const SemiDiscreteSystem& sys, const SimState& state) {
    const int nn = sys.node_count();
    FieldSnapshot s;
    s.t = state.t;
    s.h = sys.grid.h;
    s.hat_w = state.u.segment(sys.offset(FieldHatW), nn);
    s.hat_p = state.u.segment(sys.offset(FieldHatP), nn);
    s.e1 = state.u.segment(sys.offset(FieldE1), nn);
    s.e2 = state.u.segment(sys.offset(FieldE2), nn);
    s.hat_w_t = state.v.segment(sys.offset(FieldHatW), nn);
    s.hat_p_t = state.v.segment(sys.offset(FieldHatP), nn);
    s.e1_t = state.v.segment(sys.offset(FieldE1), nn);
    s.e2_t = state.v.segment(sys.offset(FieldE2), nn);
    return s;
}

}  // namespace pzbeam
