#include "pzbeam/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace pzbeam {

namespace {

double quad_form(const Eigen::MatrixXd& Q, const Eigen::VectorXd& x) {
    return 0.5 * x.dot(Q * x);
}

double trapezoid(const Eigen::VectorXd& f, double h) {
    const int n = static_cast<int>(f.size());
    double s = 0.5 * (f[0] + f[n - 1]);
    for (int j = 1; j < n - 1; ++j) s += f[j];
    return s * h;
}

/// Central differences, one-sided at the ends.
Eigen::VectorXd gradient(const Eigen::VectorXd& f, double h) {
    const int n = static_cast<int>(f.size());
    Eigen::VectorXd g(n);
    g[0] = (f[1] - f[0]) / h;
    for (int j = 1; j < n - 1; ++j) g[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    g[n - 1] = (f[n - 1] - f[n - 2]) / h;
    return g;
}

/// (1/2) integral of M vel.vel + A grad.grad for one field pair.
double pair_energy(const MaterialParams& m, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& at, const Eigen::VectorXd& bt, double h) {
    const Eigen::VectorXd ax = gradient(a, h);
    const Eigen::VectorXd bx = gradient(b, h);
    const double gb = m.gamma * m.beta;
    Eigen::VectorXd integrand =
        m.rho * at.array().square().matrix() + m.mu * bt.array().square().matrix() +
        m.alpha * ax.array().square().matrix() + m.beta * bx.array().square().matrix();
    integrand -= 2.0 * gb * (ax.array() * bx.array()).matrix();
    return 0.5 * trapezoid(integrand, h);
}

}  // namespace

EnergyBreakdown discrete_energy(const SemiDiscreteSystem& sys, const SimState& state) {
    const int half = 2 * sys.node_count();
    const GainSet& g = sys.gains;

    EnergyBreakdown out;
    out.E_hat = quad_form(sys.Mh.topLeftCorner(half, half), state.v.head(half)) +
                quad_form(sys.Kh.topLeftCorner(half, half), state.u.head(half)) +
                0.5 * g.k6 * std::pow(state.u[sys.index(FieldHatW, sys.node_count() - 1)], 2) +
                0.5 * g.k8 * std::pow(state.u[sys.index(FieldHatP, sys.node_count() - 1)], 2);
    out.E_e = quad_form(sys.Mh.bottomRightCorner(half, half), state.v.tail(half)) +
              quad_form(sys.Kh.bottomRightCorner(half, half), state.u.tail(half)) +
              0.5 * g.k2 * std::pow(state.u[sys.index(FieldE1, 0)], 2) +
              0.5 * g.k4 * std::pow(state.u[sys.index(FieldE2, 0)], 2);
    out.E_total = out.E_hat + out.E_e;
    return out;
}

EnergyBreakdown continuum_energy(const MaterialParams& mat, const GainSet& g,
                                 const FieldSnapshot& s) {
    const int n = static_cast<int>(s.hat_w.size());
    EnergyBreakdown out;
    out.E_hat = pair_energy(mat, s.hat_w, s.hat_p, s.hat_w_t, s.hat_p_t, s.h) +
                0.5 * g.k6 * s.hat_w[n - 1] * s.hat_w[n - 1] +
                0.5 * g.k8 * s.hat_p[n - 1] * s.hat_p[n - 1];
    out.E_e = pair_energy(mat, s.e1, s.e2, s.e1_t, s.e2_t, s.h) +
              0.5 * g.k2 * s.e1[0] * s.e1[0] + 0.5 * g.k4 * s.e2[0] * s.e2[0];
    out.E_total = out.E_hat + out.E_e;
    return out;
}

LyapunovBreakdown lyapunov_value(const MaterialParams& m, const GainSet& g,
                                 const LyapunovParams& y, const FieldSnapshot& s) {
    const int n = static_cast<int>(s.hat_w.size());
    const double h = s.h;
    const double L = m.L;
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x[j] = j * h;

    const Eigen::VectorXd e1x = gradient(s.e1, h), e2x = gradient(s.e2, h);
    const Eigen::VectorXd hwx = gradient(s.hat_w, h), hpx = gradient(s.hat_p, h);

    LyapunovBreakdown out;
    const Eigen::ArrayXd xmL = x.array() - L;
    const Eigen::ArrayXd xp2L = x.array() + 2.0 * L;

    out.psi[0] = m.rho * trapezoid((xmL * s.e1_t.array() * e1x.array()).matrix(), h);
    out.psi[1] = m.mu * trapezoid((xmL * s.e2_t.array() * e2x.array()).matrix(), h);
    out.psi[2] = m.rho * s.e1[0] * trapezoid(s.e1_t, h) + 0.5 * g.k1 * s.e1[0] * s.e1[0];
    out.psi[3] = m.mu * s.e2[0] * trapezoid(s.e2_t, h) + 0.5 * g.k3 * s.e2[0] * s.e2[0];
    out.psi[4] = m.rho * trapezoid((xp2L * s.hat_w_t.array() * hwx.array()).matrix(), h) -
                 (3.0 * L / m.alpha1) * g.k5 * g.k6 * s.hat_w[n - 1] * s.hat_w[n - 1] -
                 (3.0 * L / m.alpha1) * m.gamma * m.gamma * g.k7 * g.k8 * s.hat_p[n - 1] *
                     s.hat_p[n - 1];
    out.psi[5] = m.mu * trapezoid((xp2L * s.hat_p_t.array() * hpx.array()).matrix(), h) -
                 (3.0 * L / (2.0 * m.beta)) * g.k7 * g.k8 * s.hat_p[n - 1] * s.hat_p[n - 1];
    out.psi[6] = s.hat_w[n - 1] * trapezoid(s.hat_w_t, h) +
                 0.5 * g.k5 * s.hat_w_t[n - 1] * s.hat_w_t[n - 1];
    out.psi[7] = s.hat_p[n - 1] * trapezoid(s.hat_p_t, h) +
                 0.5 * g.k7 * s.hat_p_t[n - 1] * s.hat_p_t[n - 1];

    const EnergyBreakdown e = continuum_energy(m, g, s);
    out.E_hat = e.E_hat;
    out.E_e = e.E_e;
    out.L_e = e.E_e + y.eps1 * (out.psi[0] + out.psi[1] + y.N1 * (out.psi[2] + out.psi[3]));
    out.L_hat = e.E_hat + y.eps2 * (out.psi[4] + out.psi[5] + y.N2 * (out.psi[6] + out.psi[7]));
    out.L_total = y.Ce * out.L_e + out.L_hat;
    return out;
}

EnergyTrace build_trace(const SemiDiscreteSystem& sys, const std::vector<SimState>& snapshots,
                        const std::optional<Certificate>& cert) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EnergyTrace trace;
    trace.reserve(snapshots.size());
    double E0 = 0.0;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const SimState& st = snapshots[i];
        const EnergyBreakdown e = discrete_energy(sys, st);
        if (i == 0) E0 = e.E_total;
        TraceRow row;
        row.t = st.t;
        row.E_hat = e.E_hat;
        row.E_e = e.E_e;
        row.E_total = e.E_total;
        if (cert) {
            const FieldSnapshot snap = split_state(sys, st);
            row.L_value = lyapunov_value(sys.mat, sys.gains, cert->params, snap).L_total;
            row.bound_value = (cert->constants.p2 / cert->constants.p1) * E0 *
                              std::exp(-cert->constants.omega * st.t);
        } else {
            row.L_value = nan;
            row.bound_value = nan;
        }
        const int nn = sys.node_count();
        row.what_wL = st.u[sys.index(FieldHatW, nn - 1)];
        row.phat_pL = st.u[sys.index(FieldHatP, nn - 1)];
        row.e1_0 = st.u[sys.index(FieldE1, 0)];
        row.e2_0 = st.u[sys.index(FieldE2, 0)];
        trace.push_back(row);
    }
    return trace;
}

std::vector<double> dissipation_residual(const EnergyTrace& trace,
                                         const std::vector<double>& e1dot0,
                                         const std::vector<double>& e2dot0, const GainSet& g) {
    const std::size_t n = trace.size();
    if (n < 3) throw TraceTooShortError("dissipation residual needs at least 3 snapshots");
    if (e1dot0.size() != n || e2dot0.size() != n) {
        throw TraceTooShortError("boundary-velocity series length mismatch");
    }
    const double dt0 = trace[1].t - trace[0].t;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::abs((trace[i + 1].t - trace[i].t) - dt0) > 1e-9 * std::max(dt0, 1.0)) {
            throw TraceTooShortError("snapshot spacing is not uniform");
        }
    }
    std::vector<double> res(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dEdt = (trace[i + 1].E_e - trace[i - 1].E_e) / (trace[i + 1].t - trace[i - 1].t);
        res[i - 1] = dEdt + g.k1 * e1dot0[i] * e1dot0[i] + g.k3 * e2dot0[i] * e2dot0[i];
    }
    return res;
}

DecayFit decay_fit(const EnergyTrace& trace, double t0, double t1) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    long n = 0;
    for (const TraceRow& r : trace) {
        if (r.t < t0 || r.t > t1) continue;
        if (!(r.E_total > 0.0)) {
            throw NonPositiveEnergyError("decay fit window contains nonpositive energy");
        }
        const double y = std::log(r.E_total);
        st += r.t;
        sy += y;
        stt += r.t * r.t;
        sty += r.t * y;
        ++n;
    }
    if (n < 2) throw TraceTooShortError("decay fit window holds fewer than 2 snapshots");
    const double denom = n * stt - st * st;
    const double slope = denom != 0.0 ? (n * sty - st * sy) / denom : 0.0;
    const double intercept = (sy - slope * st) / n;

    DecayFit fit;
    fit.sigma = -slope;
    fit.prefactor = std::exp(intercept);
    fit.t0 = t0;
    fit.t1 = t1;
    double ss = 0.0;
    for (const TraceRow& r : trace) {
        if (r.t < t0 || r.t > t1) continue;
        const double d = std::log(r.E_total) - (intercept + slope * r.t);
        ss += d * d;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

BoundCheck bound_check(const EnergyTrace& trace, const EquivalenceConstants& c) {
    BoundCheck out;
    if (trace.empty()) return out;
    const double E0 = trace.front().E_total;
    double worst = std::numeric_limits<double>::infinity();
    for (const TraceRow& r : trace) {
        const double bound = (c.p2 / c.p1) * E0 * std::exp(-c.omega * r.t);
        const double margin = bound > 0.0 ? (bound - r.E_total) / bound : -1.0;
        worst = std::min(worst, margin);
    }
    out.worst_margin = worst;
    out.holds = worst >= 0.0;
    return out;
}

}  // namespace pzbeam
