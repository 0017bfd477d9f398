#include "pzbeam/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pzbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Condition upper_bound(std::string name, double lhs, double rhs) {
    const double margin = rhs - lhs;
    return Condition{std::move(name), lhs, rhs, margin > 0.0, margin};
}

Condition lower_bound(std::string name, double lhs, double rhs) {
    const double margin = lhs - rhs;
    return Condition{std::move(name), lhs, rhs, margin > 0.0, margin};
}

/// Shared pieces of the equivalence constants C1, C2.
struct C12 {
    double C1;
    double C2;
};

C12 evaluate_c12(const MaterialParams& m, const GainSet& g, double N1, double N2,
                 const EquivalenceOptions& opts) {
    const double L = m.L;
    const double s1 = std::sqrt(m.rho / m.alpha1) + std::sqrt(m.mu * m.gamma * m.gamma / m.alpha1);
    const double s2 = std::sqrt(m.mu / m.beta) + std::sqrt(m.mu * m.gamma * m.gamma / m.alpha1);

    const double n11 = opts.printed_numerators ? 1.0 + g.k1 : m.rho + g.k1;
    const double n13 = opts.printed_numerators ? 1.0 + g.k3 : m.mu + g.k3;
    const double C1 = L * std::max(s1, s2) + N1 * std::max({n11 / g.k2, n13 / g.k4, L});

    const double n25 = opts.printed_numerators ? 1.0 / m.rho + g.k5 : m.rho + g.k5;
    const double n27 = opts.printed_numerators ? 1.0 / m.mu + g.k7 : m.mu + g.k7;
    const double C2 =
        3.0 * L *
            std::max({s1, s2, 2.0 * m.gamma * m.gamma / m.alpha1 + 1.0 / m.beta, 2.0 / m.alpha1}) +
        N2 * std::max({n25 / g.k6, n27 / g.k8, L});
    return {C1, C2};
}

}  // namespace

bool GainSet::all_positive() const {
    for (double k : as_array()) {
        if (!(k > 0.0) || !std::isfinite(k)) return false;
    }
    return true;
}

bool GainSet::all_finite_nonnegative() const {
    for (double k : as_array()) {
        if (!(k >= 0.0) || !std::isfinite(k)) return false;
    }
    return true;
}

GainMatrices gain_matrices(const GainSet& g) {
    if (!g.all_finite_nonnegative()) {
        throw NegativeGainError("feedback gains must be finite and nonnegative");
    }
    GainMatrices gm;
    gm.K13 << g.k1, 0.0, 0.0, g.k3;
    gm.K24 << g.k2, 0.0, 0.0, g.k4;
    gm.K57 << g.k5, 0.0, 0.0, g.k7;
    gm.K68 << g.k6, 0.0, 0.0, g.k8;
    return gm;
}

EquivalenceConstants equivalence_constants(const MaterialParams& m, const GainSet& g,
                                           const LyapunovParams& lyap,
                                           const EquivalenceOptions& opts) {
    if (!g.all_positive()) {
        throw NegativeGainError("equivalence constants require strictly positive gains");
    }
    const C12 c = evaluate_c12(m, g, lyap.N1, lyap.N2, opts);
    if (lyap.eps1 * c.C1 >= 1.0 || lyap.eps2 * c.C2 >= 1.0) {
        throw EquivalenceViolatedError("eps1*C1 >= 1 or eps2*C2 >= 1: p1 would be nonpositive");
    }
    EquivalenceConstants out;
    out.C1 = c.C1;
    out.C2 = c.C2;
    out.p1 = std::min(lyap.Ce * (1.0 - lyap.eps1 * c.C1), 1.0 - lyap.eps2 * c.C2);
    out.p2 = std::max(lyap.Ce * (1.0 + lyap.eps1 * c.C1), 1.0 + lyap.eps2 * c.C2);
    out.omega = std::min(lyap.eps1 * (1.0 - m.L / 2.0) / (1.0 + c.C1 * lyap.eps1),
                         (2.0 * lyap.eps2 / 3.0) / (1.0 + c.C2 * lyap.eps2));
    return out;
}

ConditionReport check_feasibility(const MaterialParams& m, const GainSet& g,
                             const LyapunovParams& y) {
    const double L = m.L;
    ConditionReport rep;

    // 0 < L < 2, reported as one two-sided row.
    {
        const double margin = std::min(L, 2.0 - L);
        rep.rows.push_back(Condition{"L_range", L, 2.0, margin > 0.0, margin});
    }
    rep.rows.push_back(upper_bound("delta1", y.delta1, 2.0 * y.eps2 * m.rho));
    rep.rows.push_back(upper_bound("delta2", y.delta2, 2.0 * y.eps2 * m.mu));

    // Four-term lower bound on Ce. The denominators are the damping-budget
    // coefficients; when one of them is nonpositive no Ce can work.
    {
        const double a1 = std::abs(1.0 / y.delta1 + y.eps2 * y.N2 * y.N2 +
                                   m.gamma * m.gamma * y.eps2 / m.alpha1 - 2.0 * y.eps2 / m.alpha1);
        const double a2 = std::abs(1.0 / y.delta2 + y.eps2 * y.N2 * y.N2 +
                                   2.0 * y.eps2 * m.gamma * m.gamma / m.alpha1 -
                                   2.0 * y.eps2 / m.beta);
        const double d1 =
            g.k1 - y.eps1 * ((m.rho / 2.0 + 2.0 * g.k1 * g.k1 / m.alpha1) * L + y.N1 * y.N1 * m.rho);
        const double d2 = y.eps1 * (y.N1 * g.k2 - (g.k2 / 2.0 + L * g.k2 * g.k2 / m.alpha1));
        const double d3 =
            g.k3 - y.eps1 * ((m.mu / 2.0 + (m.alpha / (m.alpha1 * m.beta)) * g.k3 * g.k3) * L +
                             m.mu * y.N1 * y.N1);
        const double d4 = y.eps1 * (y.N1 * g.k4 -
                                    (g.k4 / 2.0 + (m.alpha * L / (m.alpha1 * m.beta)) * g.k4 * g.k4));
        double bound = kInf;
        if (d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0) {
            bound = std::max({g.k1 * g.k1 * a1 / d1, g.k2 * g.k2 * a1 / d2, g.k3 * g.k3 * a2 / d3,
                              g.k4 * g.k4 * a2 / d4});
        }
        rep.rows.push_back(lower_bound("Ce", y.Ce, bound));
    }
    {
        const double b1 =
            g.k1 / ((m.rho / 2.0 + 2.0 * g.k1 * g.k1 / m.alpha1) * L + m.rho * y.N1 * y.N1);
        const double b2 =
            g.k3 / ((m.mu / 2.0 + ((m.alpha1 + 2.0 * m.gamma * m.gamma * m.beta) /
                                   (m.alpha1 * m.beta)) *
                                      g.k3 * g.k3) *
                        L +
                    m.mu * y.N1 * y.N1);
        rep.rows.push_back(upper_bound("eps1", y.eps1, std::min(b1, b2)));
    }
    {
        const double num = 2.0 / (3.0 * g.k7);
        const double b1 =
            num / (L * (m.rho * (1.0 + y.N1 * y.N1) + 2.0 * g.k5 * g.k5 / m.alpha1));
        const double b2 =
            num / (L * (m.mu * (1.0 + y.N2 * y.N2) +
                        (2.0 * m.gamma * m.gamma / m.alpha1 + 1.0 / m.beta) * g.k7 * g.k7));
        rep.rows.push_back(upper_bound("eps2", y.eps2, std::min(b1, b2)));
    }
    rep.rows.push_back(lower_bound(
        "N1", y.N1,
        0.5 + L * std::max(g.k2 / m.alpha1, m.alpha * g.k4 / (m.alpha1 * m.beta))));
    rep.rows.push_back(lower_bound(
        "N2", y.N2,
        0.5 + std::max(1.0 / (2.0 * g.k6) + 3.0 * L * g.k6 / m.alpha1,
                       1.0 / (2.0 * g.k8) + 3.0 * L * (m.alpha + m.gamma * m.gamma * m.beta) *
                                                g.k8 / (2.0 * m.alpha1 * m.beta))));

    rep.feasible = std::all_of(rep.rows.begin(), rep.rows.end(),
                               [](const Condition& c) { return c.satisfied; });
    return rep;
}

Certificate search_certificate(const MaterialParams& m, const GainSet& g, long budget,
                               const EquivalenceOptions& opts) {
    if (!g.all_positive()) {
        throw InfeasibleError("certification requires strictly positive gains");
    }

    // N1, N2 just above their lower bounds (omega decreases with them),
    // delta_i just below their upper bounds, Ce just above its lower bound:
    // the only genuinely free trade-off is (eps1, eps2).
    const double nudge = 1e-6;
    const double N1 =
        (1.0 + nudge) *
        (0.5 + m.L * std::max(g.k2 / m.alpha1, m.alpha * g.k4 / (m.alpha1 * m.beta)));
    const double N2 =
        (1.0 + nudge) *
        (0.5 + std::max(1.0 / (2.0 * g.k6) + 3.0 * m.L * g.k6 / m.alpha1,
                        1.0 / (2.0 * g.k8) + 3.0 * m.L * (m.alpha + m.gamma * m.gamma * m.beta) *
                                                 g.k8 / (2.0 * m.alpha1 * m.beta)));

    const double e1_top =
        std::min(g.k1 / ((m.rho / 2.0 + 2.0 * g.k1 * g.k1 / m.alpha1) * m.L + m.rho * N1 * N1),
                 g.k3 / ((m.mu / 2.0 + ((m.alpha1 + 2.0 * m.gamma * m.gamma * m.beta) /
                                        (m.alpha1 * m.beta)) *
                                           g.k3 * g.k3) *
                             m.L +
                         m.mu * N1 * N1));
    const double e2_top = std::min(
        (2.0 / (3.0 * g.k7)) /
            (m.L * (m.rho * (1.0 + N1 * N1) + 2.0 * g.k5 * g.k5 / m.alpha1)),
        (2.0 / (3.0 * g.k7)) /
            (m.L * (m.mu * (1.0 + N2 * N2) +
                    (2.0 * m.gamma * m.gamma / m.alpha1 + 1.0 / m.beta) * g.k7 * g.k7)));
    if (!(e1_top > 0.0) || !(e2_top > 0.0) || !std::isfinite(e1_top) || !std::isfinite(e2_top)) {
        throw InfeasibleError("eps upper bounds are degenerate for this gain set");
    }

    // Seven decades, eight points per decade, largest candidates first.
    constexpr int kPoints = 56;
    bool found = false;
    Certificate best{};
    long evals = 0;
    for (int i = 0; i < kPoints && evals < budget; ++i) {
        const double eps1 = e1_top * (1.0 - 1e-9) * std::pow(10.0, -i / 8.0);
        for (int j = 0; j < kPoints && evals < budget; ++j) {
            const double eps2 = e2_top * (1.0 - 1e-9) * std::pow(10.0, -j / 8.0);
            ++evals;

            LyapunovParams cand;
            cand.eps1 = eps1;
            cand.eps2 = eps2;
            cand.N1 = N1;
            cand.N2 = N2;
            cand.delta1 = (1.0 - nudge) * 2.0 * eps2 * m.rho;
            cand.delta2 = (1.0 - nudge) * 2.0 * eps2 * m.mu;
            cand.Ce = 1.0;
            ConditionReport rep = check_feasibility(m, g, cand);
            const Condition& ce_row = rep.rows[3];
            if (!std::isfinite(ce_row.rhs)) continue;
            cand.Ce = (1.0 + nudge) * ce_row.rhs;
            rep = check_feasibility(m, g, cand);
            if (!rep.feasible) continue;

            EquivalenceConstants eq;
            try {
                eq = equivalence_constants(m, g, cand, opts);
            } catch (const EquivalenceViolatedError&) {
                continue;
            }
            if (!(eq.p1 > 0.0)) continue;
            if (!found || eq.omega > best.constants.omega) {
                best = Certificate{cand, eq};
                found = true;
            }
        }
    }
    if (!found) {
        throw InfeasibleError("no feasible certificate within the search budget");
    }
    return best;
}

}  // namespace pzbeam
