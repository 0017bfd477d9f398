#include <doctest.h>

#include <cmath>

#include "pzbeam/diagnostics.hpp"
#include "pzbeam/integrator.hpp"
#include "test_helpers.hpp"

using namespace pzbeam;

namespace {

SemiDiscreteSystem make_system(const GainSet& g, int N, double gamma_override = -1.0) {
    MaterialInput raw = test::paper_material_input();
    if (gamma_override >= 0.0) raw.gamma = gamma_override;
    return assemble(validate_material(raw), g, build_grid(raw.L, N));
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("zero state is an equilibrium") {
    const SemiDiscreteSystem sys = make_system(test::paper_gains(), 10);
    SimState z;
    z.u = Eigen::VectorXd::Zero(sys.size());
    z.v = Eigen::VectorXd::Zero(sys.size());
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 1.0;
    const SimState next = step(sys, z, cfg);
    CHECK(next.u.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(next.v.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(next.t == doctest::Approx(1e-3));
}

TEST_CASE("one conservative step preserves the discrete energy to 1e-12") {
    const SemiDiscreteSystem sys = make_system(test::zero_gains(), 30);
    InitialConditions ic;
    ic.mismatch_scale = 0.5;
    const SimState s0 = make_initial_state(sys, ic);
    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 1.0;
    const SimState s1 = step(sys, s0, cfg);
    const double e0 = discrete_energy(sys, s0).E_total;
    const double e1 = discrete_energy(sys, s1).E_total;
    CHECK(std::abs(e1 - e0) <= 1e-12 * e0);
}

TEST_CASE("analytic oracle: decoupled free cosine mode") {
    // gamma = 0, zero gains: w solves the free wave equation with Neumann
    // ends; cos(pi x/L)cos(c pi t/L) is the separated-variables solution.
    const SemiDiscreteSystem sys = make_system(test::zero_gains(), 30, 0.0);
    const int nn = sys.node_count();
    SimState s;
    s.u = Eigen::VectorXd::Zero(sys.size());
    s.v = Eigen::VectorXd::Zero(sys.size());
    for (int j = 0; j < nn; ++j) {
        s.u[sys.index(FieldHatW, j)] = std::cos(M_PI * sys.grid.nodes[j]);
    }
    project_consistent(sys, s);

    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 1.0;
    cfg.snapshot_stride = 1 << 28;
    const std::vector<SimState> snaps = simulate(sys, s, cfg);
    const SimState& sT = snaps.back();

    const double c = std::sqrt(sys.mat.alpha / sys.mat.rho);
    double err = 0.0;
    for (int j = 0; j < nn; ++j) {
        const double exact = std::cos(M_PI * sys.grid.nodes[j]) * std::cos(c * M_PI * 1.0);
        err = std::max(err, std::abs(sT.u[sys.index(FieldHatW, j)] - exact));
    }
    const double tol = 5.0 * (cfg.dt * cfg.dt + sys.grid.h * sys.grid.h);
    CHECK(err <= tol);
    // other fields stay identically zero
    CHECK(sT.u.segment(sys.offset(FieldHatP), nn).lpNorm<Eigen::Infinity>() < 1e-12);
}

// The error energy obeys E_e' = -k1 e1_t(0)^2 - k3 e2_t(0)^2 exactly, so it
// is non-increasing for ANY nonnegative gains. The total energy additionally
// carries the sign-indefinite observer-injection cross terms
// -hat_w_t(0)(k1 e1_t(0) + k2 e1(0)) - ..., so its pointwise monotonicity
// holds in the output-injection regime (small k1..k4, as in the reference
// gain set) but not for arbitrary positive gains; see the counterexample
// case below.
TEST_CASE("property: E_e monotone for any gains; E_total monotone for small injection") {
    for (int trial = 0; trial < 5; ++trial) {
        GainSet g;
        g.k1 = std::pow(10.0, test::uniform(-8.0, -4.0));
        g.k2 = std::pow(10.0, test::uniform(-9.0, -4.0));
        g.k3 = std::pow(10.0, test::uniform(-8.0, -4.0));
        g.k4 = std::pow(10.0, test::uniform(-8.0, -4.0));
        g.k5 = std::pow(10.0, test::uniform(-2.0, 2.0));
        g.k6 = std::pow(10.0, test::uniform(-3.0, 0.0));
        g.k7 = std::pow(10.0, test::uniform(-2.0, 1.5));
        g.k8 = std::pow(10.0, test::uniform(-3.0, 0.0));
        const SemiDiscreteSystem sys = make_system(g, 14);
        InitialConditions ic;
        ic.kmin = 1;
        ic.kmax = 6;
        ic.mismatch_scale = 0.4;
        StepperConfig cfg;
        cfg.dt = sys.grid.h / 10.0;
        cfg.T = 1.5;
        cfg.snapshot_stride = 5;
        const std::vector<SimState> snaps = simulate(sys, make_initial_state(sys, ic), cfg);
        const double E0 = discrete_energy(sys, snaps.front()).E_total;
        double prev_t = E0;
        double prev_e = discrete_energy(sys, snaps.front()).E_e;
        for (const SimState& st : snaps) {
            const EnergyBreakdown e = discrete_energy(sys, st);
            CHECK(e.E_total <= prev_t + 1e-10 * E0);
            CHECK(e.E_e <= prev_e + 1e-12 * E0);
            prev_t = e.E_total;
            prev_e = e.E_e;
        }
    }
}

TEST_CASE("counterexample: O(1) injection gains break E_total monotonicity, not E_e") {
    GainSet g = test::matched_gains();  // k1..k4 of order one
    const SemiDiscreteSystem sys = make_system(g, 14);
    InitialConditions ic;
    ic.kmin = 1;
    ic.kmax = 6;
    ic.mismatch_scale = 0.4;
    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 1.5;
    cfg.snapshot_stride = 5;
    const std::vector<SimState> snaps = simulate(sys, make_initial_state(sys, ic), cfg);
    const double E0 = discrete_energy(sys, snaps.front()).E_total;
    double max_total_inc = -1e300;
    double prev_t = E0;
    double prev_e = discrete_energy(sys, snaps.front()).E_e;
    bool e_monotone = true;
    for (const SimState& st : snaps) {
        const EnergyBreakdown e = discrete_energy(sys, st);
        max_total_inc = std::max(max_total_inc, e.E_total - prev_t);
        e_monotone = e_monotone && e.E_e <= prev_e + 1e-12 * E0;
        prev_t = e.E_total;
        prev_e = e.E_e;
    }
    CHECK(e_monotone);             // the error identity is unconditional
    CHECK(max_total_inc > 1e-10 * E0);  // but E_total genuinely rises somewhere
    // overall the run still decays
    CHECK(discrete_energy(sys, snaps.back()).E_total < 0.9 * E0);
}

TEST_CASE("time reversal at zero gains returns the initial state") {
    const SemiDiscreteSystem sys = make_system(test::zero_gains(), 12);
    InitialConditions ic;
    ic.kmin = 1;
    ic.kmax = 4;
    ic.mismatch_scale = 0.3;
    const SimState s0 = make_initial_state(sys, ic);

    const int nsteps = 100;
    const double dt = sys.grid.h / 10.0;
    const Stepper fwd(sys, dt);
    const Stepper bwd(sys, -dt);
    SimState s = s0;
    for (int k = 0; k < nsteps; ++k) s = fwd.step(s);
    for (int k = 0; k < nsteps; ++k) s = bwd.step(s);
    const double scale = s0.u.lpNorm<Eigen::Infinity>() + s0.v.lpNorm<Eigen::Infinity>();
    CHECK((s.u - s0.u).lpNorm<Eigen::Infinity>() <= 1e-8 * scale);
    CHECK((s.v - s0.v).lpNorm<Eigen::Infinity>() <= 1e-8 * scale);
}

TEST_CASE("mismatch 0 keeps the error fields at zero") {
    const SemiDiscreteSystem sys = make_system(test::paper_gains(), 30);
    InitialConditions ic;  // mismatch_scale = 0
    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 2.0;
    const std::vector<SimState> snaps = simulate(sys, make_initial_state(sys, ic), cfg);
    const int nn = sys.node_count();
    for (const SimState& st : snaps) {
        CHECK(st.u.segment(sys.offset(FieldE1), 2 * nn).lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK(st.v.segment(sys.offset(FieldE1), 2 * nn).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("all four fields decay toward zero on the reference mismatch run") {
    const SemiDiscreteSystem sys = make_system(test::paper_gains(), 30);
    InitialConditions ic;
    ic.mismatch_scale = 0.5;
    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 5.0;
    const auto snaps = simulate(sys, make_initial_state(sys, ic), cfg);
    const int nn = sys.node_count();
    for (int f = 0; f < 4; ++f) {
        const double m0 =
            snaps.front().u.segment(f * nn, nn).lpNorm<Eigen::Infinity>();
        const double mT = snaps.back().u.segment(f * nn, nn).lpNorm<Eigen::Infinity>();
        CHECK(mT < m0);
    }
}

TEST_CASE("pure time refinement: Richardson factor 4 on a consistent eigenmode") {
    const SemiDiscreteSystem sys = make_system(test::zero_gains(), 14, 0.0);
    SimState s0;
    s0.u = Eigen::VectorXd::Zero(sys.size());
    s0.v = Eigen::VectorXd::Zero(sys.size());
    for (int j = 0; j < sys.node_count(); ++j) {
        s0.u[sys.index(FieldHatW, j)] = std::cos(M_PI * sys.grid.nodes[j]);
    }
    auto final_state = [&](double dt) {
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.T = 1.0;
        cfg.snapshot_stride = 1 << 28;
        return simulate(sys, s0, cfg).back();
    };
    auto enorm = [&](const SimState& x, const SimState& y) {
        const Eigen::VectorXd du = x.u - y.u, dv = x.v - y.v;
        return std::sqrt(0.5 * dv.dot(sys.Mh * dv) + 0.5 * du.dot(sys.Kh * du));
    };
    const double dt0 = sys.grid.h / 4.0;
    const SimState a = final_state(dt0);
    const SimState b = final_state(dt0 / 2.0);
    const SimState c = final_state(dt0 / 4.0);
    const double ratio = enorm(a, b) / enorm(b, c);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("pure time refinement on the damped mismatch run (DAE order reduction)") {
    // With the singular mass the slaved alternating coordinates oscillate at
    // a sub-dt^2 local order and feed weakly back into the physical fields,
    // so the pure-dt Richardson ratio lands below the clean factor 4 (the
    // joint (dt, h) refinements of the acceptance suite are unaffected).
    const SemiDiscreteSystem sys = make_system(test::paper_gains(), 14);
    InitialConditions ic;
    ic.kmin = 1;
    ic.kmax = 2;
    ic.mismatch_scale = 0.5;
    const SimState s0 = make_initial_state(sys, ic);
    auto final_state = [&](double dt) {
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.T = 1.0;
        cfg.snapshot_stride = 1 << 28;
        return simulate(sys, s0, cfg).back();
    };
    auto enorm = [&](const SimState& x, const SimState& y) {
        const Eigen::VectorXd du = x.u - y.u, dv = x.v - y.v;
        return std::sqrt(0.5 * dv.dot(sys.Mh * dv) + 0.5 * du.dot(sys.Kh * du));
    };
    const double dt0 = sys.grid.h / 10.0;
    const SimState a = final_state(dt0);
    const SimState b = final_state(dt0 / 2.0);
    const SimState c = final_state(dt0 / 4.0);
    const double ratio = enorm(a, b) / enorm(b, c);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 4.5);
}

TEST_CASE("T = 0 returns the initial snapshot only") {
    const SemiDiscreteSystem sys = make_system(test::paper_gains(), 10);
    const SimState s0 = make_initial_state(sys, InitialConditions{});
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 0.0;
    const std::vector<SimState> snaps = simulate(sys, s0, cfg);
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].t == 0.0);
    CHECK((snaps[0].u - s0.u).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("error dynamics are independent of the observer state") {
    // Same mismatch, different observer data: identical error trajectories.
    const SemiDiscreteSystem sys = make_system(test::paper_gains(), 10);
    InitialConditions ic;
    ic.kmin = 1;
    ic.kmax = 4;
    ic.mismatch_scale = 0.5;
    SimState a = make_initial_state(sys, ic);
    SimState b = a;
    const int nn = sys.node_count();
    for (int j = 0; j < nn; ++j) {
        b.u[sys.index(FieldHatW, j)] += 0.3 * std::cos(M_PI * sys.grid.nodes[j]);
    }
    project_consistent(sys, b);
    // the projection must not have touched the error displacement content
    StepperConfig cfg;
    cfg.dt = sys.grid.h / 10.0;
    cfg.T = 1.0;
    cfg.snapshot_stride = 10;
    const auto sa = simulate(sys, a, cfg);
    const auto sb = simulate(sys, b, cfg);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        const auto ea = sa[i].u.segment(sys.offset(FieldE1), 2 * nn);
        const auto eb = sb[i].u.segment(sys.offset(FieldE1), 2 * nn);
        CHECK((ea - eb).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("self-convergence at order 2 on nested grids") {
    // Conservative smooth-data ladder; boundary-compatible, so the scheme's
    // order is visible (see convergence.cfg notes).
    InitialConditions ic;
    ic.kmin = 1;
    ic.kmax = 2;
    ic.mismatch_scale = 0.5;
    struct Sol {
        SemiDiscreteSystem sys;
        SimState final;
    };
    std::vector<Sol> sols;
    for (int N : {30, 61, 123}) {
        SemiDiscreteSystem sys = make_system(test::zero_gains(), N);
        StepperConfig cfg;
        cfg.dt = sys.grid.h / 10.0;
        cfg.T = 1.0;
        cfg.snapshot_stride = 1 << 28;
        const auto snaps = simulate(sys, make_initial_state(sys, ic), cfg);
        sols.push_back(Sol{std::move(sys), snaps.back()});
    }
    const SemiDiscreteSystem& base = sols[0].sys;
    const int nn0 = base.node_count();
    auto restrict = [&](const SimState& st, int nnf, int fac) {
        SimState out;
        out.u = Eigen::VectorXd::Zero(4 * nn0);
        out.v = Eigen::VectorXd::Zero(4 * nn0);
        for (int f = 0; f < 4; ++f)
            for (int j = 0; j < nn0; ++j) {
                out.u[f * nn0 + j] = st.u[f * nnf + j * fac];
                out.v[f * nn0 + j] = st.v[f * nnf + j * fac];
            }
        return out;
    };
    auto enorm = [&](const SimState& a, const SimState& b) {
        const Eigen::VectorXd du = a.u - b.u, dv = a.v - b.v;
        return std::sqrt(0.5 * dv.dot(base.Mh * dv) + 0.5 * du.dot(base.Kh * du));
    };
    const SimState r1 = restrict(sols[1].final, sols[1].sys.node_count(), 2);
    const SimState r2 = restrict(sols[2].final, sols[2].sys.node_count(), 4);
    const double d01 = enorm(sols[0].final, r1);
    const double d12 = enorm(r1, r2);
    CHECK(std::log2(d01 / d12) >= 1.8);
}

}  // TEST_SUITE
