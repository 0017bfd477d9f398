#include <doctest.h>

#include <cmath>

#include "pzbeam/diagnostics.hpp"
#include "pzbeam/integrator.hpp"
#include "pzbeam/spectral.hpp"
#include "test_helpers.hpp"

using namespace pzbeam;

TEST_SUITE("spectral") {

TEST_CASE("abscissa of an explicit matrix") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = -2.0;
    const SpectrumReport rep = spectral_abscissa(d);
    CHECK(rep.abscissa == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rep.eigenvalues.size() == 2);
}

TEST_CASE("first-order pencil has dimension 8(N+2)") {
    const Grid grid = build_grid(1.0, 10);
    const SemiDiscreteSystem sys = assemble(test::paper_material(), test::paper_gains(), grid);
    const FirstOrderSystem fo = first_order_system(sys);
    CHECK(fo.E.rows() == 8 * 12);
    CHECK(fo.A.rows() == 8 * 12);
}

TEST_CASE("velocity rows vanish on constant equilibria at zero gains") {
    const Grid grid = build_grid(1.0, 8);
    const SemiDiscreteSystem sys = assemble(test::paper_material(), test::zero_gains(), grid);
    const FirstOrderSystem fo = first_order_system(sys);
    const int n = sys.size();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * n);
    for (int f = 0; f < 4; ++f) {
        z.head(n) += (f + 1.0) * sys.constant_vector(static_cast<Field>(f));
    }
    const Eigen::VectorXd az = fo.A * z;
    CHECK(az.tail(n).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("zero gains: spectrum on the imaginary axis within 1e-8") {
    const Grid grid = build_grid(1.0, 10);
    const SemiDiscreteSystem sys = assemble(test::paper_material(), test::zero_gains(), grid);
    const SpectrumReport rep = spectral_abscissa(sys);
    for (const auto& ev : rep.eigenvalues) {
        CHECK(std::abs(ev.real()) <= 1e-8);
    }
    CHECK(std::abs(rep.abscissa) <= 1e-8);
}

TEST_CASE("zero gains, gamma = 0: tan-dispersion frequencies are exact") {
    MaterialInput raw = test::paper_material_input();
    raw.gamma = 0.0;
    const MaterialParams m = validate_material(raw);
    const Grid grid = build_grid(1.0, 10);
    const SemiDiscreteSystem sys = assemble(m, test::zero_gains(), grid);
    const SpectrumReport rep = spectral_abscissa(sys);
    // smallest positive w-branch frequency: (2/h) tan(pi h/2) sqrt(alpha/rho)
    const double h = grid.h;
    const double omega1 = (2.0 / h) * std::tan(M_PI * h / 2.0) * std::sqrt(m.alpha / m.rho);
    double best = 1e300;
    for (const auto& ev : rep.eigenvalues) {
        if (ev.imag() > 0.1) best = std::min(best, std::abs(ev.imag() - omega1));
    }
    CHECK(best <= 1e-8 * omega1);
}

TEST_CASE("reference gains: strictly negative abscissa at N in {10, 20, 30}") {
    for (int N : {10, 20, 30}) {
        const Grid grid = build_grid(1.0, N);
        const SemiDiscreteSystem sys = assemble(test::paper_material(), test::paper_gains(), grid);
        const SpectrumReport rep = spectral_abscissa(sys);
        CHECK(rep.abscissa < 0.0);
        CHECK(rep.N == N);
    }
}

TEST_CASE("single-controller run: report produced, abscissa <= 0 within tolerance") {
    // Position feedback alone is conservative, so the exact abscissa is 0;
    // the tolerance covers QZ round-off, which grows with the pencil size.
    GainSet g;  // k2 only
    g.k2 = 0.5;
    for (int N : {10, 20, 30}) {
        const Grid grid = build_grid(1.0, N);
        const SemiDiscreteSystem sys = assemble(test::paper_material(), g, grid);
        const SpectrumReport rep = spectral_abscissa(sys);
        CHECK(!rep.eigenvalues.empty());
        CHECK(rep.abscissa <= 5e-8);
    }
}

TEST_CASE("fitted decay rate vs twice the abscissa on a slow-mode trace") {
    const GainSet g = test::matched_gains();
    const Grid grid = build_grid(1.0, 20);
    const SemiDiscreteSystem sys = assemble(test::paper_material(), g, grid);
    const SpectrumReport rep = spectral_abscissa(sys);
    REQUIRE(rep.abscissa < 0.0);

    InitialConditions ic;
    ic.kmin = 1;
    ic.kmax = 3;
    ic.mismatch_scale = 0.5;
    StepperConfig cfg;
    cfg.dt = grid.h / 10.0;
    cfg.T = 20.0;
    cfg.snapshot_stride = 10;
    const auto snaps = simulate(sys, make_initial_state(sys, ic), cfg);
    const EnergyTrace tr = build_trace(sys, snaps);
    const DecayFit fit = decay_fit(tr, 10.0, 20.0);

    const double ratio = fit.sigma / (2.0 * std::abs(rep.abscissa));
    CHECK(ratio > 1.0 / 3.0);
    CHECK(ratio < 3.0);
}

}  // TEST_SUITE
