#include "pzbeam/discretization.hpp"

#include <cmath>

namespace pzbeam {

Grid build_grid(double L, int N) {
    if (N < 2) throw GridTooCoarseError("grid needs at least 2 interior nodes");
    if (!(L > 0.0) || !std::isfinite(L)) throw NonPositiveParameterError("L must be > 0");
    Grid g;
    g.N = N;
    g.L = L;
    g.h = L / (N + 1);
    g.nodes.resize(N + 2);
    g.midpoints.resize(N + 1);
    for (int j = 0; j <= N + 1; ++j) g.nodes[j] = j * g.h;
    g.nodes[N + 1] = L;  // exact endpoint
    for (int j = 0; j <= N; ++j) g.midpoints[j] = (g.nodes[j] + g.nodes[j + 1]) / 2.0;
    return g;
}

double initial_profile(double x, double amplitude, int kmin, int kmax, double L) {
    double s = 0.0;
    for (int k = kmin; k <= kmax; ++k) s += std::cos(k * M_PI * x / L);
    return amplitude * s;
}

Eigen::VectorXd SemiDiscreteSystem::alternating_vector(Field f) const {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(size());
    const int nn = node_count();
    for (int j = 0; j < nn; ++j) n[offset(f) + j] = (j % 2 == 0) ? 1.0 : -1.0;
    return n;
}

Eigen::VectorXd SemiDiscreteSystem::constant_vector(Field f) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(size());
    e.segment(offset(f), node_count()).setOnes();
    return e;
}

SemiDiscreteSystem assemble(const MaterialParams& mat, const GainSet& gains, const Grid& grid) {
    if (!gains.all_finite_nonnegative()) {
        throw NegativeGainError("assembly requires finite nonnegative gains");
    }
    SemiDiscreteSystem sys;
    sys.grid = grid;
    sys.mat = mat;
    sys.gains = gains;

    const int nn = grid.N + 2;
    const int n = 4 * nn;
    const double h = grid.h;

    // Per-field averaged-mass stencil (1,2,1)/4 with single-sided (1,1)/4
    // boundary rows, and the 3-point Laplacian with (1,-1) flux rows.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nn, nn);
    Eigen::MatrixXd Lap = Eigen::MatrixXd::Zero(nn, nn);
    for (int j = 0; j < nn; ++j) {
        if (j == 0) {
            T(0, 0) = 1.0;
            T(0, 1) = 1.0;
            Lap(0, 0) = 1.0;
            Lap(0, 1) = -1.0;
        } else if (j == nn - 1) {
            T(j, j - 1) = 1.0;
            T(j, j) = 1.0;
            Lap(j, j - 1) = -1.0;
            Lap(j, j) = 1.0;
        } else {
            T(j, j - 1) = 1.0;
            T(j, j) = 2.0;
            T(j, j + 1) = 1.0;
            Lap(j, j - 1) = -1.0;
            Lap(j, j) = 2.0;
            Lap(j, j + 1) = -1.0;
        }
    }

    sys.Mh = Eigen::MatrixXd::Zero(n, n);
    sys.Kh = Eigen::MatrixXd::Zero(n, n);
    sys.Dh = Eigen::MatrixXd::Zero(n, n);
    sys.Gh = Eigen::MatrixXd::Zero(n, n);
    sys.Ch_u = Eigen::MatrixXd::Zero(n, n);
    sys.Ch_v = Eigen::MatrixXd::Zero(n, n);

    const double weight[4] = {mat.rho, mat.mu, mat.rho, mat.mu};
    for (int f = 0; f < 4; ++f) {
        sys.Mh.block(f * nn, f * nn, nn, nn) = (h / 4.0) * weight[f] * T;
    }

    const CouplingMatrices cm = coupling_matrices(mat);
    const int pair_fields[2][2] = {{FieldHatW, FieldHatP}, {FieldE1, FieldE2}};
    for (const auto& pf : pair_fields) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                sys.Kh.block(pf[i] * nn, pf[j] * nn, nn, nn) += (cm.A(i, j) / h) * Lap;
            }
        }
    }

    const int iw0 = sys.index(FieldHatW, 0), ip0 = sys.index(FieldHatP, 0);
    const int iwL = sys.index(FieldHatW, nn - 1), ipL = sys.index(FieldHatP, nn - 1);
    const int ie10 = sys.index(FieldE1, 0), ie20 = sys.index(FieldE2, 0);

    // Observer right end: +K57 velocity + K68 position at node N+1.
    sys.Dh(iwL, iwL) += gains.k5;
    sys.Dh(ipL, ipL) += gains.k7;
    sys.Gh(iwL, iwL) += gains.k6;
    sys.Gh(ipL, ipL) += gains.k8;
    // Observer left end: output injection +K13 e'(0) + K24 e(0).
    sys.Ch_v(iw0, ie10) += gains.k1;
    sys.Ch_v(ip0, ie20) += gains.k3;
    sys.Ch_u(iw0, ie10) += gains.k2;
    sys.Ch_u(ip0, ie20) += gains.k4;
    // Error left end: +K13 e'(0) + K24 e(0); right end of the error pair is free.
    sys.Dh(ie10, ie10) += gains.k1;
    sys.Dh(ie20, ie20) += gains.k3;
    sys.Gh(ie10, ie10) += gains.k2;
    sys.Gh(ie20, ie20) += gains.k4;

    sys.Keff = sys.Kh + sys.Gh + sys.Ch_u;
    sys.Deff = sys.Dh + sys.Ch_v;
    return sys;
}

PlantFields reconstruct_plant(const FieldSnapshot& s) {
    PlantFields p;
    p.w = s.hat_w - s.e1;
    p.p = s.hat_p - s.e2;
    p.w_t = s.hat_w_t - s.e1_t;
    p.p_t = s.hat_p_t - s.e2_t;
    return p;
}

}  // namespace pzbeam
