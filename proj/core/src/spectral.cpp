#include "pzbeam/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

namespace pzbeam {

namespace {

double max_real(const std::vector<std::complex<double>>& ev) {
    double a = -std::numeric_limits<double>::infinity();
    for (const auto& z : ev) a = std::max(a, z.real());
    return a;
}

/// Orthonormal basis of the orthogonal complement of span(V) (V full rank).
Eigen::MatrixXd orth_complement(const Eigen::MatrixXd& V) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), V.rows());
    return Q.rightCols(V.rows() - V.cols());
}

}  // namespace

FirstOrderSystem first_order_system(const SemiDiscreteSystem& sys) {
    const int n = sys.size();
    FirstOrderSystem fo;
    fo.E = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    fo.E.topLeftCorner(n, n).setIdentity();
    fo.E.bottomRightCorner(n, n) = sys.Mh;
    fo.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    fo.A.topRightCorner(n, n).setIdentity();
    fo.A.bottomLeftCorner(n, n) = -sys.Keff;
    fo.A.bottomRightCorner(n, n) = -sys.Deff;
    return fo;
}

SpectrumReport spectral_abscissa(const SemiDiscreteSystem& sys) {
    const FirstOrderSystem fo = first_order_system(sys);
    const int n = sys.size();
    const int two_n = 2 * n;

    // Deflation vectors. Per field f with alternating vector n_f and
    // constant vector e_f:
    //   (0, n_f)            infinite mode, always (ker E);
    //   (n_f, 0)            second link of the infinite chain when the
    //                       field's velocity gain vanishes;
    //   (e_f, 0), (0, e_f)  rigid Jordan pair at 0 when the field has no
    //                       gains at all.
    const GainSet& g = sys.gains;
    const double vel_gain[4] = {g.k5, g.k7, g.k1, g.k3};
    const double pos_gain[4] = {g.k6, g.k8, g.k2, g.k4};

    std::vector<Eigen::VectorXd> defl;
    int rigid_pairs = 0;
    for (int f = 0; f < 4; ++f) {
        const Eigen::VectorXd nf = sys.alternating_vector(static_cast<Field>(f));
        Eigen::VectorXd z = Eigen::VectorXd::Zero(two_n);
        z.tail(n) = nf;
        defl.push_back(z);
        if (vel_gain[f] == 0.0) {
            z.setZero();
            z.head(n) = nf;
            defl.push_back(z);
        }
        if (vel_gain[f] == 0.0 && pos_gain[f] == 0.0) {
            const Eigen::VectorXd ef = sys.constant_vector(static_cast<Field>(f));
            z.setZero();
            z.head(n) = ef;
            defl.push_back(z);
            z.setZero();
            z.tail(n) = ef;
            defl.push_back(z);
            ++rigid_pairs;
        }
    }

    const int m = static_cast<int>(defl.size());
    Eigen::MatrixXd S0(two_n, m);
    for (int j = 0; j < m; ++j) S0.col(j) = defl[static_cast<std::size_t>(j)];

    // (S0, W) is a deflating pair: E*S0 + A*S0 spans an m-dimensional W.
    Eigen::MatrixXd W(two_n, 2 * m);
    W.leftCols(m) = fo.E * S0;
    W.rightCols(m) = fo.A * S0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qrw(W);
    qrw.setThreshold(1e-10);
    const int rank_w = static_cast<int>(qrw.rank());

    Eigen::MatrixXd Er, Ar;
    if (rank_w == m) {
        const Eigen::MatrixXd Qfull =
            qrw.householderQ() * Eigen::MatrixXd::Identity(two_n, two_n);
        const Eigen::MatrixXd Ql = Qfull.rightCols(two_n - rank_w);
        const Eigen::MatrixXd Qc = orth_complement(S0);
        Er = Ql.transpose() * fo.E * Qc;
        Ar = Ql.transpose() * fo.A * Qc;
    } else {
        // Unexpected gain pattern; fall back to the full pencil.
        Er = fo.E;
        Ar = fo.A;
        rigid_pairs = 0;
    }

    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(Ar, Er, false);
    if (ges.info() != Eigen::Success) {
        throw EigenFailureError("QZ iteration failed on the closed-loop pencil");
    }

    SpectrumReport rep;
    rep.N = sys.grid.N;
    rep.gains = sys.gains;
    const auto& alphas = ges.alphas();
    const auto& betas = ges.betas();
    for (int i = 0; i < alphas.size(); ++i) {
        const std::complex<double> a = alphas[i];
        const double b = betas[i];
        const double mag = std::sqrt(std::norm(a) + b * b);
        if (std::abs(b) > 1e-12 * mag) rep.eigenvalues.push_back(a / b);
    }
    for (int r = 0; r < rigid_pairs; ++r) {
        rep.eigenvalues.emplace_back(0.0, 0.0);
        rep.eigenvalues.emplace_back(0.0, 0.0);
    }
    rep.abscissa = max_real(rep.eigenvalues);
    return rep;
}

SpectrumReport spectral_abscissa(const Eigen::MatrixXd& matrix) {
    Eigen::EigenSolver<Eigen::MatrixXd> es;
    es.compute(matrix, false);
    if (es.info() != Eigen::Success) {
        throw EigenFailureError("eigenvalue iteration did not converge");
    }
    SpectrumReport rep;
    rep.N = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        rep.eigenvalues.push_back(es.eigenvalues()[i]);
    }
    rep.abscissa = max_real(rep.eigenvalues);
    return rep;
}

}  // namespace pzbeam
