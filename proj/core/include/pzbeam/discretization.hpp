#ifndef PZBEAM_DISCRETIZATION_HPP
#define PZBEAM_DISCRETIZATION_HPP

#include <Eigen/Dense>
#include <vector>

#include "pzbeam/gains.hpp"
#include "pzbeam/model.hpp"

namespace pzbeam {

/// Uniform grid with N interior nodes: x_0 = 0 < x_1 < ... < x_{N+1} = L,
/// h = L/(N+1), plus the N+1 cell midpoints x_{j+1/2} = (x_j + x_{j+1})/2.
struct Grid {
    int N = 0;
    double L = 0.0;
    double h = 0.0;
    std::vector<double> nodes;      // size N+2
    std::vector<double> midpoints;  // size N+1

    int node_count() const { return N + 2; }
};

/// Throws GridTooCoarseError for N < 2.
Grid build_grid(double L, int N);

/// amplitude * sum_{k=kmin}^{kmax} cos(k pi x / L).
double initial_profile(double x, double amplitude, int kmin, int kmax, double L);

/// Field indices in the assembled unknown ordering
/// [hat_w nodes, hat_p nodes, e1 nodes, e2 nodes].
enum Field : int { FieldHatW = 0, FieldHatP = 1, FieldE1 = 2, FieldE2 = 3 };

/// Assembled order-reduced semi-discrete system. With n = 4(N+2) the
/// second-order dynamics read
///
///   Mh u'' + (Dh + Ch_v) u' + (Kh + Gh + Ch_u) u = 0,
///
/// all rows scaled by h. Interior rows are the averaged-mass / differenced-
/// stiffness stencil; boundary rows carry the gain terms of the reduced
/// model in ghost-flux form. Mh is symmetric positive SEMIdefinite: its
/// kernel is exactly the four per-field alternating vectors, the scheme's
/// algebraic (order-reduction) coordinates. Keff/Deff are the materialized
/// sums used by the integrator and the spectral module.
struct SemiDiscreteSystem {
    Grid grid;
    MaterialParams mat;
    GainSet gains;

    Eigen::MatrixXd Mh;    // mass, block diag(rho,mu,rho,mu) x (h/4)T
    Eigen::MatrixXd Kh;    // gradient stiffness, (1/h) A x Lap
    Eigen::MatrixXd Dh;    // boundary velocity gains (within-pair)
    Eigen::MatrixXd Gh;    // boundary position gains (within-pair)
    Eigen::MatrixXd Ch_u;  // error -> observer injection, position part
    Eigen::MatrixXd Ch_v;  // error -> observer injection, velocity part
    Eigen::MatrixXd Keff;  // Kh + Gh + Ch_u
    Eigen::MatrixXd Deff;  // Dh + Ch_v

    int node_count() const { return grid.node_count(); }
    int size() const { return 4 * grid.node_count(); }
    int offset(Field f) const { return static_cast<int>(f) * grid.node_count(); }
    int index(Field f, int j) const { return offset(f) + j; }

    /// The per-field alternating kernel vector of Mh, (+1,-1,+1,...).
    Eigen::VectorXd alternating_vector(Field f) const;
    /// The per-field constant vector (rigid direction of Kh).
    Eigen::VectorXd constant_vector(Field f) const;
};

SemiDiscreteSystem assemble(const MaterialParams& mat, const GainSet& gains, const Grid& grid);

/// Nodal fields of one state, in physical units. h is carried for the
/// quadratures in the diagnostics module.
struct FieldSnapshot {
    double t = 0.0;
    double h = 0.0;
    Eigen::VectorXd hat_w, hat_p, e1, e2;          // length N+2
    Eigen::VectorXd hat_w_t, hat_p_t, e1_t, e2_t;  // velocities
};

struct PlantFields {
    Eigen::VectorXd w, p, w_t, p_t;
};

/// w = hat_w - e1, p = hat_p - e2, likewise velocities.
PlantFields reconstruct_plant(const FieldSnapshot& snapshot);

}  // namespace pzbeam

#endif
