#ifndef PORO_VEM_MECH_HPP
#define PORO_VEM_MECH_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesh.hpp"
#include "physics.hpp"

namespace poro {

namespace detail {

// Weights w_i with sum_i w_i * phi_i = integral of the linear interpolant of
// phi over the face. Fan rule from the arithmetic node mean, with the mean
// value taken as the node average; exact for linear integrands on any planar
// polygon (triangles and warped generator quads alike).
inline void face_node_weights(const PolyMesh& m, int fi, std::vector<double>& w) {
    const Face& f = m.faces[fi];
    const int n = static_cast<int>(f.nodes.size());
    w.assign(n, 0.0);
    Vec3 xbar = Vec3::Zero();
    for (int i : f.nodes) xbar += m.nodes[i];
    xbar /= n;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec3& a = m.nodes[f.nodes[k]];
        const Vec3& b = m.nodes[f.nodes[(k + 1) % n]];
        double at = 0.5 * (a - xbar).cross(b - xbar).norm();
        w[k] += at / 3.0;
        w[(k + 1) % n] += at / 3.0;
        total += at;
    }
    for (int k = 0; k < n; ++k) w[k] += total / (3.0 * n);
}

// Boundary-integral node vectors of a cell: q_i = sum_f sign * n_f * w_f(i),
// so that sum_i u_i q_i^T = integral over the cell boundary of u n^T for
// nodal-linear u. These drive both the VEM projection and the discrete
// divergence of the coupling terms.
inline std::vector<Vec3> cell_node_vectors(const PolyMesh& m, int ci) {
    const Cell& c = m.cells[ci];
    const int n = static_cast<int>(c.nodes.size());
    std::vector<Vec3> q(n, Vec3::Zero());
    std::vector<double> w;
    for (int fi : c.faces) {
        const Face& f = m.faces[fi];
        double sign = m.orientation(ci, fi);
        face_node_weights(m, fi, w);
        for (size_t k = 0; k < f.nodes.size(); ++k) {
            int local = static_cast<int>(
                std::lower_bound(c.nodes.begin(), c.nodes.end(), f.nodes[k]) - c.nodes.begin());
            q[local] += sign * w[k] * f.normal;
        }
    }
    return q;
}

} // namespace detail

// Lowest-order VEM operator for one polyhedral cell: projection onto linear
// vector fields, consistency stiffness and trace-scaled stabilization.
struct CellProjection {
    std::vector<int> nodes;              // global node ids (sorted)
    Eigen::Matrix<double, 6, Eigen::Dynamic> strain_op;  // Voigt strain of the projection, 6 x 3n
    Eigen::MatrixXd projector;           // 3n x 3n, onto linear fields
    Eigen::MatrixXd stiffness;           // consistency + stabilization
    double volume = 0.0;
    double tau = 0.0;                    // stabilization scaling used
};

inline CellProjection vem_local_stiffness(const PolyMesh& m, int ci, const Matrix6d& C) {
    const Cell& cell = m.cells[ci];
    double diam = 0.0;
    for (size_t a = 0; a < cell.nodes.size(); ++a)
        for (size_t b = a + 1; b < cell.nodes.size(); ++b)
            diam = std::max(diam, (m.nodes[cell.nodes[a]] - m.nodes[cell.nodes[b]]).norm());
    if (!(cell.volume > 1e-14 * diam * diam * diam))
        throw std::runtime_error("vem: degenerate cell " + std::to_string(ci));

    const int n = static_cast<int>(cell.nodes.size());
    const int m3 = 3 * n;
    const double V = cell.volume;
    std::vector<Vec3> q = detail::cell_node_vectors(m, ci);

    CellProjection P;
    P.nodes = cell.nodes;
    P.volume = V;

    // projected strain in Voigt order (e11,e22,e33,g23,g13,g12)
    P.strain_op.setZero(6, m3);
    for (int j = 0; j < n; ++j) {
        const Vec3& w = q[j];
        for (int l = 0; l < 3; ++l) {
            int col = 3 * j + l;
            P.strain_op(l, col) += w[l] / V;
            // engineering shears
            if (l == 1) P.strain_op(3, col) += w[2] / V;
            if (l == 2) P.strain_op(3, col) += w[1] / V;
            if (l == 0) P.strain_op(4, col) += w[2] / V;
            if (l == 2) P.strain_op(4, col) += w[0] / V;
            if (l == 0) P.strain_op(5, col) += w[1] / V;
            if (l == 1) P.strain_op(5, col) += w[0] / V;
        }
    }

    Eigen::MatrixXd consistency = V * P.strain_op.transpose() * C * P.strain_op;

    // projector onto linear fields: scalar pi_ij = 1/n + (x_i - xbar).q_j / V
    Vec3 xbar = Vec3::Zero();
    for (int i : cell.nodes) xbar += m.nodes[i];
    xbar /= n;
    Eigen::MatrixXd pi(n, n);
    for (int i = 0; i < n; ++i) {
        Vec3 dx = m.nodes[cell.nodes[i]] - xbar;
        for (int j = 0; j < n; ++j) pi(i, j) = 1.0 / n + dx.dot(q[j]) / V;
    }
    P.projector.setZero(m3, m3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < 3; ++k) P.projector(3 * i + k, 3 * j + k) = pi(i, j);

    P.tau = consistency.trace() / m3;
    Eigen::MatrixXd defect = Eigen::MatrixXd::Identity(m3, m3) - P.projector;
    P.stiffness = consistency + P.tau * defect.transpose() * defect;
    return P;
}

// Effective stress from the projected strain, and total stress per the
// equilibrium equation (effective minus alpha P on the normal components).
struct CellStress {
    Vector6d effective;
    Vector6d total;
    double magnitude;  // Frobenius norm of the total stress tensor
};

inline CellStress compute_cell_stress(const CellProjection& P, const Matrix6d& C,
                                      const Eigen::VectorXd& u_cell, double alpha, double pressure) {
    CellStress s;
    Vector6d eps = P.strain_op * u_cell;
    s.effective = C * eps;
    s.total = s.effective;
    for (int i = 0; i < 3; ++i) s.total[i] -= alpha * pressure;
    double sq = 0.0;
    for (int i = 0; i < 3; ++i) sq += s.total[i] * s.total[i];
    for (int i = 3; i < 6; ++i) sq += 2.0 * s.total[i] * s.total[i];
    s.magnitude = std::sqrt(sq);
    return s;
}

} // namespace poro

#endif
