#ifndef PORO_COUPLING_HPP
#define PORO_COUPLING_HPP

#include <Eigen/Dense>
#include <vector>

#include "mesh.hpp"
#include "vem_mech.hpp"

namespace poro {

// Discrete cell divergence: d.u_nodes approximates the integral of div(u)
// over the cell (units m^2 per entry). Built from the same face rule as the
// VEM boundary integrals, so d is exact for linear displacement fields.
struct DivOperator {
    std::vector<int> nodes;   // global node ids, sorted
    std::vector<Vec3> coeff;  // one 3-vector per node

    double apply(const Eigen::VectorXd& u_cell) const {
        double s = 0.0;
        for (size_t i = 0; i < coeff.size(); ++i)
            s += coeff[i].dot(u_cell.segment<3>(3 * static_cast<int>(i)));
        return s;
    }
};

inline DivOperator divergence_operator(const PolyMesh& m, int ci) {
    DivOperator d;
    d.nodes = m.cells[ci].nodes;
    d.coeff = detail::cell_node_vectors(m, ci);
    return d;
}

// Coupling coefficients of one cell, as they enter the block system:
//   flow row c:   (alpha/dt) * d . u        (A_FM), rhs (alpha/dt) * d . u_prev
//   mech rows:   -alpha*rho_g * d^T * h_c   (A_MF), rhs -alpha*rho_g*z_c * d^T
// The z-part of P = rho_g (h - z) is constant in the unknowns and lands on
// the mechanics right-hand side.
struct CellCoupling {
    double flow_scale;   // alpha / dt
    double mech_scale;   // -alpha * rho_g
    double mech_rhs_z;   // -alpha * rho_g * z_c  (multiplies d on b_M)
};

inline CellCoupling coupling_scales(double alpha, double rho_g, double dt, double z_c) {
    CellCoupling c;
    c.flow_scale = alpha / dt;
    c.mech_scale = -alpha * rho_g;
    c.mech_rhs_z = -alpha * rho_g * z_c;
    return c;
}

} // namespace poro

#endif
