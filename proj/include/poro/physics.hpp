#ifndef PORO_PHYSICS_HPP
#define PORO_PHYSICS_HPP

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "mesh.hpp"

namespace poro {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

// Isotropic stiffness in Voigt convention with engineering shear strains
// (gamma = 2 eps_ij), so the shear diagonal carries mu, not 2 mu.
inline Matrix6d stiffness_from_E_nu(double E, double nu) {
    if (!(E > 0.0)) throw std::invalid_argument("stiffness: E must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("stiffness: nu must be in (-1, 0.5)");
    double lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    double mu = E / (2.0 * (1.0 + nu));
    Matrix6d C = Matrix6d::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) C(i, j) = lam;
        C(i, i) = lam + 2.0 * mu;
        C(i + 3, i + 3) = mu;
    }
    return C;
}

struct FluidConstants {
    double rho_g = 9810.0;  // unit weight of water, Pa/m
};

inline double pressure_from_head(double h, double z, double rho_g) { return rho_g * (h - z); }

// Per-region hydraulic and elastic coefficients.
struct MediaProperties {
    Eigen::Matrix3d K = Eigen::Matrix3d::Identity();  // hydraulic conductivity, m/s
    double s_stor = 0.0;                              // specific storage, 1/m
    Matrix6d stiffness = Matrix6d::Identity();        // Voigt, Pa
    double alpha = 1.0;                               // Biot coefficient
    int region_id = 0;

    void validate(const std::string& name) const {
        if ((K - K.transpose()).norm() > 1e-12 * K.norm())
            throw std::invalid_argument("media " + name + ": K not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(K);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("media " + name + ": K not positive definite");
        if ((stiffness - stiffness.transpose()).norm() > 1e-12 * stiffness.norm())
            throw std::invalid_argument("media " + name + ": stiffness not symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix6d> cs(stiffness);
        if (cs.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("media " + name + ": stiffness not positive definite");
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("media " + name + ": alpha must be in [0,1]");
    }
};

enum class FlowBCKind { FixedHead, NormalFlux };

struct FlowBCEntry {
    FlowBCKind kind = FlowBCKind::NormalFlux;
    double value = 0.0;  // head (m) or outward normal flux (m/s)
};

enum class MechBCKind { FixedDisplacement, Traction, Roller };

struct MechBCEntry {
    MechBCKind kind = MechBCKind::Traction;
    Vec3 value = Vec3::Zero();  // displacement (m) or traction (Pa); unused for roller
};

// Boundary conditions keyed by boundary tag, with optional region-qualified
// overrides for flow (e.g. a fixed head only where the aquifer meets x-).
struct FlowBC {
    std::array<std::optional<FlowBCEntry>, 6> by_tag;
    struct Qualified {
        int tag;
        std::string region;
        FlowBCEntry entry;
    };
    std::vector<Qualified> qualified;
    std::optional<FlowBCEntry> fallback;  // explicit "default =" line
};

struct MechBC {
    std::array<std::optional<MechBCEntry>, 6> by_tag;
    std::optional<MechBCEntry> fallback;
};

} // namespace poro

#endif
