#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <poro/physics.hpp>

using namespace poro;

namespace {

// true when fn throws and the message contains the fragment
template <class F>
bool throws_with(F&& fn, const std::string& fragment) {
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
}

} // namespace

TEST_CASE("isotropic stiffness from E and nu") {
    // E = 14400 MPa, nu = 0.2: lambda = 4000 MPa, mu = 6000 MPa
    Matrix6d C = stiffness_from_E_nu(1.44e10, 0.2);
    CHECK(C(0, 1) == doctest::Approx(4e9).epsilon(1e-12));
    CHECK(C(0, 0) == doctest::Approx(1.6e10).epsilon(1e-12));
    CHECK(C(3, 3) == doctest::Approx(6e9).epsilon(1e-12));
    CHECK((C - C.transpose()).norm() == 0.0);

    // E = 29400 MPa, nu = 0.12: mu = 13125 MPa
    Matrix6d Cf = stiffness_from_E_nu(2.94e10, 0.12);
    CHECK(Cf(4, 4) == doctest::Approx(1.3125e10).epsilon(1e-12));

    // nu = 0 decouples the normal components
    Matrix6d C0 = stiffness_from_E_nu(1.0, 0.0);
    Matrix6d expect = Matrix6d::Zero();
    for (int i = 0; i < 3; ++i) {
        expect(i, i) = 1.0;
        expect(i + 3, i + 3) = 0.5;
    }
    CHECK((C0 - expect).norm() == doctest::Approx(0.0).epsilon(1e-14));

    // volumetric response: C applied to a pure dilation gives 3*lambda + 2*mu
    double E = 5e9, nu = 0.25;
    double lam = E * nu / ((1 + nu) * (1 - 2 * nu));
    double mu = E / (2 * (1 + nu));
    Vector6d dil;
    dil << 1, 1, 1, 0, 0, 0;
    Vector6d s = stiffness_from_E_nu(E, nu) * dil;
    for (int i = 0; i < 3; ++i) CHECK(s[i] == doctest::Approx(3 * lam + 2 * mu).epsilon(1e-13));
    for (int i = 3; i < 6; ++i) CHECK(s[i] == 0.0);

    CHECK_THROWS(stiffness_from_E_nu(0.0, 0.2));
    CHECK_THROWS(stiffness_from_E_nu(-1.0, 0.2));
    CHECK_THROWS(stiffness_from_E_nu(1.0, 0.5));
    CHECK_THROWS(stiffness_from_E_nu(1.0, -1.0));
}

TEST_CASE("pressure from head") {
    // h = 305.81 m at z = 0 under water weight: about 3 MPa
    CHECK(pressure_from_head(305.81, 0.0, 9810.0) == doctest::Approx(3.0e6).epsilon(1e-4));
    CHECK(pressure_from_head(5.0, 5.0, 9810.0) == 0.0);
    CHECK(pressure_from_head(2.0, 5.0, 1.0) == doctest::Approx(-3.0));
}

TEST_CASE("media validation") {
    MediaProperties ok;
    ok.K = 1.5e-10 * Eigen::Matrix3d::Identity();
    ok.s_stor = 8.2e-7;
    ok.stiffness = stiffness_from_E_nu(1.44e10, 0.2);
    ok.alpha = 1.0;
    CHECK_NOTHROW(ok.validate("aquifer"));

    MediaProperties bad = ok;
    bad.K(0, 1) = 1e-10;  // asymmetric
    CHECK(throws_with([&] { bad.validate("m"); }, "not symmetric"));

    bad = ok;
    bad.K = -1e-10 * Eigen::Matrix3d::Identity();
    CHECK(throws_with([&] { bad.validate("m"); }, "positive definite"));

    bad = ok;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(bad.validate("m"), std::invalid_argument);
    bad.alpha = -0.1;
    CHECK_THROWS_AS(bad.validate("m"), std::invalid_argument);

    // full-tensor conductivity with positive eigenvalues passes
    MediaProperties full = ok;
    Eigen::Matrix3d R;
    double a = 30.0 * M_PI / 180.0;
    R << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    full.K = R * Eigen::Vector3d(2e-10, 1e-10, 1e-10).asDiagonal() * R.transpose();
    CHECK_NOTHROW(full.validate("rotated"));
}
