#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <poro/model.hpp>
#include <poro/scenario.hpp>
#include <poro/threading.hpp>

#include <Eigen/Dense>

using namespace poro;

namespace {

template <class F>
bool throws_with(F&& fn, const std::string& fragment) {
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
}

MediaProperties simple_media(double E, double nu, double alpha) {
    MediaProperties mp;
    mp.K = 1e-8 * Eigen::Matrix3d::Identity();
    mp.s_stor = 1e-5;
    mp.stiffness = stiffness_from_E_nu(E, nu);
    mp.alpha = alpha;
    return mp;
}

DiscreteModel box_model(int n, const FlowBC& fbc, const MechBC& mbc, double alpha,
                        double E = 1e8, double nu = 0.0) {
    PolyMesh m = build_structured_hex(n, n, n, Box{0, 1, 0, 1, 0, 1});
    std::vector<int> cm(m.cells.size(), 0);
    return DiscreteModel(std::move(m), {simple_media(E, nu, alpha)}, std::move(cm), {"soil"}, fbc,
                         mbc, FluidConstants{}, FluxScheme::TPFA);
}

FlowBC noflow_bc() {
    FlowBC f;
    f.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    return f;
}

} // namespace

TEST_CASE("uncovered boundary tags are reported by name") {
    FlowBC partial;
    partial.by_tag[TagZPlus] = FlowBCEntry{FlowBCKind::FixedHead, 0.0};
    MechBC mbc;
    mbc.fallback = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    CHECK(throws_with([&] { box_model(2, partial, mbc, 1.0); }, "uncovered boundary tags"));
    CHECK(throws_with([&] { box_model(2, partial, mbc, 1.0); }, "x-"));

    MechBC mpartial;
    mpartial.by_tag[TagZMinus] = MechBCEntry{MechBCKind::FixedDisplacement, Vec3::Zero()};
    CHECK(throws_with([&] { box_model(2, noflow_bc(), mpartial, 1.0); }, "y+"));
}

TEST_CASE("roller on a non-axis-aligned face is rejected") {
    PolyMesh m = build_prismatic({{0, 0}, {1, 0}, {0.5, 1}}, {{0, 1, 2}}, {0.0, 1.0});
    MechBC mbc;
    mbc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    CHECK(throws_with(
        [&] {
            DiscreteModel(std::move(m), {simple_media(1e8, 0.2, 1.0)}, {0}, {"soil"}, noflow_bc(),
                          mbc, FluidConstants{}, FluxScheme::TPFA);
        },
        "non-axis-aligned"));
}

TEST_CASE("traction is lumped per face node") {
    MechBC mbc;
    mbc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3(0, 0, -8.0)};
    mbc.fallback = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    DiscreteModel model = box_model(1, noflow_bc(), mbc, 1.0);
    // one unit face, four nodes: -2 per node on the top, nothing below
    for (int n = 0; n < 8; ++n) {
        double expect = model.mesh.nodes[n][2] > 0.5 ? -2.0 : 0.0;
        CHECK(model.traction_load[3 * n + 2] == doctest::Approx(expect));
        CHECK(model.traction_load[3 * n + 0] == 0.0);
    }
}

TEST_CASE("fixed displacement wins over roller and pins all components") {
    MechBC mbc;
    mbc.by_tag[TagZMinus] = MechBCEntry{MechBCKind::FixedDisplacement, Vec3(0.1, 0.0, -0.2)};
    mbc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    DiscreteModel model = box_model(2, noflow_bc(), mbc, 1.0);
    for (size_t n = 0; n < model.mesh.nodes.size(); ++n) {
        if (model.mesh.nodes[n][2] == 0.0) {
            for (int a = 0; a < 3; ++a) CHECK(model.dof_fixed[3 * n + a] == 1);
            CHECK(model.dof_value[3 * n + 0] == doctest::Approx(0.1));
            CHECK(model.dof_value[3 * n + 2] == doctest::Approx(-0.2));
        }
    }
    // prescribed values land on the rhs of the constrained rows
    BlockSystem sys = model.assemble(1.0, Eigen::VectorXd::Zero(model.n_flow),
                                     Eigen::VectorXd::Zero(model.n_mech));
    for (size_t n = 0; n < model.mesh.nodes.size(); ++n)
        if (model.mesh.nodes[n][2] == 0.0) {
            int row = model.n_flow + 3 * static_cast<int>(n);
            double scale = sys.A.vals[sys.A.slot(row, row)];
            CHECK(scale > 0.0);
            CHECK(sys.b[row] == doctest::Approx(scale * 0.1));
        }
}

TEST_CASE("coupling duality survives assembly and constraints") {
    for (const Scenario& sc : {builtin_terzaghi(20), builtin_stress_split()}) {
        DiscreteModel model = build_model(sc);
        SimState st = initial_state(sc, model);
        double dt = sc.total_time / sc.steps;
        BlockSystem sys = model.assemble(dt, st.h, st.u);
        Eigen::MatrixXd A_FM = sys.flow_mech_block().dense();
        Eigen::MatrixXd A_MF = sys.mech_flow_block().dense();
        double scale = 1.0 / (dt * sc.fluid.rho_g);
        CHECK((A_FM + scale * A_MF.transpose()).norm() < 1e-12 * A_FM.norm());
    }
}

TEST_CASE("flow block is weakly diagonally dominant with nonpositive offdiagonals") {
    Scenario sc = builtin_problem_a(6);
    DiscreteModel model = build_model(sc);
    SimState st = initial_state(sc, model);
    BlockSystem sys = model.assemble(sc.total_time / sc.steps, st.h, st.u);
    SparseMatrix F = sys.flow_block();
    for (int r = 0; r < F.nrows; ++r) {
        double diag = 0.0, offsum = 0.0;
        for (std::int64_t k = F.offsets[r]; k < F.offsets[r + 1]; ++k) {
            if (F.cols[k] == r) {
                diag = F.vals[k];
            } else {
                CHECK(F.vals[k] <= 0.0);
                offsum -= F.vals[k];
            }
        }
        CHECK(diag > 0.0);
        CHECK(diag >= offsum * (1.0 - 1e-12));
    }
}

TEST_CASE("block views recompose the assembled matrix") {
    Scenario sc = builtin_terzaghi(20);
    DiscreteModel model = build_model(sc);
    SimState st = initial_state(sc, model);
    BlockSystem sys = model.assemble(0.025, st.h, st.u);
    Eigen::MatrixXd D = sys.A.dense();
    Eigen::MatrixXd R(D.rows(), D.cols());
    R << sys.flow_block().dense(), sys.flow_mech_block().dense(), sys.mech_flow_block().dense(),
        sys.mech_block().dense();
    CHECK((R - D).norm() == 0.0);
}

TEST_CASE("assembly is bitwise invariant under the worker count") {
    Scenario sc = builtin_problem_a(6);
    DiscreteModel model = build_model(sc);
    SimState st = initial_state(sc, model);
    double dt = sc.total_time / sc.steps;
    set_threads(1);
    BlockSystem s1 = model.assemble(dt, st.h, st.u);
    set_threads(3);
    BlockSystem s3 = model.assemble(dt, st.h, st.u);
    set_threads(1);
    REQUIRE(s1.A.vals.size() == s3.A.vals.size());
    for (size_t k = 0; k < s1.A.vals.size(); ++k) CHECK(s1.A.vals[k] == s3.A.vals[k]);
    CHECK((s1.b - s3.b).norm() == 0.0);
}

TEST_CASE("mechanics block is positive definite after constraints") {
    MechBC mbc;
    mbc.by_tag[TagZMinus] = MechBCEntry{MechBCKind::FixedDisplacement, Vec3::Zero()};
    mbc.fallback = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    DiscreteModel model = box_model(2, noflow_bc(), mbc, 0.0, 100.0, 0.0);
    BlockSystem sys = model.assemble(1.0, Eigen::VectorXd::Zero(model.n_flow),
                                     Eigen::VectorXd::Zero(model.n_mech));
    Eigen::MatrixXd M = sys.mech_block().dense();
    CHECK((M - M.transpose()).norm() < 1e-12 * M.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("uniaxial compression of a nu = 0 column is exact") {
    const double E = 100.0, p = 3.0;
    MechBC mbc;
    mbc.by_tag[TagZMinus] = MechBCEntry{MechBCKind::FixedDisplacement, Vec3::Zero()};
    mbc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3(0, 0, -p)};
    mbc.fallback = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    DiscreteModel model = box_model(2, noflow_bc(), mbc, 0.0, E, 0.0);
    BlockSystem sys = model.assemble(1.0, Eigen::VectorXd::Zero(model.n_flow),
                                     Eigen::VectorXd::Zero(model.n_mech));
    Eigen::VectorXd u =
        Eigen::PartialPivLU<Eigen::MatrixXd>(sys.mech_block().dense()).solve(sys.mech_rhs());
    for (size_t n = 0; n < model.mesh.nodes.size(); ++n) {
        double z = model.mesh.nodes[n][2];
        CHECK(std::abs(u[3 * n + 0]) < 1e-9 * p / E);
        CHECK(std::abs(u[3 * n + 2] + p * z / E) < 1e-9 * p / E);
    }
}

TEST_CASE("assemble validates its inputs") {
    MechBC mbc;
    mbc.fallback = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    DiscreteModel model = box_model(1, noflow_bc(), mbc, 1.0);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(model.n_flow);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(model.n_mech);
    CHECK_THROWS(model.assemble(0.0, h, u));
    CHECK_THROWS(model.assemble(1.0, Eigen::VectorXd::Zero(2), u));
}
