#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <poro/scenario.hpp>
#include <poro/strategies.hpp>

#include <Eigen/Dense>

using namespace poro;

namespace {

// small coupled column: drained and loaded at the top, rollers elsewhere
DiscreteModel column_model(double alpha) {
    PolyMesh m = build_structured_hex(2, 2, 2, Box{0, 1, 0, 1, 0, 1});
    MediaProperties mp;
    mp.K = 1e-3 * Eigen::Matrix3d::Identity();
    mp.s_stor = 1e-2;
    mp.stiffness = stiffness_from_E_nu(1e6, 0.2);
    mp.alpha = alpha;
    FlowBC fbc;
    fbc.by_tag[TagZPlus] = FlowBCEntry{FlowBCKind::FixedHead, 0.0};
    fbc.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    MechBC mbc;
    mbc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3(0, 0, -1e4)};
    mbc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    std::vector<int> cm(m.cells.size(), 0);
    return DiscreteModel(std::move(m), {mp}, std::move(cm), {"soil"}, fbc, mbc, FluidConstants{},
                         FluxScheme::TPFA);
}

SimState zero_state(const DiscreteModel& model, double head = 0.0) {
    SimState st;
    st.h = Eigen::VectorXd::Constant(model.n_flow, head);
    st.u = Eigen::VectorXd::Zero(model.n_mech);
    return st;
}

RunConfig base_config(double total, int steps, Strategy s) {
    RunConfig rc;
    rc.total_time = total;
    rc.steps = steps;
    rc.strategy = s;
    return rc;
}

} // namespace

TEST_CASE("alpha = 0 decouples the system and splitting finishes in one pass") {
    DiscreteModel model = column_model(0.0);
    SimState init = zero_state(model, 1.0);

    RunResult mono = run_simulation(model, init, base_config(10.0, 2, Strategy::Monolithic));
    RunResult split = run_simulation(model, init, base_config(10.0, 2, Strategy::FixedStrain));
    REQUIRE(mono.converged);
    REQUIRE(split.converged);
    for (int k : split.split_iters) CHECK(k == 1);
    CHECK((mono.final_state.h - split.final_state.h).norm() < 1e-9 * (mono.final_state.h.norm() + 1.0));
    CHECK((mono.final_state.u - split.final_state.u).norm() < 1e-9 * (mono.final_state.u.norm() + 1.0));

    // the head matches a flow-only backward Euler reference
    SimState st = init;
    for (int s = 0; s < 2; ++s) {
        BlockSystem sys = model.assemble(5.0, st.h, st.u);
        st.h = Eigen::PartialPivLU<Eigen::MatrixXd>(sys.flow_block().dense()).solve(sys.flow_rhs());
    }
    CHECK((mono.final_state.h - st.h).norm() < 1e-8 * (st.h.norm() + 1.0));
}

TEST_CASE("coupled column: strategies agree and splitting iterates more than once") {
    DiscreteModel model = column_model(1.0);
    SimState init = zero_state(model);

    RunResult mono = run_simulation(model, init, base_config(4.0, 2, Strategy::Monolithic));
    RunResult split = run_simulation(model, init, base_config(4.0, 2, Strategy::FixedStrain));
    REQUIRE(mono.converged);
    REQUIRE(split.converged);
    for (int k : split.split_iters) CHECK(k > 1);
    CHECK(split.lin_iters > mono.lin_iters);
    double dh = (mono.final_state.h - split.final_state.h).norm() / mono.final_state.h.norm();
    double du = (mono.final_state.u - split.final_state.u).norm() / mono.final_state.u.norm();
    CHECK(dh < 1e-4);
    CHECK(du < 1e-4);

    // both against the direct solution of each step's linear system
    SimState st = init;
    for (int s = 0; s < 2; ++s) {
        BlockSystem sys = model.assemble(2.0, st.h, st.u);
        Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(sys.A.dense()).solve(sys.b);
        st.h = x.head(sys.n_flow);
        st.u = x.tail(sys.n_mech);
    }
    CHECK((mono.final_state.h - st.h).norm() < 1e-6 * st.h.norm());
    CHECK((mono.final_state.u - st.u).norm() < 1e-6 * st.u.norm());
}

TEST_CASE("history bookkeeping") {
    DiscreteModel model = column_model(1.0);
    SimState init = zero_state(model);
    RunConfig rc = base_config(4.0, 4, Strategy::Monolithic);
    RunResult res = run_simulation(model, init, rc);
    REQUIRE(res.history.size() == 5);
    CHECK(res.history.front().time == 0.0);
    CHECK(res.final_state.time == doctest::Approx(4.0));
    for (size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i].time > res.history[i - 1].time);
    CHECK(res.split_iters.size() == 4);

    rc.keep_history = false;
    CHECK(run_simulation(model, init, rc).history.empty());

    rc.steps = 0;
    CHECK_THROWS(run_simulation(model, init, rc));
}

TEST_CASE("a quiescent problem stays exactly at rest") {
    PolyMesh m = build_structured_hex(2, 2, 2, Box{0, 1, 0, 1, 0, 1});
    MediaProperties mp;
    mp.K = 1e-3 * Eigen::Matrix3d::Identity();
    mp.s_stor = 1e-2;
    mp.stiffness = stiffness_from_E_nu(1e6, 0.2);
    mp.alpha = 0.0;  // pressure would otherwise load the skeleton through gravity
    FlowBC fbc;
    fbc.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    MechBC mbc;
    mbc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    std::vector<int> cm(m.cells.size(), 0);
    DiscreteModel model(std::move(m), {mp}, std::move(cm), {"soil"}, fbc, mbc, FluidConstants{},
                        FluxScheme::TPFA);
    RunResult res = run_simulation(model, zero_state(model), base_config(1.0, 2, Strategy::Monolithic));
    CHECK(res.converged);
    CHECK(res.lin_iters == 0);
    CHECK(res.final_state.h.norm() == 0.0);
    CHECK(res.final_state.u.norm() == 0.0);
}

TEST_CASE("long runs settle into the steady regime") {
    Scenario sc = builtin_problem_a(6);
    DiscreteModel model = build_model(sc);
    SimState init = initial_state(sc, model);
    RunConfig rc = run_config(sc);
    rc.total_time = 1e17;  // far beyond the fill's diffusion time of ~3e15 s
    rc.steps = 8;
    rc.keep_history = false;
    RunResult res = run_simulation(model, init, rc);
    REQUIRE(res.converged);

    // one more step of the same size changes the head only marginally
    SimState st = res.final_state;
    double dt = rc.total_time / rc.steps;
    BlockSystem sys = model.assemble(dt, st.h, st.u);
    StepStats extra = step_monolithic(sys, st, dt, rc.solver);
    REQUIRE(extra.converged);
    CHECK((st.h - res.final_state.h).norm() < 1e-6 * res.final_state.h.norm());
}

TEST_CASE("overwhelming coupling defeats fixed-strain but not the monolithic solve") {
    Scenario sc = builtin_stress_split();
    DiscreteModel model = build_model(sc);
    SimState init = initial_state(sc, model);
    RunConfig rc = run_config(sc);
    rc.keep_history = false;

    REQUIRE(rc.strategy == Strategy::FixedStrain);
    RunResult split = run_simulation(model, init, rc);
    CHECK_FALSE(split.converged);
    CHECK(split.split_iters.front() == sc.split.max_split_iters);

    rc.strategy = Strategy::Monolithic;
    RunResult mono = run_simulation(model, init, rc);
    CHECK(mono.converged);
}
