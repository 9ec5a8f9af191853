#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "leslab/checkpoint.hpp"
#include "leslab/solver.hpp"

using namespace leslab;

namespace {

Mesh& keep_mesh(Mesh&& m) {
    static std::vector<Mesh> store;
    store.push_back(std::move(m));
    return store.back();
}

DirichletSpec couette_bc(double U) {
    DirichletSpec bc;
    bc[BoundaryMarker::TopWall] = [U](const Vec2&) { return Vec2{U, 0.0}; };
    bc[BoundaryMarker::BottomWall] = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    return bc;
}

DirichletSpec noslip_box() {
    DirichletSpec bc;
    auto zero = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    bc[BoundaryMarker::TopWall] = zero;
    bc[BoundaryMarker::BottomWall] = zero;
    bc[BoundaryMarker::PeriodicLeft] = zero;
    bc[BoundaryMarker::PeriodicRight] = zero;
    return bc;
}

MixedSpace couette_space(int n, double U = 1.0) {
    ChannelSpec cs;
    cs.nx = n;
    cs.ny = n;
    return MixedSpace::build(keep_mesh(build_channel_mesh(cs)), couette_bc(U));
}

}  // namespace

TEST_CASE("solve_saddle on a hand-sized system") {
    SpMat K(2, 2);
    K.setIdentity();
    SpMat B(1, 2);
    B.insert(0, 0) = 1.0;
    B.insert(0, 1) = 1.0;
    Eigen::VectorXd m(1), rhs_u(2), rhs_p(1);
    m << 1.0;
    rhs_u << 1.0, 2.0;
    rhs_p << 3.0;
    // mean row forces p = 0, then u = rhs_u and mu = rhs_p + B u
    SaddlePoint sol = solve_saddle(K, B, m, rhs_u, rhs_p);
    CHECK(std::abs(sol.u[0] - 1.0) < 1e-13);
    CHECK(std::abs(sol.u[1] - 2.0) < 1e-13);
    CHECK(std::abs(sol.p[0]) < 1e-13);
    CHECK(std::abs(sol.mu - 6.0) < 1e-13);
    CHECK(sol.rel_residual < 1e-12);
}

TEST_CASE("Stokes reproduces the Couette profile exactly") {
    MixedSpace s = couette_space(6);
    ModelParams params = ModelParams::make(0.01, 0.0, 0.0, 1.0, 1.0);
    FlowState st = solve_stokes(s, params);
    CHECK(error_l2(s, st.u, [](const Vec2& x) { return Vec2{x.y, 0.0}; }) < 1e-10);
    CHECK(st.p.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Stokes with homogeneous data is zero") {
    MixedSpace s = MixedSpace::build(keep_mesh(build_annulus_mesh(AnnulusSpec{})), [] {
        DirichletSpec bc;
        auto zero = [](const Vec2&) { return Vec2{0.0, 0.0}; };
        bc[BoundaryMarker::OuterCircle] = zero;
        bc[BoundaryMarker::InnerCircle] = zero;
        return bc;
    }());
    ModelParams params = ModelParams::make(0.1, 0.0, 0.0, 1.0, 1.0);
    FlowState st = solve_stokes(s, params);
    CHECK(st.u.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("stepping config validation") {
    MixedSpace s = couette_space(3);
    ModelParams params = ModelParams::make(0.01, 0.0, 0.0, 1.0, 1.0);
    TimeSteppingConfig cfg;  // dt = 0
    CHECK_THROWS_AS(Stepper(s, params, cfg), precondition_error);
    cfg.dt = 0.01;
    cfg.picard_max = 0;
    CHECK_THROWS_AS(Stepper(s, params, cfg), precondition_error);
}

TEST_CASE("model params validation") {
    CHECK_THROWS_AS(ModelParams::make(0.0, 0.0, 0.0, 1.0, 1.0), precondition_error);
    CHECK_THROWS_AS(ModelParams::make(0.1, -1.0, 0.1, 1.0, 1.0), precondition_error);
    ModelParams p = ModelParams::make(0.01, 0.17, 0.1, 1.0, 1.0);
    CHECK(p.re == doctest::Approx(100.0));
    p.re = 5.0;  // now inconsistent with U L / nu
    CHECK_THROWS_AS(p.validate(), precondition_error);
}

TEST_CASE("Couette profile is a fixed point of both models") {
    for (double cs : {0.0, 0.17}) {
        MixedSpace s = couette_space(8);
        const double h = s.mesh->h_max;
        ModelParams params = ModelParams::make(0.01, cs, h, 1.0, 1.0);
        TimeSteppingConfig cfg;
        cfg.dt = 0.01;

        FlowState st;
        st.u = interpolate(s, [](const Vec2& x) { return Vec2{x.y, 0.0}; });
        st.p = Eigen::VectorXd::Zero(s.n_pres);
        Eigen::VectorXd u0 = st.u;

        Stepper stepper(s, params, cfg);
        for (int k = 0; k < 10; ++k) {
            StepResult r = stepper.step(st);
            CHECK(r.converged);
            CHECK(r.iterations <= 2);
            CHECK(r.div_residual < 1e-10);
        }
        const double drift = std::sqrt(integral_l2_sq(s, st.u - u0));
        CHECK(drift < 1e-9);
    }
}

TEST_CASE("energy identity closes to machine precision") {
    MixedSpace s = MixedSpace::build(
        keep_mesh(build_channel_mesh([] {
            ChannelSpec c;
            c.nx = 6;
            c.ny = 6;
            return c;
        }())),
        noslip_box());
    ModelParams params = ModelParams::make(0.05, 0.17, 0.1, 1.0, 1.0);
    TimeSteppingConfig cfg;
    cfg.dt = 0.02;

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd red(s.n_vel_reduced);
    for (int i = 0; i < s.n_vel_reduced; ++i) red[i] = dist(rng);

    FlowState st;
    st.u = s.expand_velocity(red);
    st.p = Eigen::VectorXd::Zero(s.n_pres);

    Stepper stepper(s, params, cfg);
    double ke_prev = st.u.dot(st.u);
    for (int k = 0; k < 25; ++k) {
        StepResult r = stepper.step(st);
        CHECK(r.energy_residual <= 1e-10);
        CHECK(r.numerical_dissipation >= 0.0);
        // undriven flow loses energy monotonically
        const double ke = st.u.dot(st.u);
        CHECK(ke <= ke_prev * (1.0 + 1e-12));
        ke_prev = ke;
    }
}

TEST_CASE("Picard non-convergence is reported, not thrown") {
    MixedSpace s = couette_space(5);
    ModelParams params = ModelParams::make(0.001, 0.0, 0.0, 1.0, 1.0);
    TimeSteppingConfig cfg;
    cfg.dt = 0.5;  // huge step, strong advection
    cfg.picard_max = 1;
    cfg.picard_tol = 1e-14;

    FlowState st;
    // far from the solver's fixed point so one iteration cannot converge
    st.u = interpolate(s, [](const Vec2& x) {
        return Vec2{x.y + std::sin(6.0 * x.x) * x.y * (1.0 - x.y), 0.0};
    });
    st.p = Eigen::VectorXd::Zero(s.n_pres);
    Stepper stepper(s, params, cfg);
    StepResult r = stepper.step(st);
    CHECK(r.iterations == 1);
    CHECK(!r.converged);
}

TEST_CASE("checkpoint round trip and mesh guard") {
    Mesh& mesh = keep_mesh(build_channel_mesh(ChannelSpec{}));
    MixedSpace s = MixedSpace::build(mesh, couette_bc(1.0));
    FlowState st;
    st.u = interpolate(s, [](const Vec2& x) { return Vec2{x.y, -x.x}; });
    st.p = Eigen::VectorXd::Constant(s.n_pres, 0.25);
    st.t = 1.5;

    const std::string path = "chkpt_test.txt";
    write_checkpoint(path, mesh, st);
    FlowState back = read_checkpoint(path, mesh);
    CHECK(back.t == st.t);
    REQUIRE(back.u.size() == st.u.size());
    CHECK((back.u - st.u).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.p - st.p).cwiseAbs().maxCoeff() == 0.0);

    Mesh other = build_channel_mesh([] {
        ChannelSpec c;
        c.nx = 3;
        c.ny = 3;
        return c;
    }());
    CHECK_THROWS_AS(read_checkpoint(path, other), numerical_error);
    std::remove(path.c_str());
}

TEST_CASE("run_transient samples on the configured cadence") {
    MixedSpace s = couette_space(4);
    ModelParams params = ModelParams::make(0.01, 0.0, 0.0, 1.0, 1.0);
    TimeSteppingConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 0.05;
    cfg.output_every = 2;

    TransientResult res = run_transient(s, params, cfg);
    REQUIRE(res.completed);
    REQUIRE(res.series.times.size() == 4);  // t = 0, 0.02, 0.04, 0.05
    CHECK(res.series.times.front() == 0.0);
    CHECK(res.series.times.back() == doctest::Approx(0.05));
    for (std::size_t i = 1; i < res.series.times.size(); ++i)
        CHECK(res.series.times[i] > res.series.times[i - 1]);
    CHECK(res.picard.steps == 5);
    CHECK(res.picard.nonconverged_steps == 0);
    CHECK(std::isfinite(res.series.avg_eps));
    // Couette: eps = nu * U^2/L^2 -> c_eps = 1/Re
    CHECK(res.series.c_eps == doctest::Approx(0.01).epsilon(1e-8));
}

TEST_CASE("transient runs are deterministic across exec modes") {
    auto run = [](ExecMode mode) {
        ChannelSpec c;
        c.nx = 5;
        c.ny = 5;
        Mesh mesh = build_channel_mesh(c);
        MixedSpace s = MixedSpace::build(mesh, couette_bc(1.0));
        ModelParams params = ModelParams::make(0.02, 0.17, mesh.h_max, 1.0, 1.0);
        TimeSteppingConfig cfg;
        cfg.dt = 0.01;
        cfg.t_final = 0.03;
        TransientOptions opts;
        opts.mode = mode;
        TransientResult r = run_transient(s, params, cfg, opts);
        REQUIRE(r.completed);
        return r;
    };
    TransientResult a = run(ExecMode::Serial);
    TransientResult b = run(ExecMode::Parallel);
    REQUIRE(a.series.eps.size() == b.series.eps.size());
    for (std::size_t i = 0; i < a.series.eps.size(); ++i) {
        CHECK(a.series.eps[i] == b.series.eps[i]);  // bitwise
        CHECK(a.series.ke[i] == b.series.ke[i]);
    }
    CHECK((a.final_state.u - b.final_state.u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transient failure is reported with partial series") {
    MixedSpace s = couette_space(4);
    ModelParams params = ModelParams::make(0.01, 0.0, 0.0, 1.0, 1.0);
    TimeSteppingConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 0.05;
    TransientOptions opts;
    int boom = 0;
    opts.on_step = [&boom](const FlowState&, const StepResult&, int) {
        if (++boom == 3) throw numerical_error("synthetic failure");
    };
    TransientResult res = run_transient(s, params, cfg, opts);
    CHECK(!res.completed);
    CHECK(res.error == "synthetic failure");
    CHECK(res.series.times.size() >= 3);  // t=0 plus the completed steps
}
