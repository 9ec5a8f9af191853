#include "leslab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "leslab/checkpoint.hpp"

namespace leslab {

ModelParams ModelParams::make(double nu, double cs, double delta, double U, double L) {
    ModelParams p;
    p.nu = nu;
    p.cs = cs;
    p.delta = delta;
    p.U = U;
    p.L = L;
    p.re = U * L / nu;
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (!(nu > 0.0)) throw precondition_error("viscosity must be positive");
    if (cs < 0.0 || delta < 0.0) throw precondition_error("Smagorinsky parameters must be nonnegative");
    if (U < 0.0) throw precondition_error("driving speed must be nonnegative");
    if (!(L > 0.0)) throw precondition_error("length scale must be positive");
    const double re_expect = U * L / nu;
    if (std::abs(re - re_expect) > 1e-9 * std::max(1.0, re_expect))
        throw precondition_error("re does not equal U*L/nu");
}

void TimeSteppingConfig::validate() const {
    if (!(dt > 0.0)) throw precondition_error("dt must be positive");
    if (t_final < 0.0) throw precondition_error("t_final must be nonnegative");
    if (!(picard_tol > 0.0)) throw precondition_error("picard_tol must be positive");
    if (picard_max < 1) throw precondition_error("picard_max must be at least 1");
    if (output_every < 1) throw precondition_error("output_every must be at least 1");
}

namespace {

// Constraint-independent part of the saddle system: the divergence coupling
// (already reduced), the zero-mean pressure row, and a structural zero in
// the corner so the pattern covers the full bordered matrix.
struct SaddleSkeleton {
    int nu = 0, np = 0, ntot = 0;
    Triplets base;
    Eigen::VectorXd lift0;  // Dirichlet lift of the divergence block
    SpMat B_raw;
};

SaddleSkeleton make_skeleton(const MixedSpace& s, ExecMode mode) {
    SaddleSkeleton sk;
    sk.nu = s.n_vel_reduced;
    sk.np = s.n_pres_reduced;
    sk.ntot = sk.nu + sk.np + 1;
    sk.lift0 = Eigen::VectorXd::Zero(sk.ntot);

    Triplets div;
    divergence_triplets(s, div, mode);
    sk.B_raw.resize(s.n_pres, s.n_vel);
    sk.B_raw.setFromTriplets(div.begin(), div.end());
    for (const auto& t : div) {
        const int P = sk.nu + s.pmap[t.row()];
        const int J = s.vmap[t.col()];
        if (J < 0) {
            sk.lift0[P] += -t.value() * s.vval[t.col()];
        } else {
            sk.base.emplace_back(P, J, -t.value());
            sk.base.emplace_back(J, P, -t.value());
        }
    }
    const Eigen::VectorXd m_red = s.reduce_pressure_load(pressure_integrals(s));
    for (int q = 0; q < sk.np; ++q) {
        sk.base.emplace_back(sk.nu + q, sk.ntot - 1, m_red[q]);
        sk.base.emplace_back(sk.ntot - 1, sk.nu + q, m_red[q]);
    }
    sk.base.emplace_back(sk.ntot - 1, sk.ntot - 1, 0.0);
    return sk;
}

void reduce_vel(const MixedSpace& s, const Triplets& raw, Triplets& out, Eigen::VectorXd& lift) {
    for (const auto& t : raw) {
        const int I = s.vmap[t.row()];
        if (I < 0) continue;
        const int J = s.vmap[t.col()];
        if (J < 0)
            lift[I] += t.value() * s.vval[t.col()];
        else
            out.emplace_back(I, J, t.value());
    }
}

double relative_residual(const SpMat& K, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) {
    const double rnorm = (K * x - rhs).norm();
    double kmax = 0.0;
    if (K.nonZeros() > 0)
        kmax = Eigen::Map<const Eigen::ArrayXd>(K.valuePtr(), K.nonZeros()).abs().maxCoeff();
    const double denom = rhs.norm() + kmax * x.norm();
    return denom > 0.0 ? rnorm / denom : 0.0;
}

double triplet_quadratic_form(const Triplets& t, const Eigen::VectorXd& a) {
    double q = 0.0;
    for (const auto& e : t) q += e.value() * a[e.row()] * a[e.col()];
    return q;
}

}  // namespace

SaddlePoint solve_saddle(const SpMat& K, const SpMat& B, const Eigen::VectorXd& m,
                         const Eigen::VectorXd& rhs_u, const Eigen::VectorXd& rhs_p) {
    const int nu = static_cast<int>(K.rows());
    const int np = static_cast<int>(B.rows());
    if (K.cols() != nu || B.cols() != nu || m.size() != np || rhs_u.size() != nu ||
        rhs_p.size() != np)
        throw precondition_error("saddle block dimensions disagree");
    const int ntot = nu + np + 1;

    Triplets tris;
    tris.reserve(static_cast<size_t>(K.nonZeros() + 2 * B.nonZeros() + 2 * np + 1));
    for (int k = 0; k < K.outerSize(); ++k)
        for (SpMat::InnerIterator it(K, k); it; ++it)
            tris.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < B.outerSize(); ++k)
        for (SpMat::InnerIterator it(B, k); it; ++it) {
            const int q = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            tris.emplace_back(nu + q, j, -it.value());
            tris.emplace_back(j, nu + q, -it.value());
        }
    for (int q = 0; q < np; ++q) {
        tris.emplace_back(nu + q, ntot - 1, m[q]);
        tris.emplace_back(ntot - 1, nu + q, m[q]);
    }
    tris.emplace_back(ntot - 1, ntot - 1, 0.0);

    SpMat S(ntot, ntot);
    S.setFromTriplets(tris.begin(), tris.end());
    Eigen::VectorXd rhs(ntot);
    rhs.head(nu) = rhs_u;
    rhs.segment(nu, np) = rhs_p;
    rhs[ntot - 1] = 0.0;

    Eigen::SparseLU<SpMat> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success) throw numerical_error("saddle factorization failed");
    Eigen::VectorXd x = lu.solve(rhs);

    SaddlePoint sol;
    sol.rel_residual = relative_residual(S, x, rhs);
    if (sol.rel_residual > 1e-10) throw numerical_error("saddle solve residual too large");
    sol.u = x.head(nu);
    sol.p = x.segment(nu, np);
    sol.mu = x[ntot - 1];
    return sol;
}

FlowState solve_stokes(const MixedSpace& s, const ModelParams& params, const ForceFn& force,
                       ExecMode mode) {
    params.validate();
    SaddleSkeleton sk = make_skeleton(s, mode);
    Triplets tris = sk.base;
    Eigen::VectorXd lift = sk.lift0;
    Triplets araw;
    stiffness_triplets(s, params.nu, araw, mode);
    reduce_vel(s, araw, tris, lift);

    SpMat K(sk.ntot, sk.ntot);
    K.setFromTriplets(tris.begin(), tris.end());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sk.ntot);
    if (force) {
        const Eigen::VectorXd f0 =
            assemble_body_force(s, [&](const Vec2& x) { return force(x, 0.0); }, mode);
        rhs.head(sk.nu) = s.reduce_load(f0);
    }
    rhs -= lift;

    Eigen::SparseLU<SpMat> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) throw numerical_error("Stokes factorization failed");
    Eigen::VectorXd x = lu.solve(rhs);
    if (relative_residual(K, x, rhs) > 1e-10)
        throw numerical_error("Stokes solve residual too large");

    FlowState st;
    st.u = s.expand_velocity(x.head(sk.nu));
    st.p = s.expand_pressure(x.segment(sk.nu, sk.np));
    st.t = 0.0;

    const double un = st.u.norm();
    const double dn = s.reduce_pressure_load(sk.B_raw * st.u).norm();
    if (dn > 1e-10 * std::max(un, 1e-30))
        throw numerical_error("Stokes solution violates the discrete divergence constraint");
    return st;
}

Stepper::Stepper(const MixedSpace& space, const ModelParams& params, const TimeSteppingConfig& cfg,
                 ForceFn force, ExecMode mode)
    : s_(space), params_(params), cfg_(cfg), force_(std::move(force)), mode_(mode) {
    params_.validate();
    cfg_.validate();
    nu_red_ = s_.n_vel_reduced;
    np_red_ = s_.n_pres_reduced;
    ntot_ = nu_red_ + np_red_ + 1;

    SaddleSkeleton sk = make_skeleton(s_, mode_);
    const_reduced_ = std::move(sk.base);
    const_lift_ = std::move(sk.lift0);
    B_raw_ = std::move(sk.B_raw);

    Triplets raw;
    mass_triplets(s_, 1.0, raw, mode_);
    M_raw_.resize(s_.n_vel, s_.n_vel);
    M_raw_.setFromTriplets(raw.begin(), raw.end());
    raw.clear();
    mass_triplets(s_, 1.0 / cfg_.dt, raw, mode_);
    reduce_vel(s_, raw, const_reduced_, const_lift_);

    raw.clear();
    stiffness_triplets(s_, 1.0, raw, mode_);
    A_raw_.resize(s_.n_vel, s_.n_vel);
    A_raw_.setFromTriplets(raw.begin(), raw.end());
    raw.clear();
    stiffness_triplets(s_, params_.nu, raw, mode_);
    reduce_vel(s_, raw, const_reduced_, const_lift_);

    gext_ = s_.dirichlet_extension();
    Ksad_.resize(ntot_, ntot_);
}

void Stepper::reduce_vel_triplets(const Triplets& raw, Triplets& out, Eigen::VectorXd& lift) const {
    reduce_vel(s_, raw, out, lift);
}

// Solves the current Ksad_ system, preferring defect correction against the
// last factorization over refactorizing. The accepted solution satisfies the
// current matrix to kTol relative, so reuse changes cost, never results.
void Stepper::solve_reused(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) {
    constexpr double kTol = 1e-13;
    constexpr int kMaxSweeps = 12;
    if (!analyzed_) {
        lu_.analyzePattern(Ksad_);
        analyzed_ = true;
    }
    const double rhs_norm = rhs.norm();
    const double kmax =
        Eigen::Map<const Eigen::VectorXd>(Ksad_.valuePtr(), Ksad_.nonZeros()).cwiseAbs().maxCoeff();
    auto attempt = [&]() -> bool {
        x = lu_.solve(rhs);
        Eigen::VectorXd r = rhs - Ksad_ * x;
        double rn = r.norm();
        if (rn <= kTol * (rhs_norm + kmax * x.norm())) return true;
        for (int s = 0; s < kMaxSweeps; ++s) {
            x += lu_.solve(r);
            r = rhs - Ksad_ * x;
            const double rn_new = r.norm();
            if (rn_new <= kTol * (rhs_norm + kmax * x.norm())) return true;
            if (!(rn_new < 0.7 * rn)) return false;  // stalled: the matrix drifted too far
            rn = rn_new;
        }
        return false;
    };
    if (factorized_ && attempt()) return;
    lu_.factorize(Ksad_);
    if (lu_.info() != Eigen::Success) throw numerical_error("saddle factorization failed");
    factorized_ = true;
    attempt();  // fresh factorization; the caller's residual check has the last word
}

StepResult Stepper::step(FlowState& state) {
    if (state.u.size() != s_.n_vel) throw precondition_error("state velocity size mismatch");
    const double dt = cfg_.dt;
    const double t_next = state.t + dt;

    Eigen::VectorXd rhs_const = Eigen::VectorXd::Zero(ntot_);
    {
        Eigen::VectorXd f_raw = M_raw_ * state.u / dt;
        if (force_) {
            f_raw += assemble_body_force(s_, [&](const Vec2& x) { return force_(x, t_next); },
                                         mode_);
        }
        rhs_const.head(nu_red_) = s_.reduce_load(f_raw);
    }

    StepResult res;
    Eigen::VectorXd u_star = state.u;
    Eigen::VectorXd u_new_raw, x, rhs;
    const double csd2 = params_.cs_delta_sq();

    for (int it = 1; it <= cfg_.picard_max; ++it) {
        nt_raw_.clear();
        st_raw_.clear();
        advection_triplets(s_, u_star, nt_raw_, mode_);
        eddy_viscosity_triplets(s_, u_star, csd2, st_raw_, mode_);

        scratch_ = const_reduced_;
        Eigen::VectorXd lift = const_lift_;
        reduce_vel(s_, nt_raw_, scratch_, lift);
        reduce_vel(s_, st_raw_, scratch_, lift);
        Ksad_.setFromTriplets(scratch_.begin(), scratch_.end());
        rhs = rhs_const - lift;

        solve_reused(rhs, x);
        res.picard_residual = relative_residual(Ksad_, x, rhs);
        if (!(res.picard_residual <= 1e-10))
            throw numerical_error("saddle solve residual too large");

        u_new_raw = s_.expand_velocity(x.head(nu_red_));
        res.iterations = it;
        res.increment = (u_new_raw - u_star).norm() / std::max(u_new_raw.norm(), 1e-30);
        if (res.increment <= cfg_.picard_tol || it == cfg_.picard_max) {
            res.converged = res.increment <= cfg_.picard_tol;
            break;  // keep nt_raw_/st_raw_ frozen at the matrices actually solved
        }
        u_star = u_new_raw;
    }

    res.div_residual = s_.reduce_pressure_load(B_raw_ * u_new_raw).norm() /
                       std::max(u_new_raw.norm(), 1e-30);

    // Discrete energy balance of the solved system. All quadratic forms use
    // the homogeneous parts (Dirichlet extension subtracted), which match the
    // reduced unknowns entry for entry.
    {
        const Eigen::VectorXd uzn = state.u - gext_;
        const Eigen::VectorXd uzp = u_new_raw - gext_;
        const Eigen::VectorXd dz = uzp - uzn;
        const double keP = 0.5 * uzp.dot(M_raw_ * uzp);
        const double keN = 0.5 * uzn.dot(M_raw_ * uzn);
        const double dd = 0.5 * dz.dot(M_raw_ * dz);
        const double visc = params_.nu * uzp.dot(A_raw_ * uzp);
        const double qfS = triplet_quadratic_form(st_raw_, uzp);
        const double qfN = triplet_quadratic_form(nt_raw_, uzp);
        const double lhs = keP - keN + dd + dt * (visc + qfS + qfN);
        const double work = dt * x.head(nu_red_).dot(rhs.head(nu_red_)) -
                            dt * x.segment(nu_red_, np_red_).dot(rhs.segment(nu_red_, np_red_)) -
                            uzp.dot(M_raw_ * uzn);
        double scale = std::abs(work);
        for (double v : {keP, keN, dd, dt * visc, dt * qfS, dt * qfN})
            scale = std::max(scale, std::abs(v));
        res.energy_residual = scale > 0.0 ? std::abs(lhs - work) / scale : 0.0;
        res.numerical_dissipation = dd;
    }

    state.u = std::move(u_new_raw);
    state.p = s_.expand_pressure(x.segment(nu_red_, np_red_));
    state.t = t_next;
    return res;
}

FlowState step_backward_euler(const FlowState& state, const MixedSpace& space,
                              const ModelParams& params, const TimeSteppingConfig& cfg,
                              StepResult* result, ExecMode mode) {
    Stepper stepper(space, params, cfg, nullptr, mode);
    FlowState next = state;
    StepResult r = stepper.step(next);
    if (result) *result = r;
    return next;
}

TransientResult run_transient(const MixedSpace& space, const ModelParams& params,
                              const TimeSteppingConfig& cfg, const TransientOptions& opts) {
    params.validate();
    cfg.validate();
    TransientResult out;
    out.series.U = params.U;
    out.series.L = params.L;
    const double burn_in = opts.burn_in >= 0.0 ? opts.burn_in : cfg.t_final / 2.0;
    out.series.burn_in = burn_in;

    auto sample = [&](const FlowState& st) {
        out.series.times.push_back(st.t);
        out.series.eps.push_back(dissipation_rate(space, st, params, opts.mode));
        out.series.ke.push_back(kinetic_energy(space, st, opts.mode));
    };

    try {
        FlowState st = solve_stokes(space, params, opts.body_force, opts.mode);
        long nsteps = std::llround(cfg.t_final / cfg.dt);
        if (nsteps < 1) nsteps = 1;
        Stepper stepper(space, params, cfg, opts.body_force, opts.mode);
        sample(st);
        for (long k = 1; k <= nsteps; ++k) {
            const StepResult r = stepper.step(st);
            out.picard.total_iterations += r.iterations;
            out.picard.max_iterations = std::max(out.picard.max_iterations, r.iterations);
            if (!r.converged) ++out.picard.nonconverged_steps;
            ++out.picard.steps;
            if (opts.on_step) opts.on_step(st, r, static_cast<int>(k));
            if (k % cfg.output_every == 0 || k == nsteps) sample(st);
            if (opts.checkpoint_every > 0 && !opts.checkpoint_path.empty() &&
                (k % opts.checkpoint_every == 0 || k == nsteps))
                write_checkpoint(opts.checkpoint_path, *space.mesh, st);
        }
        out.final_state = std::move(st);
    } catch (const std::exception& e) {
        out.completed = false;
        out.error = e.what();
    }

    if (!out.series.times.empty() && burn_in < out.series.times.back()) {
        const auto avg = time_average(out.series, burn_in);
        out.series.avg_eps = avg.first;
        out.series.c_eps = avg.second;
    }
    return out;
}

}  // namespace leslab
