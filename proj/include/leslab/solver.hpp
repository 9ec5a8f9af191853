#ifndef LESLAB_SOLVER_HPP
#define LESLAB_SOLVER_HPP

#include <Eigen/SparseLU>
#include <functional>
#include <string>

#include "leslab/fem.hpp"
#include "leslab/params.hpp"
#include "leslab/stats.hpp"

namespace leslab {

using ForceFn = std::function<Vec2(const Vec2&, double)>;  // (position, time)

struct SaddlePoint {
    Eigen::VectorXd u;  // reduced velocity
    Eigen::VectorXd p;  // reduced pressure
    double mu = 0.0;    // zero-mean pressure multiplier
    double rel_residual = 0.0;
};

/// Direct solve of [K -B^T 0; -B 0 m; 0 m^T 0] [u;p;mu] = [rhs_u; rhs_p; 0]
/// on reduced (constrained) unknowns. m holds the pressure-basis integrals,
/// so the last row pins the pressure mean to zero. Throws numerical_error on
/// factorization failure or a relative residual above 1e-10.
SaddlePoint solve_saddle(const SpMat& K, const SpMat& B, const Eigen::VectorXd& m,
                         const Eigen::VectorXd& rhs_u, const Eigen::VectorXd& rhs_p);

/// Steady Stokes with the space's Dirichlet data: nu (grad u, grad v)
/// - (p, div v) = (f, v), (div u, q) = 0.
FlowState solve_stokes(const MixedSpace& space, const ModelParams& params,
                       const ForceFn& force = nullptr,
                       ExecMode mode = exec::default_mode());

struct StepResult {
    int iterations = 0;
    bool converged = false;     // Picard reached picard_tol
    double increment = 0.0;     // last relative Picard increment
    double div_residual = 0.0;  // periodic-reduced ||B u|| / ||u||
    /// Relative defect of the discrete energy balance of the solved system:
    /// 1/2||u+||_M^2 - 1/2||u_n||_M^2 + 1/2||du||_M^2
    ///   + dt [ nu ||u+||_A^2 + (u+)^T S(u*) u+ + (u+)^T N(u*) u+ ]
    /// minus the step's work terms, over the largest participating term.
    /// N and S are frozen at the final Picard linearization point u*, which
    /// is what the solver actually inverted.
    double energy_residual = 0.0;
    double numerical_dissipation = 0.0;  // 1/2 ||du||_M^2
    double picard_residual = 0.0;        // linear-system relative residual
};

/// Backward-Euler stepper with Picard linearization of both the advection
/// and eddy-viscosity terms. Caches the constant part of the saddle system
/// and the symbolic factorization; the sparsity pattern is identical across
/// iterations because N and S share the stiffness connectivity.
class Stepper {
public:
    Stepper(const MixedSpace& space, const ModelParams& params, const TimeSteppingConfig& cfg,
            ForceFn force = nullptr, ExecMode mode = exec::default_mode());

    /// Advances state by cfg.dt in place. Non-convergence of Picard is
    /// reported in the result, not thrown; linear-solver breakdown throws.
    StepResult step(FlowState& state);

    const SpMat& mass_raw() const { return M_raw_; }
    const SpMat& stiffness_raw() const { return A_raw_; }
    const SpMat& divergence_raw() const { return B_raw_; }

private:
    const MixedSpace& s_;
    ModelParams params_;
    TimeSteppingConfig cfg_;
    ForceFn force_;
    ExecMode mode_;
    int nu_red_, np_red_, ntot_;

    SpMat M_raw_, A_raw_, B_raw_;
    Triplets const_reduced_;      // M/dt + nu A + saddle B blocks + mean row
    Eigen::VectorXd const_lift_;  // Dirichlet lift of the constant triplets
    Eigen::VectorXd gext_;        // raw Dirichlet extension
    Eigen::SparseLU<SpMat> lu_;
    bool analyzed_ = false;
    bool factorized_ = false;

    Triplets scratch_, nt_raw_, st_raw_;
    SpMat Ksad_;

    void reduce_vel_triplets(const Triplets& raw, Triplets& out, Eigen::VectorXd& lift) const;
    void solve_reused(const Eigen::VectorXd& rhs, Eigen::VectorXd& x);
};

/// Single backward-Euler step (throwaway stepper); prefer Stepper in loops.
FlowState step_backward_euler(const FlowState& state, const MixedSpace& space,
                              const ModelParams& params, const TimeSteppingConfig& cfg,
                              StepResult* result = nullptr,
                              ExecMode mode = exec::default_mode());

struct PicardStats {
    long total_iterations = 0;
    int max_iterations = 0;
    int nonconverged_steps = 0;
    int steps = 0;
};

struct TransientOptions {
    double burn_in = -1.0;  // < 0 selects t_final / 2
    ForceFn body_force;
    std::function<void(const FlowState&, const StepResult&, int)> on_step;
    int checkpoint_every = 0;  // steps; 0 disables
    std::string checkpoint_path;
    ExecMode mode = exec::default_mode();
};

struct TransientResult {
    DissipationSeries series;
    FlowState final_state;
    PicardStats picard;
    bool completed = true;
    std::string error;  // set when aborted; series holds the partial history
};

/// Stokes initialization followed by backward-Euler stepping to t_final,
/// sampling dissipation statistics every output_every steps (plus the
/// initial and final instants). Step failures abort the run and return the
/// partial series with the error recorded.
TransientResult run_transient(const MixedSpace& space, const ModelParams& params,
                              const TimeSteppingConfig& cfg, const TransientOptions& opts = {});

}  // namespace leslab

#endif
