#ifndef LESLAB_FEM_HPP
#define LESLAB_FEM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <vector>

#include "leslab/core.hpp"
#include "leslab/mesh.hpp"

namespace leslab {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

using BoundaryFn = std::function<Vec2(const Vec2&)>;
using DirichletSpec = std::map<BoundaryMarker, BoundaryFn>;

/// Per-element cache: global node ids and physical P2/P1 gradients at the
/// quadrature points. Local node order: vertices 0,1,2 then the midpoints of
/// edges (0,1), (1,2), (2,0). Local velocity dof = 2*node + component.
struct ElemData {
    int vnode[6];
    int pnode[3];
    double detJ;
    double g2x[7][6];  // d(phi_b)/dx at quad point q
    double g2y[7][6];
    double p1gx[3];    // P1 gradients, constant on the element
    double p1gy[3];
    Vec2 xq[7];        // physical quadrature points
};

/// Taylor-Hood pair on a triangulation: continuous quadratic vector velocity
/// (vertex + edge-midpoint nodes, components interleaved: dof = 2*node + c)
/// and continuous linear pressure (one dof per vertex).
///
/// Constraints are stored as raw-dof maps. Velocity: vmap[i] >= 0 gives the
/// reduced index (periodic slaves share their master's), vmap[i] == -1 marks
/// a Dirichlet dof with prescribed value vval[i]. Pressure carries only the
/// periodic identification. PeriodicLeft/PeriodicRight edges are paired by
/// wall-normal coordinate unless those markers appear in the Dirichlet spec;
/// Dirichlet wins at shared corners, so the two maps stay disjoint.
struct MixedSpace {
    const Mesh* mesh = nullptr;
    std::vector<std::array<int, 2>> edges;      // unique edges, (a, b) with a < b
    std::vector<std::array<int, 3>> tri_edges;  // per-triangle edge ids, local order
    std::vector<Vec2> vel_nodes;                // vertices then edge midpoints
    int n_vel = 0;
    int n_pres = 0;

    std::vector<int> vmap;
    std::vector<double> vval;
    int n_vel_reduced = 0;
    std::vector<int> pmap;
    int n_pres_reduced = 0;

    std::vector<ElemData> elems;

    static MixedSpace build(const Mesh& mesh, const DirichletSpec& dirichlet = {});

    int n_vel_nodes() const { return static_cast<int>(vel_nodes.size()); }
    int vel_dof(int node, int comp) const { return 2 * node + comp; }

    Eigen::VectorXd reduce_velocity(const Eigen::VectorXd& raw) const;
    /// Reduced -> raw, filling Dirichlet dofs with their prescribed values.
    Eigen::VectorXd expand_velocity(const Eigen::VectorXd& reduced) const;
    /// Reduced -> raw with zero on Dirichlet dofs (homogeneous extension).
    Eigen::VectorXd expand_velocity_homogeneous(const Eigen::VectorXd& reduced) const;
    /// Raw load accumulation (transpose of homogeneous expansion).
    Eigen::VectorXd reduce_load(const Eigen::VectorXd& raw) const;
    Eigen::VectorXd reduce_pressure(const Eigen::VectorXd& raw) const;
    Eigen::VectorXd expand_pressure(const Eigen::VectorXd& reduced) const;
    /// Accumulating pressure reduction (transpose of expansion).
    Eigen::VectorXd reduce_pressure_load(const Eigen::VectorXd& raw) const;

    /// Raw velocity vector holding the Dirichlet values and zero elsewhere.
    Eigen::VectorXd dirichlet_extension() const;
};

struct FlowState {
    Eigen::VectorXd u;  // raw velocity coefficients, constraints satisfied
    Eigen::VectorXd p;  // raw pressure coefficients, zero mean
    double t = 0.0;
};

struct AssembledForms {
    SpMat M;  // velocity mass
    SpMat A;  // velocity stiffness, int grad u : grad v
    SpMat B;  // divergence, B(q, vdof) = int psi_q d_c phi
    const char* quadrature = "";
};

// Triplet emitters (raw dof indices); the solver feeds these straight into
// the constrained saddle system. scale multiplies every entry.
void mass_triplets(const MixedSpace& s, double scale, Triplets& out,
                   ExecMode mode = exec::default_mode());
void stiffness_triplets(const MixedSpace& s, double scale, Triplets& out,
                        ExecMode mode = exec::default_mode());
void divergence_triplets(const MixedSpace& s, Triplets& out,
                         ExecMode mode = exec::default_mode());
void advection_triplets(const MixedSpace& s, const Eigen::VectorXd& u_adv, Triplets& out,
                        ExecMode mode = exec::default_mode());
void eddy_viscosity_triplets(const MixedSpace& s, const Eigen::VectorXd& u_lin,
                             double cs_delta_sq, Triplets& out,
                             ExecMode mode = exec::default_mode());

AssembledForms assemble_constant_forms(const MixedSpace& s, ExecMode mode = exec::default_mode());

/// N(u_adv) with w^T N v = b(u_adv, v, w); skew-symmetric by construction.
SpMat assemble_advection(const MixedSpace& s, const Eigen::VectorXd& u_adv,
                         ExecMode mode = exec::default_mode());

/// S(u_lin) with w^T S v = int cs_delta_sq |grad u_lin| grad v : grad w;
/// the modulus is frozen at u_lin (Picard linearization), so S is symmetric
/// positive semidefinite.
SpMat assemble_eddy_viscosity(const MixedSpace& s, const Eigen::VectorXd& u_lin,
                              double cs_delta_sq, ExecMode mode = exec::default_mode());

/// Skew form b(u,v,w) = 1/2 (u . grad v, w) - 1/2 (u . grad w, v).
double apply_trilinear(const MixedSpace& s, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w, ExecMode mode = exec::default_mode());

Eigen::VectorXd assemble_body_force(const MixedSpace& s, const BoundaryFn& f,
                                    ExecMode mode = exec::default_mode());

/// Nodal interpolant of an analytic vector field.
Eigen::VectorXd interpolate(const MixedSpace& s, const BoundaryFn& g);

/// int |grad u|_F^p over the mesh (degree-5 quadrature).
double integral_grad_pow(const MixedSpace& s, const Eigen::VectorXd& u, double p,
                         ExecMode mode = exec::default_mode());

/// L2 distance between the discrete field and an analytic one.
double error_l2(const MixedSpace& s, const Eigen::VectorXd& u, const BoundaryFn& exact,
                ExecMode mode = exec::default_mode());

double integral_l2_sq(const MixedSpace& s, const Eigen::VectorXd& u,
                      ExecMode mode = exec::default_mode());

/// int psi_i dx for every pressure basis function (the zero-mean row).
Eigen::VectorXd pressure_integrals(const MixedSpace& s);

/// Values and gradients of a velocity coefficient field at the 7 quadrature
/// points of element t; physical points are in elems[t].xq.
struct ElemFieldEval {
    double vx[7], vy[7];
    double dxx[7], dxy[7];  // d(u_x)/dx, d(u_x)/dy
    double dyx[7], dyy[7];
};
ElemFieldEval eval_on_element(const MixedSpace& s, int t, const Eigen::VectorXd& u);

/// Quadrature weights of the 7-point rule (reference measure included).
const double* quad_weights();

}  // namespace leslab

#endif
