#include "leslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace leslab {

double dissipation_rate(const MixedSpace& space, const FlowState& state,
                        const ModelParams& params, ExecMode mode) {
    const double grad2 = integral_grad_pow(space, state.u, 2.0, mode);
    const double csd2 = params.cs_delta_sq();
    double total = params.nu * grad2;
    if (csd2 > 0.0) total += csd2 * integral_grad_pow(space, state.u, 3.0, mode);
    return total / space.mesh->area;
}

double kinetic_energy(const MixedSpace& space, const FlowState& state, ExecMode mode) {
    return 0.5 * integral_l2_sq(space, state.u, mode) / space.mesh->area;
}

std::pair<double, double> time_average(const DissipationSeries& series, double burn_in) {
    const auto& t = series.times;
    const auto& e = series.eps;
    if (t.size() != e.size()) throw precondition_error("series arrays disagree in length");
    if (t.size() < 2) throw precondition_error("time average needs at least two samples");
    const double t0 = std::max(burn_in, t.front());
    const double t1 = t.back();
    if (!(t0 < t1)) throw precondition_error("averaging window is empty");

    // first sample at or after t0, with the value at t0 linearly interpolated
    std::size_t i = 0;
    while (i + 1 < t.size() && t[i + 1] <= t0) ++i;
    double acc = 0.0;
    double tprev = t0;
    double eprev;
    if (t[i] == t0) {
        eprev = e[i];
    } else {
        const double w = (t0 - t[i]) / (t[i + 1] - t[i]);
        eprev = (1.0 - w) * e[i] + w * e[i + 1];
    }
    for (std::size_t k = i + 1; k < t.size(); ++k) {
        acc += 0.5 * (eprev + e[k]) * (t[k] - tprev);
        tprev = t[k];
        eprev = e[k];
    }
    const double avg = acc / (t1 - t0);
    const double U = series.U;
    const double ceps = U > 0.0 ? avg * series.L / (U * U * U)
                                : std::numeric_limits<double>::quiet_NaN();
    return {avg, ceps};
}

namespace {

// True when no element straddles the line y = yline; the shear-layer field
// is then elementwise polynomial and the degree-5 rule integrates it exactly.
bool mesh_resolves_line(const Mesh& mesh, double yline, double tol) {
    for (const auto& tri : mesh.triangles) {
        bool below = false, above = false;
        for (int v : tri) {
            const double y = mesh.vertices[v].y;
            if (y < yline - tol) below = true;
            if (y > yline + tol) above = true;
        }
        if (below && above) return false;
    }
    return true;
}

}  // namespace

Lemma1Report lemma1_quadrature_check(const MixedSpace& space, double h_strip, double U, double L,
                                     ExecMode mode) {
    if (!(h_strip > 0.0) || !(h_strip < L))
        throw precondition_error("strip depth must lie in (0, L)");
    const double yline = L - h_strip;
    const double tol = 1e-12 * std::max(1.0, L);
    if (!mesh_resolves_line(*space.mesh, yline, tol))
        throw precondition_error("mesh has no element line at y = L - h; quadrature would not be exact");

    const Eigen::VectorXd phi = interpolate(space, [&](const Vec2& x) {
        const double s = std::clamp((x.y - yline) / h_strip, 0.0, 1.0);
        return Vec2{U * s, 0.0};
    });

    Lemma1Report rep;
    rep.quad[0] = integral_l2_sq(space, phi, mode);
    rep.quad[1] = integral_grad_pow(space, phi, 2.0, mode);
    rep.quad[2] = integral_grad_pow(space, phi, 3.0, mode);
    const double half = integral_grad_pow(space, phi, 1.5, mode);
    rep.quad[3] = half * half;

    rep.closed[0] = U * U * L * h_strip / 3.0;
    rep.closed[1] = U * U * L / h_strip;
    rep.closed[2] = U * U * U * L / (h_strip * h_strip);
    rep.closed[3] = U * U * U * L * L / h_strip;

    rep.max_rel_err = 0.0;
    for (int k = 0; k < 4; ++k)
        rep.max_rel_err = std::max(rep.max_rel_err,
                                   std::abs(rep.quad[k] - rep.closed[k]) / std::abs(rep.closed[k]));
    return rep;
}

PoincareReport poincare_strip_check(const MixedSpace& space, double h_strip, int n_fields,
                                    std::uint64_t seed, ExecMode mode) {
    (void)mode;  // integration below is a fixed-order serial reduction
    if (n_fields < 1) throw precondition_error("need at least one sample field");
    const Mesh& mesh = *space.mesh;
    double top = mesh.vertices.empty() ? 0.0 : mesh.vertices[0].y;
    for (const auto& v : mesh.vertices) top = std::max(top, v.y);
    const double tol = 1e-9 * std::max(1.0, top);
    if (!(h_strip > 0.0) || h_strip > top + tol)
        throw precondition_error("strip depth must lie in (0, height]");

    // elements fully inside [top - h, top]
    std::vector<int> strip_elems;
    for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
        bool inside = true;
        for (int v : mesh.triangles[t])
            if (mesh.vertices[v].y < top - h_strip - tol) inside = false;
        if (inside) strip_elems.push_back(t);
    }
    if (strip_elems.empty()) throw precondition_error("no elements inside the strip");

    // strip velocity nodes, flagged when they sit on the top line
    std::vector<int> nodes;
    std::vector<char> is_top(space.n_vel_nodes(), 0);
    {
        std::vector<char> in_strip(space.n_vel_nodes(), 0);
        for (int t : strip_elems)
            for (int n : space.elems[t].vnode) in_strip[n] = 1;
        for (int n = 0; n < space.n_vel_nodes(); ++n) {
            if (!in_strip[n]) continue;
            nodes.push_back(n);
            if (space.vel_nodes[n].y >= top - tol) is_top[n] = 1;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double* w = quad_weights();

    PoincareReport rep;
    rep.samples = n_fields;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(space.n_vel);
    for (int f = 0; f < n_fields; ++f) {
        for (int n : nodes) {
            const double ax = dist(rng);
            const double ay = dist(rng);
            if (is_top[n]) continue;  // field vanishes on y = top
            u[space.vel_dof(n, 0)] = ax;
            u[space.vel_dof(n, 1)] = ay;
        }
        double num = 0.0, den = 0.0;
        for (int t : strip_elems) {
            const ElemFieldEval ev = eval_on_element(space, t, u);
            const double detJ = space.elems[t].detJ;
            for (int q = 0; q < 7; ++q) {
                num += w[q] * detJ * (ev.vx[q] * ev.vx[q] + ev.vy[q] * ev.vy[q]);
                den += w[q] * detJ *
                       (ev.dxx[q] * ev.dxx[q] + ev.dxy[q] * ev.dxy[q] + ev.dyx[q] * ev.dyx[q] +
                        ev.dyy[q] * ev.dyy[q]);
            }
        }
        if (den > 0.0)
            rep.max_ratio = std::max(rep.max_ratio, std::sqrt(num) / (h_strip * std::sqrt(den)));
        for (int n : nodes) {
            u[space.vel_dof(n, 0)] = 0.0;
            u[space.vel_dof(n, 1)] = 0.0;
        }
    }
    return rep;
}

}  // namespace leslab
