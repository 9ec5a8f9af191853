#include "leslab/fem.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "leslab/quadrature.hpp"

namespace leslab {

namespace {

// ---------------------------------------------------------------------------
// Reference-element tables at the quadrature points.
// Barycentrics: l0 = 1-xi-eta, l1 = xi, l2 = eta. P2 nodes: vertices 0..2,
// then midpoints of edges (0,1), (1,2), (2,0).
// ---------------------------------------------------------------------------

struct RefTables {
    double w[7];
    double val2[7][6];
    double g2r[7][6][2];   // reference gradients of the P2 basis
    double val1[7][3];
    double ref_mass[6][6]; // sum_q w val2 val2; exact P2 mass on the reference
    RefTables() {
        static const double gl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
        const auto& rule = QuadratureRule::instance();
        for (int q = 0; q < 7; ++q) {
            const double xi = rule.points[q].xi, eta = rule.points[q].eta;
            w[q] = rule.points[q].w;
            const double l[3] = {1.0 - xi - eta, xi, eta};
            for (int i = 0; i < 3; ++i) {
                val1[q][i] = l[i];
                val2[q][i] = l[i] * (2.0 * l[i] - 1.0);
                for (int d = 0; d < 2; ++d) g2r[q][i][d] = (4.0 * l[i] - 1.0) * gl[i][d];
            }
            static const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
            for (int k = 0; k < 3; ++k) {
                const int i = ea[k], j = eb[k];
                val2[q][3 + k] = 4.0 * l[i] * l[j];
                for (int d = 0; d < 2; ++d)
                    g2r[q][3 + k][d] = 4.0 * (l[i] * gl[j][d] + l[j] * gl[i][d]);
            }
        }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                double s = 0.0;
                for (int q = 0; q < 7; ++q) s += w[q] * val2[q][a] * val2[q][b];
                ref_mass[a][b] = s;
            }
    }
};

const RefTables& ref() {
    static const RefTables t;
    return t;
}

template <class F>
void elem_loop(int nt, ExecMode mode, const F& f) {
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t) f(t);
    } else {
        for (int t = 0; t < nt; ++t) f(t);
    }
}

inline long long edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
}

// Gathers the 12 velocity coefficients of one element.
inline void gather(const ElemData& e, const Eigen::VectorXd& u, double uc[6][2]) {
    for (int b = 0; b < 6; ++b) {
        uc[b][0] = u[2 * e.vnode[b]];
        uc[b][1] = u[2 * e.vnode[b] + 1];
    }
}

void check_vel_size(const MixedSpace& s, const Eigen::VectorXd& u, const char* what) {
    if (u.size() != s.n_vel)
        throw precondition_error(std::string(what) + ": velocity coefficient size mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// MixedSpace
// ---------------------------------------------------------------------------

MixedSpace MixedSpace::build(const Mesh& mesh, const DirichletSpec& dirichlet) {
    MixedSpace s;
    s.mesh = &mesh;
    const int nv = mesh.n_vertices();
    const int nt = mesh.n_triangles();

    std::unordered_map<long long, int> edge_id;
    edge_id.reserve(nt * 2);
    s.tri_edges.resize(nt);
    static const int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[ea[k]], b = tri[eb[k]];
            const long long key = edge_key(a, b);
            auto it = edge_id.find(key);
            int id;
            if (it == edge_id.end()) {
                id = static_cast<int>(s.edges.size());
                edge_id.emplace(key, id);
                s.edges.push_back({std::min(a, b), std::max(a, b)});
            } else {
                id = it->second;
            }
            s.tri_edges[t][k] = id;
        }
    }
    const int ne = static_cast<int>(s.edges.size());

    s.vel_nodes = mesh.vertices;
    s.vel_nodes.reserve(nv + ne);
    for (const auto& e : s.edges)
        s.vel_nodes.push_back((mesh.vertices[e[0]] + mesh.vertices[e[1]]) * 0.5);
    s.n_vel = 2 * (nv + ne);
    s.n_pres = nv;

    // Element geometry cache.
    const auto& rt = ref();
    s.elems.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        ElemData& e = s.elems[t];
        for (int k = 0; k < 3; ++k) {
            e.vnode[k] = tri[k];
            e.vnode[3 + k] = nv + s.tri_edges[t][k];
            e.pnode[k] = tri[k];
        }
        const Vec2 A = mesh.vertices[tri[0]];
        const Vec2 B = mesh.vertices[tri[1]];
        const Vec2 C = mesh.vertices[tri[2]];
        const double ja = B.x - A.x, jb = C.x - A.x;
        const double jc = B.y - A.y, jd = C.y - A.y;
        e.detJ = ja * jd - jb * jc;  // positive: finalize() oriented the mesh
        const double inv = 1.0 / e.detJ;
        for (int q = 0; q < 7; ++q) {
            const auto& qp = QuadratureRule::instance().points[q];
            e.xq[q] = {A.x + ja * qp.xi + jb * qp.eta, A.y + jc * qp.xi + jd * qp.eta};
            for (int b = 0; b < 6; ++b) {
                const double rx = rt.g2r[q][b][0], ry = rt.g2r[q][b][1];
                e.g2x[q][b] = (jd * rx - jc * ry) * inv;
                e.g2y[q][b] = (-jb * rx + ja * ry) * inv;
            }
        }
        static const double gl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
        for (int i = 0; i < 3; ++i) {
            e.p1gx[i] = (jd * gl[i][0] - jc * gl[i][1]) * inv;
            e.p1gy[i] = (-jb * gl[i][0] + ja * gl[i][1]) * inv;
        }
    }

    // Dirichlet table.
    std::vector<char> vdir(s.n_vel, 0);
    s.vval.assign(s.n_vel, 0.0);
    auto set_dirichlet = [&](int node, const Vec2& g) {
        vdir[2 * node] = 1;
        vdir[2 * node + 1] = 1;
        s.vval[2 * node] = g.x;
        s.vval[2 * node + 1] = g.y;
    };
    for (const auto& be : mesh.boundary_edges) {
        auto it = dirichlet.find(be.marker);
        if (it == dirichlet.end()) continue;
        const auto& g = it->second;
        const int mid = nv + edge_id.at(edge_key(be.v0, be.v1));
        set_dirichlet(be.v0, g(s.vel_nodes[be.v0]));
        set_dirichlet(be.v1, g(s.vel_nodes[be.v1]));
        set_dirichlet(mid, g(s.vel_nodes[mid]));
    }

    // Periodic identification, unless the markers were claimed by Dirichlet
    // data. Left nodes are masters; pairing is by the non-periodic coordinate.
    std::vector<int> vslave(s.n_vel, -1);
    std::vector<int> pslave(s.n_pres, -1);
    const bool left_dir = dirichlet.count(BoundaryMarker::PeriodicLeft) > 0;
    const bool right_dir = dirichlet.count(BoundaryMarker::PeriodicRight) > 0;
    if (!left_dir || !right_dir) {
        std::vector<std::pair<double, int>> lv, rv, lm, rm;  // (y, node)
        double yscale = 1.0;
        for (const auto& be : mesh.boundary_edges) {
            if (be.marker != BoundaryMarker::PeriodicLeft &&
                be.marker != BoundaryMarker::PeriodicRight)
                continue;
            const int mid = nv + edge_id.at(edge_key(be.v0, be.v1));
            auto& vs = (be.marker == BoundaryMarker::PeriodicLeft) ? lv : rv;
            auto& ms = (be.marker == BoundaryMarker::PeriodicLeft) ? lm : rm;
            vs.push_back({s.vel_nodes[be.v0].y, be.v0});
            vs.push_back({s.vel_nodes[be.v1].y, be.v1});
            ms.push_back({s.vel_nodes[mid].y, mid});
            yscale = std::max({yscale, std::abs(s.vel_nodes[be.v0].y),
                               std::abs(s.vel_nodes[be.v1].y)});
        }
        if (!lv.empty() || !rv.empty()) {
            if (left_dir != right_dir)
                throw precondition_error(
                    "periodic markers must both be Dirichlet or both periodic");
            auto dedup_sort = [](std::vector<std::pair<double, int>>& a) {
                std::sort(a.begin(), a.end());
                a.erase(std::unique(a.begin(), a.end()), a.end());
            };
            dedup_sort(lv);
            dedup_sort(rv);
            dedup_sort(lm);
            dedup_sort(rm);
            if (lv.size() != rv.size() || lm.size() != rm.size())
                throw numerical_error("periodic boundaries have mismatched node counts");
            const double tol = 1e-12 * yscale;
            auto pair_nodes = [&](const std::vector<std::pair<double, int>>& l,
                                  const std::vector<std::pair<double, int>>& r,
                                  bool vertex_nodes) {
                for (size_t k = 0; k < l.size(); ++k) {
                    if (std::abs(l[k].first - r[k].first) > tol)
                        throw numerical_error(
                            "periodic boundary nodes do not match across the period");
                    const int master = l[k].second, slave = r[k].second;
                    for (int c = 0; c < 2; ++c) {
                        const int dm = 2 * master + c, ds = 2 * slave + c;
                        if (vdir[dm] && vdir[ds]) continue;  // corner: Dirichlet wins
                        if (vdir[dm] != vdir[ds])
                            throw numerical_error(
                                "inconsistent Dirichlet data across a periodic pair");
                        vslave[ds] = dm;
                    }
                    // pressure lives on vertices only
                    if (vertex_nodes && master < nv && slave < nv) pslave[slave] = master;
                }
            };
            pair_nodes(lv, rv, true);
            pair_nodes(lm, rm, false);
        }
    }

    s.vmap.assign(s.n_vel, -1);
    int idx = 0;
    for (int i = 0; i < s.n_vel; ++i)
        if (!vdir[i] && vslave[i] < 0) s.vmap[i] = idx++;
    s.n_vel_reduced = idx;
    for (int i = 0; i < s.n_vel; ++i)
        if (vslave[i] >= 0) s.vmap[i] = s.vmap[vslave[i]];

    s.pmap.assign(s.n_pres, -1);
    idx = 0;
    for (int i = 0; i < s.n_pres; ++i)
        if (pslave[i] < 0) s.pmap[i] = idx++;
    s.n_pres_reduced = idx;
    for (int i = 0; i < s.n_pres; ++i)
        if (pslave[i] >= 0) s.pmap[i] = s.pmap[pslave[i]];

    return s;
}

Eigen::VectorXd MixedSpace::reduce_velocity(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_vel_reduced);
    for (int i = 0; i < n_vel; ++i)
        if (vmap[i] >= 0) out[vmap[i]] = raw[i];
    return out;
}

Eigen::VectorXd MixedSpace::expand_velocity(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd out(n_vel);
    for (int i = 0; i < n_vel; ++i) out[i] = (vmap[i] >= 0) ? reduced[vmap[i]] : vval[i];
    return out;
}

Eigen::VectorXd MixedSpace::expand_velocity_homogeneous(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd out(n_vel);
    for (int i = 0; i < n_vel; ++i) out[i] = (vmap[i] >= 0) ? reduced[vmap[i]] : 0.0;
    return out;
}

Eigen::VectorXd MixedSpace::reduce_load(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_vel_reduced);
    for (int i = 0; i < n_vel; ++i)
        if (vmap[i] >= 0) out[vmap[i]] += raw[i];
    return out;
}

Eigen::VectorXd MixedSpace::reduce_pressure(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_pres_reduced);
    for (int i = 0; i < n_pres; ++i) out[pmap[i]] = raw[i];
    return out;
}

Eigen::VectorXd MixedSpace::expand_pressure(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd out(n_pres);
    for (int i = 0; i < n_pres; ++i) out[i] = reduced[pmap[i]];
    return out;
}

Eigen::VectorXd MixedSpace::reduce_pressure_load(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_pres_reduced);
    for (int i = 0; i < n_pres; ++i) out[pmap[i]] += raw[i];
    return out;
}

Eigen::VectorXd MixedSpace::dirichlet_extension() const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_vel);
    for (int i = 0; i < n_vel; ++i)
        if (vmap[i] < 0) out[i] = vval[i];
    return out;
}

// ---------------------------------------------------------------------------
// Assembly kernels. Every kernel computes per-element blocks into a
// preassigned slab of the output, so the parallel and serial modes produce
// bitwise-identical triplet lists.
// ---------------------------------------------------------------------------

void mass_triplets(const MixedSpace& s, double scale, Triplets& out, ExecMode mode) {
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    const size_t base = out.size();
    out.resize(base + static_cast<size_t>(nt) * 72);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        size_t k = base + static_cast<size_t>(t) * 72;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                const double v = scale * e.detJ * rt.ref_mass[a][b];
                for (int c = 0; c < 2; ++c)
                    out[k++] = {2 * e.vnode[a] + c, 2 * e.vnode[b] + c, v};
            }
    });
}

void stiffness_triplets(const MixedSpace& s, double scale, Triplets& out, ExecMode mode) {
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    const size_t base = out.size();
    out.resize(base + static_cast<size_t>(nt) * 72);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double loc[6][6] = {};
        for (int q = 0; q < 7; ++q) {
            const double wq = rt.w[q] * e.detJ;
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    loc[a][b] += wq * (e.g2x[q][a] * e.g2x[q][b] + e.g2y[q][a] * e.g2y[q][b]);
        }
        size_t k = base + static_cast<size_t>(t) * 72;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int c = 0; c < 2; ++c)
                    out[k++] = {2 * e.vnode[a] + c, 2 * e.vnode[b] + c, scale * loc[a][b]};
    });
}

void divergence_triplets(const MixedSpace& s, Triplets& out, ExecMode mode) {
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    const size_t base = out.size();
    out.resize(base + static_cast<size_t>(nt) * 36);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        size_t k = base + static_cast<size_t>(t) * 36;
        for (int i = 0; i < 3; ++i)
            for (int b = 0; b < 6; ++b) {
                double vx = 0.0, vy = 0.0;
                for (int q = 0; q < 7; ++q) {
                    const double wq = rt.w[q] * e.detJ * rt.val1[q][i];
                    vx += wq * e.g2x[q][b];
                    vy += wq * e.g2y[q][b];
                }
                out[k++] = {e.pnode[i], 2 * e.vnode[b], vx};
                out[k++] = {e.pnode[i], 2 * e.vnode[b] + 1, vy};
            }
    });
}

void advection_triplets(const MixedSpace& s, const Eigen::VectorXd& u_adv, Triplets& out,
                        ExecMode mode) {
    check_vel_size(s, u_adv, "advection");
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    const size_t base = out.size();
    out.resize(base + static_cast<size_t>(nt) * 72);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double uc[6][2];
        gather(e, u_adv, uc);
        // cab[a][b] = int (u . grad phi_b) phi_a
        double cab[6][6] = {};
        for (int q = 0; q < 7; ++q) {
            double ux = 0.0, uy = 0.0;
            for (int b = 0; b < 6; ++b) {
                ux += uc[b][0] * rt.val2[q][b];
                uy += uc[b][1] * rt.val2[q][b];
            }
            const double wq = rt.w[q] * e.detJ;
            double conv[6];
            for (int b = 0; b < 6; ++b) conv[b] = ux * e.g2x[q][b] + uy * e.g2y[q][b];
            for (int a = 0; a < 6; ++a) {
                const double va = wq * rt.val2[q][a];
                for (int b = 0; b < 6; ++b) cab[a][b] += va * conv[b];
            }
        }
        size_t k = base + static_cast<size_t>(t) * 72;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                const double v = 0.5 * (cab[a][b] - cab[b][a]);  // skew at block level
                for (int c = 0; c < 2; ++c)
                    out[k++] = {2 * e.vnode[a] + c, 2 * e.vnode[b] + c, v};
            }
    });
}

void eddy_viscosity_triplets(const MixedSpace& s, const Eigen::VectorXd& u_lin,
                             double cs_delta_sq, Triplets& out, ExecMode mode) {
    check_vel_size(s, u_lin, "eddy viscosity");
    if (cs_delta_sq < 0.0) throw precondition_error("(C_s delta)^2 must be nonnegative");
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    const size_t base = out.size();
    out.resize(base + static_cast<size_t>(nt) * 72);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double uc[6][2];
        gather(e, u_lin, uc);
        double loc[6][6] = {};
        for (int q = 0; q < 7; ++q) {
            double d00 = 0.0, d01 = 0.0, d10 = 0.0, d11 = 0.0;  // d(u_c)/d(x_d)
            for (int b = 0; b < 6; ++b) {
                d00 += uc[b][0] * e.g2x[q][b];
                d01 += uc[b][0] * e.g2y[q][b];
                d10 += uc[b][1] * e.g2x[q][b];
                d11 += uc[b][1] * e.g2y[q][b];
            }
            const double fro = std::sqrt(d00 * d00 + d01 * d01 + d10 * d10 + d11 * d11);
            const double wq = rt.w[q] * e.detJ * cs_delta_sq * fro;
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    loc[a][b] += wq * (e.g2x[q][a] * e.g2x[q][b] + e.g2y[q][a] * e.g2y[q][b]);
        }
        size_t k = base + static_cast<size_t>(t) * 72;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int c = 0; c < 2; ++c)
                    out[k++] = {2 * e.vnode[a] + c, 2 * e.vnode[b] + c, loc[a][b]};
    });
}

AssembledForms assemble_constant_forms(const MixedSpace& s, ExecMode mode) {
    AssembledForms f;
    f.quadrature = QuadratureRule::name;
    Triplets tm, ta, tb;
    mass_triplets(s, 1.0, tm, mode);
    stiffness_triplets(s, 1.0, ta, mode);
    divergence_triplets(s, tb, mode);
    f.M.resize(s.n_vel, s.n_vel);
    f.M.setFromTriplets(tm.begin(), tm.end());
    f.A.resize(s.n_vel, s.n_vel);
    f.A.setFromTriplets(ta.begin(), ta.end());
    f.B.resize(s.n_pres, s.n_vel);
    f.B.setFromTriplets(tb.begin(), tb.end());
    return f;
}

SpMat assemble_advection(const MixedSpace& s, const Eigen::VectorXd& u_adv, ExecMode mode) {
    Triplets t;
    advection_triplets(s, u_adv, t, mode);
    SpMat N(s.n_vel, s.n_vel);
    N.setFromTriplets(t.begin(), t.end());
    return N;
}

SpMat assemble_eddy_viscosity(const MixedSpace& s, const Eigen::VectorXd& u_lin,
                              double cs_delta_sq, ExecMode mode) {
    Triplets t;
    eddy_viscosity_triplets(s, u_lin, cs_delta_sq, t, mode);
    SpMat S(s.n_vel, s.n_vel);
    S.setFromTriplets(t.begin(), t.end());
    return S;
}

double apply_trilinear(const MixedSpace& s, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w, ExecMode mode) {
    check_vel_size(s, u, "trilinear");
    check_vel_size(s, v, "trilinear");
    check_vel_size(s, w, "trilinear");
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    std::vector<double> part(nt);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double ucu[6][2], ucv[6][2], ucw[6][2];
        gather(e, u, ucu);
        gather(e, v, ucv);
        gather(e, w, ucw);
        double acc = 0.0;
        for (int q = 0; q < 7; ++q) {
            double ux = 0.0, uy = 0.0;
            double vv[2] = {0.0, 0.0}, wv[2] = {0.0, 0.0};
            double vgx[2] = {0.0, 0.0}, vgy[2] = {0.0, 0.0};
            double wgx[2] = {0.0, 0.0}, wgy[2] = {0.0, 0.0};
            for (int b = 0; b < 6; ++b) {
                const double val = rt.val2[q][b], gx = e.g2x[q][b], gy = e.g2y[q][b];
                ux += ucu[b][0] * val;
                uy += ucu[b][1] * val;
                for (int c = 0; c < 2; ++c) {
                    vv[c] += ucv[b][c] * val;
                    wv[c] += ucw[b][c] * val;
                    vgx[c] += ucv[b][c] * gx;
                    vgy[c] += ucv[b][c] * gy;
                    wgx[c] += ucw[b][c] * gx;
                    wgy[c] += ucw[b][c] * gy;
                }
            }
            double sum = 0.0;
            for (int c = 0; c < 2; ++c)
                sum += (ux * vgx[c] + uy * vgy[c]) * wv[c] - (ux * wgx[c] + uy * wgy[c]) * vv[c];
            acc += 0.5 * rt.w[q] * e.detJ * sum;
        }
        part[t] = acc;
    });
    double total = 0.0;
    for (int t = 0; t < nt; ++t) total += part[t];  // fixed order: deterministic
    return total;
}

Eigen::VectorXd assemble_body_force(const MixedSpace& s, const BoundaryFn& f, ExecMode mode) {
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    std::vector<std::array<double, 12>> slab(nt);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        auto& loc = slab[t];
        loc.fill(0.0);
        for (int q = 0; q < 7; ++q) {
            const Vec2 fv = f(e.xq[q]);
            const double wq = rt.w[q] * e.detJ;
            for (int a = 0; a < 6; ++a) {
                loc[2 * a] += wq * rt.val2[q][a] * fv.x;
                loc[2 * a + 1] += wq * rt.val2[q][a] * fv.y;
            }
        }
    });
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n_vel);
    for (int t = 0; t < nt; ++t) {
        const ElemData& e = s.elems[t];
        for (int a = 0; a < 6; ++a)
            for (int c = 0; c < 2; ++c) out[2 * e.vnode[a] + c] += slab[t][2 * a + c];
    }
    return out;
}

Eigen::VectorXd interpolate(const MixedSpace& s, const BoundaryFn& g) {
    Eigen::VectorXd out(s.n_vel);
    for (int n = 0; n < s.n_vel_nodes(); ++n) {
        const Vec2 v = g(s.vel_nodes[n]);
        out[2 * n] = v.x;
        out[2 * n + 1] = v.y;
    }
    return out;
}

double integral_grad_pow(const MixedSpace& s, const Eigen::VectorXd& u, double p, ExecMode mode) {
    check_vel_size(s, u, "integral_grad_pow");
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    std::vector<double> part(nt);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double uc[6][2];
        gather(e, u, uc);
        double acc = 0.0;
        for (int q = 0; q < 7; ++q) {
            double d00 = 0.0, d01 = 0.0, d10 = 0.0, d11 = 0.0;
            for (int b = 0; b < 6; ++b) {
                d00 += uc[b][0] * e.g2x[q][b];
                d01 += uc[b][0] * e.g2y[q][b];
                d10 += uc[b][1] * e.g2x[q][b];
                d11 += uc[b][1] * e.g2y[q][b];
            }
            const double fro2 = d00 * d00 + d01 * d01 + d10 * d10 + d11 * d11;
            double val;
            if (p == 2.0)
                val = fro2;
            else if (p == 3.0)
                val = fro2 * std::sqrt(fro2);
            else
                val = std::pow(fro2, 0.5 * p);
            acc += rt.w[q] * e.detJ * val;
        }
        part[t] = acc;
    });
    double total = 0.0;
    for (int t = 0; t < nt; ++t) total += part[t];
    return total;
}

double integral_l2_sq(const MixedSpace& s, const Eigen::VectorXd& u, ExecMode mode) {
    check_vel_size(s, u, "integral_l2_sq");
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    std::vector<double> part(nt);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double uc[6][2];
        gather(e, u, uc);
        double acc = 0.0;
        for (int q = 0; q < 7; ++q) {
            double vx = 0.0, vy = 0.0;
            for (int b = 0; b < 6; ++b) {
                vx += uc[b][0] * rt.val2[q][b];
                vy += uc[b][1] * rt.val2[q][b];
            }
            acc += rt.w[q] * e.detJ * (vx * vx + vy * vy);
        }
        part[t] = acc;
    });
    double total = 0.0;
    for (int t = 0; t < nt; ++t) total += part[t];
    return total;
}

Eigen::VectorXd pressure_integrals(const MixedSpace& s) {
    const auto& rt = ref();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n_pres);
    for (const ElemData& e : s.elems) {
        for (int i = 0; i < 3; ++i) {
            double v = 0.0;
            for (int q = 0; q < 7; ++q) v += rt.w[q] * rt.val1[q][i];
            out[e.pnode[i]] += v * e.detJ;
        }
    }
    return out;
}

ElemFieldEval eval_on_element(const MixedSpace& s, int t, const Eigen::VectorXd& u) {
    check_vel_size(s, u, "eval_on_element");
    const auto& rt = ref();
    const ElemData& e = s.elems[t];
    double uc[6][2];
    gather(e, u, uc);
    ElemFieldEval out{};
    for (int q = 0; q < 7; ++q) {
        for (int b = 0; b < 6; ++b) {
            out.vx[q] += uc[b][0] * rt.val2[q][b];
            out.vy[q] += uc[b][1] * rt.val2[q][b];
            out.dxx[q] += uc[b][0] * e.g2x[q][b];
            out.dxy[q] += uc[b][0] * e.g2y[q][b];
            out.dyx[q] += uc[b][1] * e.g2x[q][b];
            out.dyy[q] += uc[b][1] * e.g2y[q][b];
        }
    }
    return out;
}

const double* quad_weights() { return ref().w; }

double error_l2(const MixedSpace& s, const Eigen::VectorXd& u, const BoundaryFn& exact,
                ExecMode mode) {
    check_vel_size(s, u, "error_l2");
    const auto& rt = ref();
    const int nt = static_cast<int>(s.elems.size());
    std::vector<double> part(nt);
    elem_loop(nt, mode, [&](int t) {
        const ElemData& e = s.elems[t];
        double uc[6][2];
        gather(e, u, uc);
        double acc = 0.0;
        for (int q = 0; q < 7; ++q) {
            double vx = 0.0, vy = 0.0;
            for (int b = 0; b < 6; ++b) {
                vx += uc[b][0] * rt.val2[q][b];
                vy += uc[b][1] * rt.val2[q][b];
            }
            const Vec2 g = exact(e.xq[q]);
            acc += rt.w[q] * e.detJ * ((vx - g.x) * (vx - g.x) + (vy - g.y) * (vy - g.y));
        }
        part[t] = acc;
    });
    double total = 0.0;
    for (int t = 0; t < nt; ++t) total += part[t];
    return std::sqrt(total);
}

}  // namespace leslab
