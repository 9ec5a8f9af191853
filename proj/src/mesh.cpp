#include "leslab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace leslab {

const char* marker_name(BoundaryMarker m) {
    switch (m) {
        case BoundaryMarker::OuterCircle: return "OuterCircle";
        case BoundaryMarker::InnerCircle: return "InnerCircle";
        case BoundaryMarker::BottomWall: return "BottomWall";
        case BoundaryMarker::TopWall: return "TopWall";
        case BoundaryMarker::PeriodicLeft: return "PeriodicLeft";
        case BoundaryMarker::PeriodicRight: return "PeriodicRight";
    }
    return "Unknown";
}

double Mesh::signed_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2& a = vertices[tri[0]];
    const Vec2& b = vertices[tri[1]];
    const Vec2& c = vertices[tri[2]];
    return 0.5 * (b - a).cross(c - a);
}

double Mesh::diameter(int t) const {
    const auto& tri = triangles[t];
    const Vec2& a = vertices[tri[0]];
    const Vec2& b = vertices[tri[1]];
    const Vec2& c = vertices[tri[2]];
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

namespace {

// Key for an undirected edge.
inline long long edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
}

}  // namespace

void Mesh::finalize() {
    if (triangles.empty()) throw precondition_error("mesh has no triangles");
    const int nv = n_vertices();

    area = 0.0;
    h_max = 0.0;
    h_min = std::numeric_limits<double>::max();
    for (int t = 0; t < n_triangles(); ++t) {
        auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= nv)
                throw numerical_error("triangle vertex index out of range");
        }
        double sa = signed_area(t);
        if (sa < 0.0) {
            std::swap(tri[1], tri[2]);
            sa = -sa;
        }
        if (sa == 0.0) throw numerical_error("degenerate (zero-area) triangle");
        area += sa;
        const double d = diameter(t);
        h_max = std::max(h_max, d);
        h_min = std::min(h_min, d);
    }

    // Edge incidence counts; interior*2 + boundary must equal 3*nt.
    std::unordered_map<long long, int> count;
    count.reserve(triangles.size() * 2);
    for (const auto& tri : triangles)
        for (int k = 0; k < 3; ++k) count[edge_key(tri[k], tri[(k + 1) % 3])]++;

    int n_single = 0;
    for (const auto& [key, c] : count) {
        (void)key;
        if (c > 2) throw numerical_error("non-manifold edge (more than two incident triangles)");
        if (c == 1) ++n_single;
    }
    if (static_cast<int>(boundary_edges.size()) != n_single)
        throw numerical_error("boundary edge list does not match edges with one incident triangle");
    for (const auto& be : boundary_edges) {
        auto it = count.find(edge_key(be.v0, be.v1));
        if (it == count.end() || it->second != 1)
            throw numerical_error("marked boundary edge not a single-incidence mesh edge");
    }
}

Mesh build_channel_mesh(const ChannelSpec& spec) {
    if (spec.ny < 2 || spec.nx < 2) throw precondition_error("channel needs ny >= 2 and nx >= 2");
    if (spec.L <= 0.0) throw precondition_error("channel period L must be positive");
    if (spec.align_strip != 0.0 && (spec.align_strip <= 0.0 || spec.align_strip >= spec.L))
        throw precondition_error("align_strip must lie in (0, L)");

    const int nx = spec.nx, ny = spec.ny;
    const double L = spec.L;

    std::vector<double> yline(ny + 1);
    for (int j = 0; j <= ny; ++j) yline[j] = L * j / ny;
    if (spec.align_strip > 0.0) {
        // Snap the nearest interior grid line to y = L - h so the strip
        // boundary is a mesh line exactly.
        const double target = L - spec.align_strip;
        int jbest = 1;
        for (int j = 2; j < ny; ++j)
            if (std::abs(yline[j] - target) < std::abs(yline[jbest] - target)) jbest = j;
        yline[jbest] = target;
    }

    Mesh mesh;
    mesh.vertices.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.push_back({L * i / nx, yline[j]});

    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    mesh.triangles.reserve(2 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    }

    for (int i = 0; i < nx; ++i) {
        mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), BoundaryMarker::BottomWall});
        mesh.boundary_edges.push_back({vid(i, ny), vid(i + 1, ny), BoundaryMarker::TopWall});
    }
    for (int j = 0; j < ny; ++j) {
        mesh.boundary_edges.push_back({vid(0, j), vid(0, j + 1), BoundaryMarker::PeriodicLeft});
        mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), BoundaryMarker::PeriodicRight});
    }

    mesh.finalize();
    return mesh;
}

namespace {

// ---------------------------------------------------------------------------
// Bowyer-Watson incremental Delaunay triangulation.
// ---------------------------------------------------------------------------

struct DelTri {
    int v[3];    // vertex indices, counterclockwise
    int adj[3];  // neighbor across edge (v[k], v[k+1]); -1 if none
    bool alive = true;
};

class Delaunay {
public:
    explicit Delaunay(const std::vector<Vec2>& pts, double scale) : pts_(pts), scale_(scale) {}

    // pts_[0..2] must be the super-triangle vertices (counterclockwise).
    void triangulate() {
        DelTri t0;
        t0.v[0] = 0; t0.v[1] = 1; t0.v[2] = 2;
        t0.adj[0] = t0.adj[1] = t0.adj[2] = -1;
        tris_.push_back(t0);
        for (int p = 3; p < static_cast<int>(pts_.size()); ++p) insert(p);
    }

    const std::vector<DelTri>& triangles() const { return tris_; }

private:
    const std::vector<Vec2>& pts_;
    double scale_;
    std::vector<DelTri> tris_;
    int last_alive_ = 0;

    static double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
        return (b - a).cross(c - a);
    }

    // Positive when p lies strictly inside the circumcircle of (a,b,c)
    // (counterclockwise). Near-ties count as outside, keeping the cavity
    // conservative when many input points are cocircular.
    bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) const {
        const double ax = a.x - p.x, ay = a.y - p.y;
        const double bx = b.x - p.x, by = b.y - p.y;
        const double cx = c.x - p.x, cy = c.y - p.y;
        const double a2 = ax * ax + ay * ay;
        const double b2 = bx * bx + by * by;
        const double c2 = cx * cx + cy * cy;
        const double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
        const double tol = 1e-12 * scale_ * scale_ * scale_ * scale_;
        return det > tol;
    }

    bool contains(int t, const Vec2& p) const {
        const DelTri& tr = tris_[t];
        const double eps = -1e-12 * scale_ * scale_;
        for (int k = 0; k < 3; ++k)
            if (orient(pts_[tr.v[k]], pts_[tr.v[(k + 1) % 3]], p) < eps) return false;
        return true;
    }

    int locate(const Vec2& p) const {
        // Walk from the most recent triangle; fall back to a scan if the walk
        // cycles (possible with the tolerance near degenerate configurations).
        int t = last_alive_;
        if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = -1;
        if (t >= 0) {
            int steps = 0;
            const int max_steps = static_cast<int>(tris_.size()) + 8;
            while (steps++ < max_steps) {
                const DelTri& tr = tris_[t];
                int worst = -1;
                double worst_val = -1e-12 * scale_ * scale_;
                for (int k = 0; k < 3; ++k) {
                    const double o = orient(pts_[tr.v[k]], pts_[tr.v[(k + 1) % 3]], p);
                    if (o < worst_val) {
                        worst_val = o;
                        worst = k;
                    }
                }
                if (worst < 0) return t;
                const int next = tr.adj[worst];
                if (next < 0 || !tris_[next].alive) break;
                t = next;
            }
        }
        for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive && contains(i, p)) return i;
        throw numerical_error("Delaunay point location failed");
    }

    void insert(int p) {
        const Vec2& pt = pts_[p];
        const int seed = locate(pt);

        // Grow the cavity: all alive triangles whose circumcircle contains p,
        // connected to the seed through in-cavity neighbors.
        std::vector<int> cavity;
        std::vector<int> stack{seed};
        std::vector<char> in_cavity(tris_.size(), 0);
        in_cavity[seed] = 1;
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            cavity.push_back(t);
            for (int k = 0; k < 3; ++k) {
                const int nb = tris_[t].adj[k];
                if (nb < 0 || in_cavity[nb] || !tris_[nb].alive) continue;
                const DelTri& tr = tris_[nb];
                if (in_circle(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]], pt)) {
                    in_cavity[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }

        // Cavity boundary: directed edges of cavity triangles whose neighbor
        // is outside the cavity.
        struct Rim {
            int a, b, outside;
        };
        std::vector<Rim> rim;
        for (const int t : cavity) {
            for (int k = 0; k < 3; ++k) {
                const int nb = tris_[t].adj[k];
                if (nb < 0 || !in_cavity[nb])
                    rim.push_back({tris_[t].v[k], tris_[t].v[(k + 1) % 3], nb});
            }
        }
        for (const int t : cavity) tris_[t].alive = false;

        // One new triangle per rim edge, fanned to p.
        std::unordered_map<long long, std::pair<int, int>> open;  // directed edge -> (tri, slot)
        open.reserve(rim.size() * 2);
        auto dkey = [](int a, int b) {
            return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
        };
        for (const Rim& r : rim) {
            DelTri nt;
            nt.v[0] = r.a; nt.v[1] = r.b; nt.v[2] = p;
            nt.adj[0] = r.outside;
            nt.adj[1] = nt.adj[2] = -1;
            const int id = static_cast<int>(tris_.size());
            tris_.push_back(nt);
            if (r.outside >= 0) {
                DelTri& out = tris_[r.outside];
                for (int k = 0; k < 3; ++k)
                    if (out.v[k] == r.b && out.v[(k + 1) % 3] == r.a) out.adj[k] = id;
            }
            // Stitch fan sides: edge (b, p) of this triangle pairs with edge
            // (p, b) of the rim neighbor sharing vertex b.
            if (auto it = open.find(dkey(p, r.a)); it != open.end()) {
                tris_[id].adj[2] = it->second.first;
                tris_[it->second.first].adj[it->second.second] = id;
                open.erase(it);
            } else {
                open[dkey(r.a, p)] = {id, 2};
            }
            if (auto it = open.find(dkey(r.b, p)); it != open.end()) {
                tris_[id].adj[1] = it->second.first;
                tris_[it->second.first].adj[it->second.second] = id;
                open.erase(it);
            } else {
                open[dkey(p, r.b)] = {id, 1};
            }
            last_alive_ = id;
        }
        if (!open.empty()) throw numerical_error("Delaunay cavity boundary failed to close");
    }
};

bool inside_convex_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if ((b - a).cross(p - a) <= 0.0) return false;
    }
    return true;
}

}  // namespace

Mesh build_annulus_mesh(const AnnulusSpec& spec, int refinement) {
    const double R = spec.outer_radius, r = spec.inner_radius;
    const Vec2 c = spec.inner_center;
    if (R <= 0.0 || r <= 0.0) throw precondition_error("annulus radii must be positive");
    if (c.norm() + r >= R) throw precondition_error("inner disk must lie strictly inside the outer disk");
    if (spec.m < 8 || spec.n < 8) throw precondition_error("annulus needs m >= 8 and n >= 8");
    if (refinement < 1) throw precondition_error("refinement must be a positive integer");

    const double two_pi = 2.0 * std::acos(-1.0);

    // Point set: super-triangle first, then boundaries, then interior layers.
    std::vector<Vec2> pts;
    pts.push_back({-8.0 * R, -8.0 * R});
    pts.push_back({8.0 * R, -8.0 * R});
    pts.push_back({0.0, 8.0 * R});

    const int first_outer = static_cast<int>(pts.size());
    for (int k = 0; k < spec.m; ++k) {
        const double th = two_pi * k / spec.m;
        pts.push_back({R * std::cos(th), R * std::sin(th)});
    }
    const int first_inner = static_cast<int>(pts.size());
    for (int k = 0; k < spec.n; ++k) {
        const double th = two_pi * k / spec.n;
        pts.push_back({c.x + r * std::cos(th), c.y + r * std::sin(th)});
    }
    const int first_interior = static_cast<int>(pts.size());

    // Interior seeds on concentric layers about the origin. Arc spacing
    // follows the outer boundary spacing divided by the refinement level; a
    // golden-ratio phase per layer avoids long cocircular alignments.
    const double s = two_pi * R / spec.m / refinement;
    const double margin = 0.6 * s;
    const double golden = 0.618033988749895;
    int layer = 0;
    for (double rho = s; rho < R - margin; rho += s, ++layer) {
        const int cnt = std::max(6, static_cast<int>(std::lround(two_pi * rho / s)));
        const double phase = golden * layer;
        for (int k = 0; k < cnt; ++k) {
            const double th = two_pi * (k + phase) / cnt;
            const Vec2 p{rho * std::cos(th), rho * std::sin(th)};
            if ((p - c).norm() < r + margin) continue;  // keep clear of the hole
            pts.push_back(p);
        }
    }

    Delaunay del(pts, R);
    del.triangulate();

    // Hole carving: drop triangles whose centroid falls inside the inner
    // polygon, and everything touching the super-triangle.
    std::vector<Vec2> inner_poly(pts.begin() + first_inner, pts.begin() + first_interior);
    Mesh mesh;
    std::vector<int> remap(pts.size(), -1);
    for (const DelTri& t : del.triangles()) {
        if (!t.alive) continue;
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        const Vec2 centroid = (pts[t.v[0]] + pts[t.v[1]] + pts[t.v[2]]) * (1.0 / 3.0);
        if (inside_convex_polygon(inner_poly, centroid)) continue;
        std::array<int, 3> tri;
        for (int k = 0; k < 3; ++k) {
            if (remap[t.v[k]] < 0) {
                remap[t.v[k]] = mesh.n_vertices();
                mesh.vertices.push_back(pts[t.v[k]]);
            }
            tri[k] = remap[t.v[k]];
        }
        mesh.triangles.push_back(tri);
    }
    if (mesh.triangles.empty()) throw numerical_error("annulus triangulation is empty");

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        if (std::abs(mesh.signed_area(t)) < 1e-14 * R * R)
            throw numerical_error("degenerate triangle in annulus mesh");
    }

    // Boundary edges are those with a single incident triangle; classify by
    // distance of both endpoints to the two circles.
    std::unordered_map<long long, int> count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) count[edge_key(tri[k], tri[(k + 1) % 3])]++;
    const double tol = 1e-9 * R;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            if (count[edge_key(a, b)] != 1) continue;
            const bool outer = std::abs(mesh.vertices[a].norm() - R) < tol &&
                               std::abs(mesh.vertices[b].norm() - R) < tol;
            const bool inner = std::abs((mesh.vertices[a] - c).norm() - r) < tol &&
                               std::abs((mesh.vertices[b] - c).norm() - r) < tol;
            if (outer == inner)
                throw numerical_error("hole carving left a boundary edge off both circles");
            mesh.boundary_edges.push_back(
                {a, b, outer ? BoundaryMarker::OuterCircle : BoundaryMarker::InnerCircle});
        }
    }

    mesh.finalize();
    return mesh;
}

MeshSize mesh_size(const Mesh& mesh) {
    if (mesh.triangles.empty()) throw precondition_error("mesh has no triangles");
    return {mesh.h_max, mesh.h_min, mesh.area};
}

const std::map<int, BoundaryMarker>& default_msh_tag_map() {
    static const std::map<int, BoundaryMarker> table = {
        {1, BoundaryMarker::OuterCircle},  {2, BoundaryMarker::InnerCircle},
        {3, BoundaryMarker::BottomWall},   {4, BoundaryMarker::TopWall},
        {5, BoundaryMarker::PeriodicLeft}, {6, BoundaryMarker::PeriodicRight},
    };
    return table;
}

Mesh import_msh(const std::string& path, const std::map<int, BoundaryMarker>& tag_map) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open MSH file: " + path);

    std::string line;
    std::unordered_map<long long, int> node_id;  // file id -> vertex index
    Mesh mesh;
    bool saw_format = false;

    while (std::getline(in, line)) {
        if (line.rfind("$MeshFormat", 0) == 0) {
            std::getline(in, line);
            std::istringstream ls(line);
            double version = 0.0;
            int file_type = -1, data_size = 0;
            ls >> version >> file_type >> data_size;
            if (std::abs(version - 2.2) > 1e-9 || file_type != 0)
                throw precondition_error("unsupported MSH version (need 2.2 ASCII)");
            saw_format = true;
        } else if (line.rfind("$Nodes", 0) == 0) {
            std::getline(in, line);
            const long long n = std::stoll(line);
            for (long long i = 0; i < n; ++i) {
                std::getline(in, line);
                std::istringstream ls(line);
                long long id;
                double x, y, z;
                ls >> id >> x >> y >> z;
                node_id[id] = mesh.n_vertices();
                mesh.vertices.push_back({x, y});
            }
        } else if (line.rfind("$Elements", 0) == 0) {
            std::getline(in, line);
            const long long n = std::stoll(line);
            for (long long i = 0; i < n; ++i) {
                std::getline(in, line);
                std::istringstream ls(line);
                long long id;
                int type, ntags;
                ls >> id >> type >> ntags;
                std::vector<int> tags(ntags);
                for (int k = 0; k < ntags; ++k) ls >> tags[k];
                if (type == 15) continue;  // isolated point, irrelevant here
                if (type == 1) {
                    long long a, b;
                    ls >> a >> b;
                    if (tags.empty()) throw precondition_error("MSH line element without physical tag");
                    auto it = tag_map.find(tags[0]);
                    if (it == tag_map.end())
                        throw precondition_error("MSH physical tag " + std::to_string(tags[0]) +
                                                 " missing from marker table");
                    mesh.boundary_edges.push_back(
                        {node_id.at(a), node_id.at(b), it->second});
                } else if (type == 2) {
                    long long a, b, cc;
                    ls >> a >> b >> cc;
                    mesh.triangles.push_back({node_id.at(a), node_id.at(b), node_id.at(cc)});
                } else {
                    throw precondition_error("unsupported MSH element type " + std::to_string(type));
                }
            }
        }
    }
    if (!saw_format) throw precondition_error("not an MSH 2.2 file: " + path);
    if (mesh.triangles.empty()) throw precondition_error("MSH file has no triangles");

    mesh.finalize();
    return mesh;
}

}  // namespace leslab
