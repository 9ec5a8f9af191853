#ifndef LESLAB_MESH_HPP
#define LESLAB_MESH_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "leslab/core.hpp"

namespace leslab {

enum class BoundaryMarker : int {
    OuterCircle = 1,
    InnerCircle = 2,
    BottomWall = 3,
    TopWall = 4,
    PeriodicLeft = 5,
    PeriodicRight = 6,
};

const char* marker_name(BoundaryMarker m);

struct BoundaryEdge {
    int v0;
    int v1;
    BoundaryMarker marker;
};

/// Straight-edged triangulation. Immutable after finalize(); all modules
/// share it read-only. Coordinates are (x, y) with y the wall-normal
/// direction for the channel domain.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    double h_max = 0.0;
    double h_min = 0.0;
    double area = 0.0;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }

    double signed_area(int t) const;
    double diameter(int t) const;  // longest edge of triangle t

    /// Orients every triangle counterclockwise, computes h_max/h_min/area,
    /// and validates: indices in range, no zero-area triangle, every edge
    /// shared by at most two triangles, boundary_edges exactly the edges
    /// with one incident triangle. Throws numerical_error on violation.
    void finalize();
};

/// Square channel [0,L] x [0,L], structured grid, two triangles per cell.
/// align_strip > 0 forces a horizontal mesh line exactly at y = L - align_strip
/// by snapping the nearest interior grid line.
struct ChannelSpec {
    double L = 1.0;
    int ny = 2;   // vertical subdivisions
    int nx = 2;   // horizontal subdivisions
    double align_strip = 0.0;  // 0 disables alignment
};

/// Disk of outer_radius about the origin with a circular hole of
/// inner_radius about inner_center. m and n are boundary point counts.
struct AnnulusSpec {
    double outer_radius = 1.0;
    double inner_radius = 0.25;
    Vec2 inner_center{0.3, 0.0};
    int m = 60;
    int n = 30;
};

Mesh build_channel_mesh(const ChannelSpec& spec);

/// Delaunay (Bowyer-Watson) triangulation of the annular region. Interior
/// points are seeded on concentric polar layers with spacing set by the
/// outer boundary, divided by `refinement`; triangles inside the hole are
/// removed afterwards. Throws numerical_error if carving leaves a boundary
/// off the two circles or a triangle degenerates
/// (area < 1e-14 * outer_radius^2).
Mesh build_annulus_mesh(const AnnulusSpec& spec, int refinement = 1);

struct MeshSize {
    double h_max;
    double h_min;
    double area;
};

MeshSize mesh_size(const Mesh& mesh);

const std::map<int, BoundaryMarker>& default_msh_tag_map();

/// Gmsh MSH 2.2 ASCII reader. Line elements (type 1) carry the boundary
/// markers via their first (physical) tag, mapped through tag_map; type 2
/// triangles form the mesh; 2D element types other than 2 are rejected.
Mesh import_msh(const std::string& path,
                const std::map<int, BoundaryMarker>& tag_map = default_msh_tag_map());

}  // namespace leslab

#endif
