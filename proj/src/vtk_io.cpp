#include "leslab/vtk_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "leslab/core.hpp"

namespace leslab {

namespace {

void write_geometry(std::ofstream& out, const Mesh& mesh, const char* title) {
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_vertices() << " double\n";
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", v.x, v.y);
        out << buf;
    }
    out << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles() << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << mesh.n_triangles() << "\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) out << "5\n";
}

}  // namespace

void write_vtk_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw precondition_error("cannot open VTK file for writing: " + path);
    write_geometry(out, mesh, "mesh");
    if (!out) throw numerical_error("VTK write failed: " + path);
}

void write_vtk_fields(const std::string& path, const MixedSpace& space, const FlowState& state) {
    const Mesh& mesh = *space.mesh;
    if (state.u.size() != space.n_vel || state.p.size() != space.n_pres)
        throw precondition_error("state does not match the space");
    std::ofstream out(path);
    if (!out) throw precondition_error("cannot open VTK file for writing: " + path);
    write_geometry(out, mesh, "flow fields");

    char buf[160];
    out << "POINT_DATA " << mesh.n_vertices() << "\n";
    out << "VECTORS velocity double\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", state.u[space.vel_dof(v, 0)],
                      state.u[space.vel_dof(v, 1)]);
        out << buf;
    }
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        std::snprintf(buf, sizeof buf, "%.12g\n", state.p[v]);
        out << buf;
    }

    out << "CELL_DATA " << mesh.n_triangles() << "\n";
    out << "SCALARS grad_norm double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        // quadrature point 0 of the rule is the centroid
        const ElemFieldEval ev = eval_on_element(space, t, state.u);
        const double fro = std::sqrt(ev.dxx[0] * ev.dxx[0] + ev.dxy[0] * ev.dxy[0] +
                                     ev.dyx[0] * ev.dyx[0] + ev.dyy[0] * ev.dyy[0]);
        std::snprintf(buf, sizeof buf, "%.12g\n", fro);
        out << buf;
    }
    if (!out) throw numerical_error("VTK write failed: " + path);
}

}  // namespace leslab
