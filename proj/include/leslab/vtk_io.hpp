#ifndef LESLAB_VTK_IO_HPP
#define LESLAB_VTK_IO_HPP

#include <string>

#include "leslab/fem.hpp"
#include "leslab/mesh.hpp"

namespace leslab {

/// Legacy ASCII VTK unstructured grid, geometry only.
void write_vtk_mesh(const std::string& path, const Mesh& mesh);

/// Geometry plus vertex velocity/pressure point data and the velocity
/// gradient Frobenius norm per cell (evaluated at the centroid).
void write_vtk_fields(const std::string& path, const MixedSpace& space, const FlowState& state);

}  // namespace leslab

#endif
