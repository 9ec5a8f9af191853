#ifndef LESLAB_CHECKPOINT_HPP
#define LESLAB_CHECKPOINT_HPP

#include <cstdint>
#include <string>

#include "leslab/fem.hpp"
#include "leslab/mesh.hpp"

namespace leslab {

/// FNV-1a over vertex coordinates and triangle indices; identifies the mesh
/// a checkpoint belongs to.
std::uint64_t mesh_hash(const Mesh& mesh);

/// Text checkpoint: time and raw coefficient vectors at full double
/// precision, tagged with the mesh hash.
void write_checkpoint(const std::string& path, const Mesh& mesh, const FlowState& state);

/// Throws numerical_error when the stored mesh hash does not match `mesh`.
FlowState read_checkpoint(const std::string& path, const Mesh& mesh);

}  // namespace leslab

#endif
