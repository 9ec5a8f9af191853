#include "leslab/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "leslab/core.hpp"

namespace leslab {

namespace {

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

}  // namespace

std::uint64_t mesh_hash(const Mesh& mesh) {
    std::uint64_t h = 14695981039346656037ull;
    std::uint64_t nv = mesh.n_vertices();
    std::uint64_t nt = mesh.n_triangles();
    fnv_bytes(h, &nv, sizeof nv);
    fnv_bytes(h, &nt, sizeof nt);
    for (const auto& v : mesh.vertices) {
        fnv_bytes(h, &v.x, sizeof v.x);
        fnv_bytes(h, &v.y, sizeof v.y);
    }
    for (const auto& t : mesh.triangles) fnv_bytes(h, t.data(), sizeof(int) * 3);
    return h;
}

void write_checkpoint(const std::string& path, const Mesh& mesh, const FlowState& state) {
    std::ofstream out(path);
    if (!out) throw precondition_error("cannot open checkpoint file for writing: " + path);
    char buf[64];
    out << "LESLAB-CHKPT 1\n";
    std::snprintf(buf, sizeof buf, "%016" PRIx64, mesh_hash(mesh));
    out << "mesh " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", state.t);
    out << "t " << buf << "\n";
    out << "u " << state.u.size() << "\n";
    for (Eigen::Index i = 0; i < state.u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", state.u[i]);
        out << buf << "\n";
    }
    out << "p " << state.p.size() << "\n";
    for (Eigen::Index i = 0; i < state.p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", state.p[i]);
        out << buf << "\n";
    }
    if (!out) throw numerical_error("checkpoint write failed: " + path);
}

FlowState read_checkpoint(const std::string& path, const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open checkpoint file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "LESLAB-CHKPT 1")
        throw numerical_error("unrecognized checkpoint header in " + path);

    std::string key;
    std::string hex;
    in >> key >> hex;
    if (key != "mesh") throw numerical_error("malformed checkpoint: missing mesh hash");
    char expect[32];
    std::snprintf(expect, sizeof expect, "%016" PRIx64, mesh_hash(mesh));
    if (hex != expect) throw numerical_error("checkpoint mesh hash mismatch: file belongs to a different mesh");

    FlowState state;
    in >> key >> state.t;
    if (key != "t") throw numerical_error("malformed checkpoint: missing time");
    std::size_t n = 0;
    in >> key >> n;
    if (key != "u") throw numerical_error("malformed checkpoint: missing velocity block");
    state.u.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) in >> state.u[static_cast<Eigen::Index>(i)];
    in >> key >> n;
    if (key != "p") throw numerical_error("malformed checkpoint: missing pressure block");
    state.p.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) in >> state.p[static_cast<Eigen::Index>(i)];
    if (!in) throw numerical_error("checkpoint truncated: " + path);
    return state;
}

}  // namespace leslab
