#ifndef LESLAB_CONFIG_HPP
#define LESLAB_CONFIG_HPP

#include <cstdint>
#include <string>

#include "leslab/mesh.hpp"
#include "leslab/params.hpp"

namespace leslab {

/// One experiment, as read from a TOML config file with sections [domain],
/// [model], [stepping], [outputs] and a top-level seed. Unset optional
/// fields keep the defaults below; parse_config rejects unknown keys.
struct ExperimentConfig {
    // [domain]
    std::string domain = "channel";  // channel | annulus | msh
    double L = 1.0;                  // channel height and width
    int nx = 32, ny = 32;            // channel subdivisions
    double align_strip = 0.0;        // nonzero snaps a mesh line to y = L - value
    double outer_radius = 1.0;
    double inner_radius = 0.25;
    double inner_center_x = 0.3;
    double inner_center_y = 0.0;
    int m = 60, n = 30;  // annulus boundary point counts
    int refinement = 1;
    std::string path;  // msh import

    // [model]
    std::string model = "nse";  // nse | smagorinsky (nse forces cs = 0)
    double nu = 0.0;            // exactly one of nu / re must be positive
    double re = 0.0;
    double cs = 0.17;
    std::string delta_rule = "equal-h";  // equal-h | h-pow | fixed
    double delta_exponent = 1.0 / 6.0;
    double delta_value = 0.0;
    double U = 1.0;
    double C = 1.0;

    // [stepping]
    double dt = 0.01;
    double t_final = 1.0;
    double picard_tol = 1e-8;
    int picard_max = 50;
    int output_every = 1;
    double burn_in = -1.0;  // < 0 selects t_final / 2
    int checkpoint_every = 0;

    // [outputs]
    std::string out_dir = "out";
    int vtk_every = 0;  // 0 disables field snapshots
    bool write_csv = true;
    bool write_json = true;

    std::uint64_t seed = 1;

    void validate() const;
};

/// Throws precondition_error with a line reference on malformed input,
/// unknown keys, or failed cross-field validation.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical form: fixed key order, full double precision. Parsing the
/// output and serializing again reproduces it byte for byte.
std::string serialize_config(const ExperimentConfig& cfg);

Mesh make_mesh(const ExperimentConfig& cfg);

/// Resolves nu/re against U and the geometric length scale (channel L or
/// outer radius) and applies the delta rule at the given mesh size.
ModelParams make_params(const ExperimentConfig& cfg, double h_mesh);
TimeSteppingConfig make_stepping(const ExperimentConfig& cfg);

}  // namespace leslab

#endif
