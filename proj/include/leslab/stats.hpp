#ifndef LESLAB_STATS_HPP
#define LESLAB_STATS_HPP

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "leslab/fem.hpp"
#include "leslab/params.hpp"

namespace leslab {

/// Sampled dissipation history of one transient run. avg_eps and c_eps hold
/// the trapezoidal average over [burn_in, back] and its normalization by
/// U^3/L; both are recomputable from the stored samples via time_average.
struct DissipationSeries {
    std::vector<double> times;
    std::vector<double> eps;
    std::vector<double> ke;
    double burn_in = 0.0;
    double U = 1.0;
    double L = 1.0;
    double avg_eps = std::numeric_limits<double>::quiet_NaN();
    double c_eps = std::numeric_limits<double>::quiet_NaN();
};

/// (1/area) [ nu int |grad u|^2 + (C_s delta)^2 int |grad u|^3 ].
double dissipation_rate(const MixedSpace& space, const FlowState& state,
                        const ModelParams& params, ExecMode mode = exec::default_mode());

/// (1/2) int |u|^2 / area.
double kinetic_energy(const MixedSpace& space, const FlowState& state,
                      ExecMode mode = exec::default_mode());

/// Trapezoidal average of eps over [burn_in, last sample], with linear
/// interpolation when burn_in falls between samples. Returns (avg_eps,
/// c_eps = avg_eps * L / U^3). Throws precondition_error on an empty window.
std::pair<double, double> time_average(const DissipationSeries& series, double burn_in);

/// Quadrature vs closed form for the shear-layer background field
/// Phi = (phi(y), 0), phi rising linearly from 0 to U across the strip
/// [L - h, L]. On a mesh with a line at y = L - h every integrand is
/// piecewise polynomial with constant-modulus gradient, so the degree-5 rule
/// is exact. Closed forms (square domain, strip area L*h):
///   ||Phi||^2 = U^2 L h / 3      ||grad Phi||^2      = U^2 L / h
///   ||grad Phi||_3^3 = U^3 L/h^2 ||grad Phi||_{3/2}^3 = U^3 L^2 / h
struct Lemma1Report {
    double quad[4];
    double closed[4];
    double max_rel_err = 0.0;
};
Lemma1Report lemma1_quadrature_check(const MixedSpace& space, double h_strip, double U, double L,
                                     ExecMode mode = exec::default_mode());

/// Max over random discrete fields vanishing at y = L of
/// ||v||_{L2(strip)} / (h ||grad v||_{L2(strip)}); bounded by 1.
struct PoincareReport {
    double max_ratio = 0.0;
    int samples = 0;
};
PoincareReport poincare_strip_check(const MixedSpace& space, double h_strip, int n_fields,
                                    std::uint64_t seed, ExecMode mode = exec::default_mode());

}  // namespace leslab

#endif
