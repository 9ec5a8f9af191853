#ifndef LESLAB_PARAMS_HPP
#define LESLAB_PARAMS_HPP

#include "leslab/core.hpp"

namespace leslab {

/// Physical parameters of one run. re is stored, not derived on the fly, so
/// a hand-edited struct can be caught by validate().
struct ModelParams {
    double nu = 1.0;
    double cs = 0.0;     // Smagorinsky constant; 0 recovers plain NSE
    double delta = 0.0;  // filter length
    double U = 1.0;      // driving speed
    double L = 1.0;      // length scale
    double re = 1.0;     // U*L/nu

    static ModelParams make(double nu, double cs, double delta, double U, double L);
    void validate() const;
    double cs_delta_sq() const { return (cs * delta) * (cs * delta); }
};

struct TimeSteppingConfig {
    double dt = 0.0;
    double t_final = 0.0;
    double picard_tol = 1e-8;  // relative increment
    int picard_max = 50;
    int output_every = 1;      // steps between statistic samples

    void validate() const;
};

}  // namespace leslab

#endif
