#ifndef LESLAB_QUADRATURE_HPP
#define LESLAB_QUADRATURE_HPP

#include <array>
#include <cstddef>

namespace leslab {

/// Quadrature point on the reference triangle {xi >= 0, eta >= 0, xi+eta <= 1}.
/// Weights include the reference-triangle measure: sum of w equals 1/2, so
/// the physical integral is |det J| * sum_q w_q f(x_q).
struct QuadPoint {
    double xi;
    double eta;
    double w;
};

/// 7-point rule, exact for polynomials of total degree <= 5. Degree 5 covers
/// every polynomial integrand assembled here: P2 mass (degree 4), stiffness
/// (2), divergence (2), and the advection form (5). The |grad u| factors in
/// the eddy-viscosity term are not polynomial; on elements where grad u is
/// constant the rule is still exact.
struct QuadratureRule {
    static constexpr int degree = 5;
    static constexpr const char* name = "triangle-7pt-degree5";
    std::array<QuadPoint, 7> points;

    static const QuadratureRule& instance();
};

}  // namespace leslab

#endif
