#include "leslab/quadrature.hpp"

#include <cmath>

namespace leslab {

namespace {

QuadratureRule make_rule() {
    // Radon's 7-point rule in barycentric form. Interior weights normalized
    // to the unit reference triangle (area 1/2).
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 + s15) / 21.0;
    const double b = (6.0 - s15) / 21.0;
    const double wa = (155.0 + s15) / 2400.0;
    const double wb = (155.0 - s15) / 2400.0;
    const double wc = 9.0 / 80.0;

    QuadratureRule r;
    r.points = {{
        {1.0 / 3.0, 1.0 / 3.0, wc},
        {a, a, wa},
        {1.0 - 2.0 * a, a, wa},
        {a, 1.0 - 2.0 * a, wa},
        {b, b, wb},
        {1.0 - 2.0 * b, b, wb},
        {b, 1.0 - 2.0 * b, wb},
    }};
    return r;
}

}  // namespace

const QuadratureRule& QuadratureRule::instance() {
    static const QuadratureRule rule = make_rule();
    return rule;
}

}  // namespace leslab
