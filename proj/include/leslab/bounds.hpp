#ifndef LESLAB_BOUNDS_HPP
#define LESLAB_BOUNDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace leslab {

/// Inputs of the closed-form dissipation estimates. C is the generic
/// prefactor of the estimates; it is unspecified upstream, so it is carried
/// explicitly and defaults to 1.
struct BoundInputs {
    double re = 1.0;
    double h = 0.1;
    double cs = 0.0;
    double delta = 0.0;
    double L = 1.0;
    double U = 1.0;
    double C = 1.0;

    void validate() const;  // positivity; cs, delta may be zero
    double cs_delta() const { return cs * delta; }
};

/// (h/L, C_s delta) plane regions cut out by the three crossing curves:
/// I/II sit below the lambda2 = lambda3 curve and are split by
/// lambda1 = lambda2; III/IV sit above it and are split by
/// lambda1 = lambda3.
enum class Region { I = 1, II = 2, III = 3, IV = 4 };
const char* region_name(Region r);

struct BoundReport {
    double thm1 = 0.0;  // fully-resolved estimate, dimensional
    double thm2 = 0.0;  // under-resolved estimate, dimensional
    double thm1_normalized = 0.0;  // x L / U^3
    double thm2_normalized = 0.0;
    double lambda1 = 0.0;  // (1/Re)(L/h)
    double lambda2 = 0.0;  // (C_s delta / h)^2
    double lambda3 = 0.0;  // L^5/((C_s delta)^4 h) + L^{5/2} h^{3/2}/(C_s delta)^4
    Region region = Region::I;
    int dominant = 0;  // 1..3, index of the largest lambda
    bool thm1_hypothesis_met = false;  // h < (1/5) L / Re
    bool h_less_than_L = true;
};

/// C [1 + (cs delta / L)^2 Re^2] U^3 / L. Valid for cs delta = 0 (plain
/// NSE limit U^3/L). The mesh-size hypothesis is reported by
/// thm1_hypothesis_met, never enforced.
double bound_thm1(const BoundInputs& in);
bool thm1_hypothesis_met(const BoundInputs& in);

/// Full report: both estimates, the lambda decomposition of the second one
/// with thm2 = C (lambda1 + lambda2 + lambda3) U^3/L, region label and
/// dominant term. Throws precondition_error when cs delta = 0 (the
/// under-resolved estimate is undefined there; use bound_thm1).
BoundReport bound_thm2(const BoundInputs& in);

/// Crossing curves in the (h/L, C_s delta) plane:
///   zeta1: lambda1 = lambda2,  Re^{-1/2} L (h/L)^{1/2}
///   zeta2: lambda2 = lambda3,  L [(h/L)^{7/2} + h/L]^{1/6}
///   zeta3: lambda1 = lambda3,  Re^{1/4} L [1 + (h/L)^{5/2}]^{1/4}
struct ZetaCurves {
    std::vector<double> h_over_L;
    std::vector<double> zeta1, zeta2, zeta3;
};
ZetaCurves zeta_curves(double re, double L, const std::vector<double>& h_over_L);

Region classify_region(double lambda1, double lambda2, double lambda3);
Region classify_region(double h, double cs_delta, double re, double L);

/// Numeric minimization result next to its analytic stationary point.
struct MinimizerResult {
    double argmin = 0.0;      // golden-section argmin
    double min_value = 0.0;   // objective there
    double stationary = 0.0;  // closed-form stationary point
};

/// Minimize F(C_s) = (1/Re)(L/h) + C_s^2 + A / C_s^4 over C_s > 0 with
/// A = (L/h)^5 + (L/h)^{5/2} (filter width tied to h). Golden-section in
/// log space on [1e-6, 1e6]; stationary point satisfies C_s^6 = 2A.
MinimizerResult minimize_cor1(double re, double h_over_L);

/// Minimize G(x) = (1/Re)(L/h) + (x/h)^2 + h^4 A / x^4 over x = C_s delta.
/// Bracket [1e-6 L, 1e6 L]; stationary point satisfies x^6 = 2 h^6 A.
MinimizerResult minimize_cor2(double re, double h, double L);

/// Brute-force oracle: n log-spaced evaluations over the same bracket.
/// cell_lo/cell_hi are the grid neighbors of the winning point.
struct GridScan {
    double argmin = 0.0;
    double min_value = 0.0;
    double cell_lo = 0.0;
    double cell_hi = 0.0;
};
GridScan grid_scan_cor1(double re, double h_over_L, long n = 1000000);
GridScan grid_scan_cor2(double re, double h, double L, long n = 1000000);

/// delta as a function of h for surface sweeps.
struct DeltaRule {
    enum class Kind { EqualH, HPow, Fixed } kind = Kind::EqualH;
    double exponent = 1.0 / 6.0;  // HPow: delta = h^exponent
    double value = 0.0;           // Fixed: delta = value
    double apply(double h) const;
};

struct SurfaceRow {
    double re = 0.0, h = 0.0, cs_delta = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double bound = 0.0;  // normalized by U^3/L, branch-selected
    int branch = 1;      // 1 when h < (1/5) L / Re, else 2
    Region region = Region::I;
};

/// Branch-selected normalized bound over a (re, h) grid. The seam at
/// h = (1/5) L / Re is marked by the branch column, not smoothed.
std::vector<SurfaceRow> summary_surface(const std::vector<double>& re_grid,
                                        const std::vector<double>& h_grid, const DeltaRule& rule,
                                        double cs, double L, double U, double C);

void write_surface_csv(std::ostream& out, const std::vector<SurfaceRow>& rows);
void write_zeta_csv(std::ostream& out, const ZetaCurves& curves);
std::string surface_gnuplot_block(const std::string& csv_name);
std::string zeta_gnuplot_block(const std::string& csv_name);

}  // namespace leslab

#endif
