#include "leslab/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "leslab/core.hpp"

namespace leslab {

void BoundInputs::validate() const {
    if (!(re > 0.0) || !(h > 0.0) || !(L > 0.0) || !(U > 0.0) || !(C > 0.0))
        throw precondition_error("re, h, L, U, C must be positive");
    if (cs < 0.0 || delta < 0.0) throw precondition_error("cs and delta must be nonnegative");
}

const char* region_name(Region r) {
    switch (r) {
        case Region::I: return "I";
        case Region::II: return "II";
        case Region::III: return "III";
        case Region::IV: return "IV";
    }
    return "?";
}

double bound_thm1(const BoundInputs& in) {
    in.validate();
    const double s = in.cs_delta() / in.L * in.re;
    return in.C * (1.0 + s * s) * in.U * in.U * in.U / in.L;
}

bool thm1_hypothesis_met(const BoundInputs& in) {
    in.validate();
    return in.h < 0.2 * in.L / in.re;
}

namespace {

struct Lambdas {
    double l1, l2, l3;
};

Lambdas lambdas_at(double re, double h, double cs_delta, double L) {
    Lambdas l;
    l.l1 = (1.0 / re) * (L / h);
    l.l2 = (cs_delta / h) * (cs_delta / h);
    const double x4 = cs_delta * cs_delta * cs_delta * cs_delta;
    l.l3 = std::pow(L, 5) / (x4 * h) + std::pow(L, 2.5) * std::pow(h, 1.5) / x4;
    return l;
}

}  // namespace

BoundReport bound_thm2(const BoundInputs& in) {
    in.validate();
    if (!(in.cs_delta() > 0.0))
        throw precondition_error("under-resolved estimate needs cs*delta > 0; use bound_thm1");
    BoundReport rep;
    const double cube = in.U * in.U * in.U / in.L;
    rep.thm1 = bound_thm1(in);
    rep.thm1_normalized = rep.thm1 * in.L / (in.U * in.U * in.U);
    rep.thm1_hypothesis_met = thm1_hypothesis_met(in);
    rep.h_less_than_L = in.h < in.L;

    const Lambdas l = lambdas_at(in.re, in.h, in.cs_delta(), in.L);
    rep.lambda1 = l.l1;
    rep.lambda2 = l.l2;
    rep.lambda3 = l.l3;
    rep.thm2_normalized = in.C * (l.l1 + l.l2 + l.l3);
    rep.thm2 = rep.thm2_normalized * cube;
    rep.region = classify_region(l.l1, l.l2, l.l3);
    rep.dominant = 1;
    if (l.l2 > l.l1 && l.l2 >= l.l3) rep.dominant = 2;
    else if (l.l3 > l.l1 && l.l3 > l.l2) rep.dominant = 3;
    return rep;
}

ZetaCurves zeta_curves(double re, double L, const std::vector<double>& h_over_L) {
    if (!(re > 0.0) || !(L > 0.0)) throw precondition_error("re and L must be positive");
    ZetaCurves z;
    z.h_over_L = h_over_L;
    z.zeta1.reserve(h_over_L.size());
    z.zeta2.reserve(h_over_L.size());
    z.zeta3.reserve(h_over_L.size());
    for (double r : h_over_L) {
        if (!(r > 0.0) || r > 1.0) throw precondition_error("h/L grid values must lie in (0, 1]");
        z.zeta1.push_back(L * std::sqrt(r / re));
        z.zeta2.push_back(L * std::pow(std::pow(r, 3.5) + r, 1.0 / 6.0));
        z.zeta3.push_back(L * std::pow(re * (1.0 + std::pow(r, 2.5)), 0.25));
    }
    return z;
}

Region classify_region(double lambda1, double lambda2, double lambda3) {
    if (lambda3 >= lambda2) return lambda1 >= lambda2 ? Region::I : Region::II;
    return lambda3 >= lambda1 ? Region::III : Region::IV;
}

Region classify_region(double h, double cs_delta, double re, double L) {
    if (!(h > 0.0) || !(cs_delta > 0.0) || !(re > 0.0) || !(L > 0.0))
        throw precondition_error("region classification needs positive inputs");
    const Lambdas l = lambdas_at(re, h, cs_delta, L);
    return classify_region(l.l1, l.l2, l.l3);
}

namespace {

// Golden-section on [a, b]; the callable takes the log of the parameter.
// The objective is unimodal in log space, so 64 fixed iterations shrink the
// interval far below the requested 1e-10 relative accuracy.
template <class F>
long double golden_log_min(F&& f, long double la, long double lb) {
    const long double invphi = 0.6180339887498948482045868343656381L;
    long double a = la, b = lb;
    long double c = b - invphi * (b - a);
    long double d = a + invphi * (b - a);
    long double fc = f(c), fd = f(d);
    for (int i = 0; i < 64; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const long double x = fc <= fd ? c : d;
    if (x < la + 1e-3L || x > lb - 1e-3L)
        throw numerical_error("golden-section bracket does not contain the minimum");
    return x;
}

// F and G collapse to K + y + A/y^2 with y = (x/scale)^2; the helpers keep
// the original variable for reporting.
struct PowerObjective {
    long double K;      // constant lambda1 term
    long double A;      // coefficient of the x^{-4} term, in scaled units
    long double scale;  // 1 for cor1, h for cor2
    long double eval_log(long double lx) const {
        const long double y = expl(2.0L * (lx - logl(scale)));
        return K + y + A / (y * y);
    }
    double eval(double x) const { return static_cast<double>(eval_log(logl((long double)x))); }
};

PowerObjective cor1_objective(double re, double h_over_L) {
    if (!(re > 0.0)) throw precondition_error("re must be positive");
    if (!(h_over_L > 0.0) || !(h_over_L < 1.0))
        throw precondition_error("h/L must lie in (0, 1)");
    const long double r = 1.0L / static_cast<long double>(h_over_L);
    return {r / static_cast<long double>(re), powl(r, 5.0L) + powl(r, 2.5L), 1.0L};
}

PowerObjective cor2_objective(double re, double h, double L) {
    if (!(re > 0.0)) throw precondition_error("re must be positive");
    if (!(h > 0.0) || !(h < L)) throw precondition_error("h must lie in (0, L)");
    const long double r = static_cast<long double>(L) / static_cast<long double>(h);
    return {r / static_cast<long double>(re), powl(r, 5.0L) + powl(r, 2.5L),
            static_cast<long double>(h)};
}

MinimizerResult run_golden(const PowerObjective& obj, double bracket_scale, double stationary) {
    const long double la = logl(1e-6L * (long double)bracket_scale);
    const long double lb = logl(1e+6L * (long double)bracket_scale);
    const long double lx = golden_log_min([&](long double t) { return obj.eval_log(t); }, la, lb);
    MinimizerResult res;
    res.argmin = static_cast<double>(expl(lx));
    res.min_value = static_cast<double>(obj.eval_log(lx));
    res.stationary = stationary;
    return res;
}

GridScan run_grid(const PowerObjective& obj, double bracket_scale, long n) {
    if (n < 3) throw precondition_error("grid scan needs at least 3 points");
    const double lo = 1e-6 * bracket_scale;
    const double hi = 1e+6 * bracket_scale;
    const double lrho = std::log(hi / lo) / static_cast<double>(n - 1);
    const double rho2 = std::exp(2.0 * lrho);
    const double rho4inv = std::exp(-4.0 * lrho);
    const double K = static_cast<double>(obj.K);
    const double s = static_cast<double>(obj.scale);
    double y = (lo / s) * (lo / s);          // (x/scale)^2 running term
    double z = static_cast<double>(obj.A) / (y * y);  // A (x/scale)^{-4} running term
    long best = 0;
    double best_val = K + y + z;
    for (long i = 1; i < n; ++i) {
        y *= rho2;
        z *= rho4inv;
        const double v = K + y + z;
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    GridScan scan;
    scan.argmin = lo * std::exp(lrho * static_cast<double>(best));
    scan.min_value = obj.eval(scan.argmin);
    scan.cell_lo = best > 0 ? lo * std::exp(lrho * static_cast<double>(best - 1)) : lo;
    scan.cell_hi = best < n - 1 ? lo * std::exp(lrho * static_cast<double>(best + 1)) : hi;
    return scan;
}

}  // namespace

MinimizerResult minimize_cor1(double re, double h_over_L) {
    const PowerObjective obj = cor1_objective(re, h_over_L);
    const double A = static_cast<double>(obj.A);
    return run_golden(obj, 1.0, std::pow(2.0 * A, 1.0 / 6.0));
}

MinimizerResult minimize_cor2(double re, double h, double L) {
    const PowerObjective obj = cor2_objective(re, h, L);
    const double A = static_cast<double>(obj.A);
    return run_golden(obj, L, h * std::pow(2.0 * A, 1.0 / 6.0));
}

GridScan grid_scan_cor1(double re, double h_over_L, long n) {
    return run_grid(cor1_objective(re, h_over_L), 1.0, n);
}

GridScan grid_scan_cor2(double re, double h, double L, long n) {
    return run_grid(cor2_objective(re, h, L), L, n);
}

double DeltaRule::apply(double h) const {
    switch (kind) {
        case Kind::EqualH: return h;
        case Kind::HPow: return std::pow(h, exponent);
        case Kind::Fixed: return value;
    }
    return h;
}

std::vector<SurfaceRow> summary_surface(const std::vector<double>& re_grid,
                                        const std::vector<double>& h_grid, const DeltaRule& rule,
                                        double cs, double L, double U, double C) {
    std::vector<SurfaceRow> rows;
    rows.reserve(re_grid.size() * h_grid.size());
    for (double re : re_grid) {
        for (double h : h_grid) {
            BoundInputs in;
            in.re = re;
            in.h = h;
            in.cs = cs;
            in.delta = rule.apply(h);
            in.L = L;
            in.U = U;
            in.C = C;
            in.validate();
            SurfaceRow row;
            row.re = re;
            row.h = h;
            row.cs_delta = in.cs_delta();
            row.branch = thm1_hypothesis_met(in) ? 1 : 2;
            if (row.cs_delta > 0.0) {
                const BoundReport rep = bound_thm2(in);
                row.lambda1 = rep.lambda1;
                row.lambda2 = rep.lambda2;
                row.lambda3 = rep.lambda3;
                row.region = rep.region;
                row.bound = row.branch == 1 ? rep.thm1_normalized : rep.thm2_normalized;
            } else {
                row.lambda1 = (1.0 / re) * (L / h);
                row.lambda2 = 0.0;
                row.lambda3 = std::numeric_limits<double>::infinity();
                row.branch = 1;  // no model term: only the resolved estimate exists
                row.bound = bound_thm1(in) * L / (U * U * U);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfaceRow>& rows) {
    out << "re,h,cs_delta,lambda1,lambda2,lambda3,bound,region,branch\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,%d\n", r.re,
                      r.h, r.cs_delta, r.lambda1, r.lambda2, r.lambda3, r.bound,
                      r.cs_delta > 0.0 ? region_name(r.region) : "-", r.branch);
        out << buf;
    }
}

void write_zeta_csv(std::ostream& out, const ZetaCurves& curves) {
    out << "h_over_L,zeta1,zeta2,zeta3\n";
    char buf[160];
    for (std::size_t i = 0; i < curves.h_over_L.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", curves.h_over_L[i],
                      curves.zeta1[i], curves.zeta2[i], curves.zeta3[i]);
        out << buf;
    }
}

std::string surface_gnuplot_block(const std::string& csv_name) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set logscale xyz\n";
    s += "set xlabel 'Re'\n";
    s += "set ylabel 'h'\n";
    s += "set zlabel 'bound x L/U^3'\n";
    s += "set dgrid3d 30,30\n";
    s += "splot '" + csv_name + "' using 1:2:7 with lines\n";
    return s;
}

std::string zeta_gnuplot_block(const std::string& csv_name) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set logscale xy\n";
    s += "set xlabel 'h/L'\n";
    s += "set ylabel 'C_s delta'\n";
    s += "plot '" + csv_name + "' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n";
    return s;
}

}  // namespace leslab
