// Acceptance harness: one criterion per entry, one PASS/FAIL line each.
// Usage: acceptance [--list] [--only N]. Exit code = number of failures.
// Every criterion is deterministic (fixed seeds).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "leslab/bounds.hpp"
#include "leslab/solver.hpp"
#include "leslab/stats.hpp"

using namespace leslab;
namespace fs = std::filesystem;

namespace {

std::string g_self_dir;  // directory of this binary, for locating the CLI

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Mesh& keep_mesh(Mesh m) {
    static std::vector<std::unique_ptr<Mesh>> store;
    store.push_back(std::make_unique<Mesh>(std::move(m)));
    return *store.back();
}

MixedSpace channel_space(int n, double align, const DirichletSpec& bc = {}) {
    ChannelSpec spec;
    spec.nx = n;
    spec.ny = n;
    spec.align_strip = align;
    return MixedSpace::build(keep_mesh(build_channel_mesh(spec)), bc);
}

DirichletSpec couette_bc(double U) {
    DirichletSpec bc;
    bc[BoundaryMarker::TopWall] = [U](const Vec2&) { return Vec2{U, 0.0}; };
    bc[BoundaryMarker::BottomWall] = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    return bc;
}

DirichletSpec annulus_bc(double U) {
    DirichletSpec bc;
    bc[BoundaryMarker::OuterCircle] = [U](const Vec2& x) {
        const double r = x.norm();
        return Vec2{-U * x.y / r, U * x.x / r};
    };
    bc[BoundaryMarker::InnerCircle] = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    return bc;
}

// ---- c1: strip extension norm identities ----
Outcome c1() {
    double worst = 0.0;
    for (double h : {0.05, 0.1, 0.25}) {
        MixedSpace s = channel_space(20, h);
        worst = std::max(worst, lemma1_quadrature_check(s, h, 1.0, 1.0).max_rel_err);
    }
    return {worst <= 1e-10, "max rel err " + num(worst) + " (tol 1e-10)"};
}

// ---- c2: trilinear skew symmetry ----
Outcome c2() {
    MixedSpace s = channel_space(10, 0.0);
    AssembledForms forms = assemble_constant_forms(s);
    std::mt19937_64 rng(987654321);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd u(s.n_vel), v(s.n_vel);
        for (int i = 0; i < s.n_vel; ++i) u[i] = dist(rng);
        for (int i = 0; i < s.n_vel; ++i) v[i] = dist(rng);
        const double scale = std::sqrt(u.dot(forms.A * u)) * v.dot(forms.A * v);
        worst = std::max(worst, std::abs(apply_trilinear(s, u, v, v)) / scale);
    }
    return {worst <= 1e-12, "max |b(u,v,v)| / (|u|_A |v|_A^2) = " + num(worst) + " (tol 1e-12)"};
}

// ---- c3: Couette profile is a discrete fixed point ----
Outcome c3() {
    MixedSpace s = channel_space(16, 0.0, couette_bc(1.0));
    const double h = s.mesh->h_max;
    ModelParams params = ModelParams::make(0.01, 0.17, h, 1.0, 1.0);
    TimeSteppingConfig cfg;
    cfg.dt = 0.01;
    FlowState st;
    st.u = interpolate(s, [](const Vec2& x) { return Vec2{x.y, 0.0}; });
    st.p = Eigen::VectorXd::Zero(s.n_pres);
    const Eigen::VectorXd u0 = st.u;
    Stepper stepper(s, params, cfg);
    for (int k = 0; k < 100; ++k) stepper.step(st);
    const double drift = std::sqrt(integral_l2_sq(s, st.u - u0));

    const double ceps = dissipation_rate(s, st, params) * params.L /
                        (params.U * params.U * params.U);
    const double expect = 1.0 / params.re + params.cs_delta_sq() / (params.L * params.L);
    const double cerr = std::abs(ceps - expect) / expect;
    const bool pass = drift <= 1e-7 && cerr <= 1e-8;
    return {pass, "L2 drift " + num(drift) + " (tol 1e-7), c_eps rel err " + num(cerr) +
                      " (tol 1e-8)"};
}

// ---- c4: per-step energy identity with zero drive ----
Outcome c4() {
    DirichletSpec bc;
    auto zero = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    bc[BoundaryMarker::TopWall] = zero;
    bc[BoundaryMarker::BottomWall] = zero;
    bc[BoundaryMarker::PeriodicLeft] = zero;
    bc[BoundaryMarker::PeriodicRight] = zero;
    MixedSpace s = channel_space(8, 0.0, bc);
    ModelParams params = ModelParams::make(0.05, 0.17, 0.1, 1.0, 1.0);
    TimeSteppingConfig cfg;
    cfg.dt = 0.02;
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd red(s.n_vel_reduced);
    for (int i = 0; i < s.n_vel_reduced; ++i) red[i] = dist(rng);
    FlowState st;
    st.u = s.expand_velocity(red);
    st.p = Eigen::VectorXd::Zero(s.n_pres);
    Stepper stepper(s, params, cfg);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k)
        worst = std::max(worst, stepper.step(st).energy_residual);
    return {worst <= 1e-10,
            "max relative residual over 200 steps " + num(worst) + " (tol 1e-10)"};
}

// ---- c5: manufactured-solution convergence ----
// Stream function sin(kx) g(y) cos(wt) with g = y^2 (L-y)^2, so the velocity
// is periodic in x, vanishes at both walls, and is divergence free.
struct Manufactured {
    double L = 1.0, nu = 0.1, omega = 0.3;
    double k = 2.0 * M_PI, q = M_PI;

    double g(double y) const { return L * L * y * y - 2.0 * L * y * y * y + y * y * y * y; }
    double g1(double y) const { return 2.0 * L * L * y - 6.0 * L * y * y + 4.0 * y * y * y; }
    double g2(double y) const { return 2.0 * L * L - 12.0 * L * y + 12.0 * y * y; }
    double g3(double y) const { return -12.0 * L + 24.0 * y; }

    Vec2 velocity(const Vec2& x, double t) const {
        const double c = std::cos(omega * t);
        return {std::sin(k * x.x) * g1(x.y) * c, -k * std::cos(k * x.x) * g(x.y) * c};
    }
    Vec2 force(const Vec2& x, double t) const {
        const double c = std::cos(omega * t);
        const double cd = -omega * std::sin(omega * t);
        const double s = std::sin(k * x.x), co = std::cos(k * x.x);
        const double G = g(x.y), G1 = g1(x.y), G2 = g2(x.y), G3 = g3(x.y);
        const double f1 = s * G1 * cd + k * s * co * c * c * (G1 * G1 - G * G2) +
                          k * co * std::cos(q * x.y) - nu * s * (G3 - k * k * G1) * c;
        const double f2 = -k * co * G * cd + k * k * G * G1 * c * c -
                          q * s * std::sin(q * x.y) - nu * k * co * (k * k * G - G2) * c;
        return {f1, f2};
    }
};

Outcome c5() {
    const Manufactured mms;
    const double T = 0.1, dt = 1e-3;
    std::vector<double> errs;
    for (int n : {8, 16, 32}) {
        DirichletSpec bc;
        auto zero = [](const Vec2&) { return Vec2{0.0, 0.0}; };
        bc[BoundaryMarker::TopWall] = zero;
        bc[BoundaryMarker::BottomWall] = zero;
        MixedSpace s = channel_space(n, 0.0, bc);
        ModelParams params = ModelParams::make(mms.nu, 0.0, 0.0, 1.0, 1.0);
        TimeSteppingConfig cfg;
        cfg.dt = dt;
        FlowState st;
        st.u = interpolate(s, [&](const Vec2& x) { return mms.velocity(x, 0.0); });
        st.p = Eigen::VectorXd::Zero(s.n_pres);
        Stepper stepper(s, params, cfg,
                        [&](const Vec2& x, double t) { return mms.force(x, t); });
        const int nsteps = static_cast<int>(std::llround(T / dt));
        for (int k = 0; k < nsteps; ++k) stepper.step(st);
        errs.push_back(error_l2(s, st.u, [&](const Vec2& x) { return mms.velocity(x, T); }));
    }
    const double p1 = std::log2(errs[0] / errs[1]);
    const double p2 = std::log2(errs[1] / errs[2]);
    const double order = std::min(p1, p2);
    return {order >= 2.5, "L2 errors " + num(errs[0]) + " / " + num(errs[1]) + " / " +
                              num(errs[2]) + ", orders " + num(p1) + ", " + num(p2) +
                              " (need >= 2.5)"};
}

// ---- c6: corollary minimizers vs closed forms and a grid oracle ----
Outcome c6() {
    std::mt19937_64 rng(20260815);
    std::uniform_real_distribution<double> ure(2.0, 6.0);
    std::uniform_real_distribution<double> uh(std::log10(1e-3), std::log10(0.5));
    double worst = 0.0;
    int bracket_misses = 0;
    for (int k = 0; k < 50; ++k) {
        const double re = std::pow(10.0, ure(rng));
        const double r = std::pow(10.0, uh(rng));
        const double A = std::pow(1.0 / r, 5.0) + std::pow(1.0 / r, 2.5);

        const double cs_star = std::pow(2.0 * A, 1.0 / 6.0);
        MinimizerResult f = minimize_cor1(re, r);
        worst = std::max(worst, std::abs(f.argmin - cs_star) / cs_star);
        GridScan gf = grid_scan_cor1(re, r, 1000000);
        if (!(gf.cell_lo <= cs_star && cs_star <= gf.cell_hi)) ++bracket_misses;

        const double x_star = r * cs_star;  // L = 1
        MinimizerResult g = minimize_cor2(re, r, 1.0);
        worst = std::max(worst, std::abs(g.argmin - x_star) / x_star);
        GridScan gg = grid_scan_cor2(re, r, 1.0, 1000000);
        if (!(gg.cell_lo <= x_star && x_star <= gg.cell_hi)) ++bracket_misses;
    }

    // reference-point report, not asserted: the literature quotes ~2000 here
    MinimizerResult ref = minimize_cor1(1e6, 0.01);
    std::printf("note: c6 F_min at h/L = 0.01, Re = 1e6 is %.1f (argmin C_s = %.3f); "
                "commonly quoted reference value is ~2000; discrepancy logged, not asserted\n",
                ref.min_value, ref.argmin);

    const bool pass = worst <= 1e-8 && bracket_misses == 0;
    return {pass, "max argmin rel err " + num(worst) + " (tol 1e-8), oracle bracket misses " +
                      std::to_string(bracket_misses) + "/100"};
}

// ---- c7: level-set curves and region dominance ----
Outcome c7() {
    double worst = 0.0;
    std::vector<double> grid;
    for (int k = 0; k < 40; ++k)
        grid.push_back(std::pow(10.0, -3.0 + (std::log10(0.99) + 3.0) * k / 39.0));
    for (double re : {1e1, 1e3, 1e5, 1e7}) {
        ZetaCurves z = zeta_curves(re, 1.0, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double h = grid[i];
            auto lam = [&](double csd) {
                const double l1 = (1.0 / re) * (1.0 / h);
                const double l2 = (csd / h) * (csd / h);
                const double c4 = std::pow(csd, 4.0);
                const double l3 = 1.0 / (c4 * h) + std::pow(h, 1.5) / c4;
                return std::array<double, 3>{l1, l2, l3};
            };
            auto rel = [](double a, double b) {
                return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
            };
            auto z1 = lam(z.zeta1[i]);
            worst = std::max(worst, rel(z1[0], z1[1]));
            auto z2 = lam(z.zeta2[i]);
            worst = std::max(worst, rel(z2[1], z2[2]));
            auto z3 = lam(z.zeta3[i]);
            worst = std::max(worst, rel(z3[0], z3[2]));
        }
    }

    std::mt19937_64 rng(1618033988);
    std::uniform_real_distribution<double> ure(0.0, 8.0);
    std::uniform_real_distribution<double> uh(-3.0, 0.0);
    std::uniform_real_distribution<double> ud(-4.0, 2.0);
    int strict_max = 0;
    for (int k = 0; k < 10000; ++k) {
        const double re = std::pow(10.0, ure(rng));
        const double h = std::pow(10.0, uh(rng));
        const double csd = std::pow(10.0, ud(rng));
        const double l1 = (1.0 / re) * (1.0 / h);
        const double l2 = (csd / h) * (csd / h);
        const double c4 = std::pow(csd, 4.0);
        const double l3 = 1.0 / (c4 * h) + std::pow(h, 1.5) / c4;
        if (l1 > l2 && l1 > l3) ++strict_max;
    }
    const bool pass = worst <= 1e-12 && strict_max == 0;
    return {pass, "max level-set rel err " + num(worst) + " (tol 1e-12), lambda1 strict max " +
                      std::to_string(strict_max) + "/10000 samples"};
}

// ---- c8: laminarization contrast, coarse model vs fine plain NSE ----
double std_ke_after(const DissipationSeries& s, double t0) {
    double sum = 0.0;
    long n = 0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        if (s.times[i] >= t0 - 1e-12) {
            sum += s.ke[i];
            ++n;
        }
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        if (s.times[i] >= t0 - 1e-12) var += (s.ke[i] - mean) * (s.ke[i] - mean);
    return std::sqrt(var / n);
}

Outcome c8() {
    TimeSteppingConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 10.0;
    TransientOptions opts;
    opts.burn_in = 5.0;

    AnnulusSpec coarse;
    coarse.m = 60;
    coarse.n = 30;
    MixedSpace s_sm = MixedSpace::build(keep_mesh(build_annulus_mesh(coarse)), annulus_bc(1.0));
    ModelParams p_sm = ModelParams::make(0.001, 0.17, s_sm.mesh->h_max, 1.0, 1.0);
    TransientResult sm = run_transient(s_sm, p_sm, cfg, opts);

    AnnulusSpec fine;
    fine.m = 150;
    fine.n = 100;
    MixedSpace s_nse = MixedSpace::build(keep_mesh(build_annulus_mesh(fine)), annulus_bc(1.0));
    ModelParams p_nse = ModelParams::make(0.001, 0.0, 0.0, 1.0, 1.0);
    TransientResult nse = run_transient(s_nse, p_nse, cfg, opts);

    if (!sm.completed || !nse.completed)
        return {false, "run aborted: " + (sm.completed ? nse.error : sm.error)};

    const double sd_sm = std_ke_after(sm.series, 5.0);
    const double sd_nse = std_ke_after(nse.series, 5.0);
    const double ratio = sd_sm / sd_nse;
    const bool pass = ratio <= 0.1;
    return {pass, "std(ke) over [5,10]: model " + num(sd_sm) + ", nse " + num(sd_nse) +
                      ", ratio " + num(ratio) + " (need <= 0.1); mean c_eps model " +
                      num(sm.series.c_eps) + ", nse " + num(nse.series.c_eps)};
}

// ---- c9: dissipation audit recorded in run artifacts ----
int run_cli(const std::string& args, const fs::path& log) {
    const std::string cli = (fs::path(g_self_dir) / "leslab").string();
    const std::string cmd = "'" + cli + "' " + args + " > '" + log.string() + "' 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

Outcome c9() {
    const fs::path dir = fs::current_path() / "acceptance_c9";
    fs::remove_all(dir);
    fs::create_directories(dir);

    {
        std::ofstream cfg(dir / "healthy.toml");
        cfg << "seed = 3\n[domain]\ntype = \"channel\"\nnx = 12\nny = 12\n"
            << "[model]\ntype = \"smagorinsky\"\nre = 500.0\ncs = 0.17\n"
            << "[stepping]\ndt = 0.01\nt_final = 0.5\n";
    }
    int rc = run_cli("--config '" + (dir / "healthy.toml").string() + "' --out '" +
                         (dir / "healthy").string() + "' run",
                     dir / "healthy.log");
    if (rc != 0) return {false, "healthy run exited " + std::to_string(rc)};
    nlohmann::json j;
    {
        std::ifstream in(dir / "healthy" / "summary.json");
        if (!in) return {false, "summary.json missing"};
        in >> j;
    }
    if (!j.contains("bound_check")) return {false, "summary lacks the bound_check record"};
    const double ceps = j["bound_check"]["c_eps"].get<double>();
    const double cap = j["bound_check"]["thm2_normalized_C1"].get<double>();
    const bool sat = j["bound_check"]["satisfied"].get<bool>();
    if (!std::isfinite(ceps) || !std::isfinite(cap))
        return {false, "bound_check values are not finite"};
    if (sat != (ceps <= cap)) return {false, "satisfied flag inconsistent with the numbers"};
    if (!sat) return {false, "measured c_eps " + num(ceps) + " exceeds the cap " + num(cap)};
    if (!j["warnings"].empty() || fs::exists(dir / "healthy" / "warnings.txt"))
        return {false, "healthy run unexpectedly produced warnings"};

    // warning channel: a run that cannot converge must surface the fact
    {
        std::ofstream cfg(dir / "warned.toml");
        cfg << "seed = 3\n[domain]\ntype = \"annulus\"\nm = 24\nn = 12\n"
            << "[model]\ntype = \"nse\"\nre = 200.0\n"
            << "[stepping]\ndt = 0.05\nt_final = 0.25\npicard_max = 1\npicard_tol = 1e-12\n";
    }
    rc = run_cli("--config '" + (dir / "warned.toml").string() + "' --out '" +
                     (dir / "warned").string() + "' run",
                 dir / "warned.log");
    if (rc != 0) return {false, "warned run exited " + std::to_string(rc)};
    nlohmann::json jw;
    {
        std::ifstream in(dir / "warned" / "summary.json");
        in >> jw;
    }
    if (jw["warnings"].empty() || !fs::exists(dir / "warned" / "warnings.txt"))
        return {false, "warning was dropped instead of surfaced as an artifact"};

    return {true, "c_eps " + num(ceps) + " <= cap " + num(cap) +
                      " recorded; warning artifact path exercised"};
}

// ---- c10: strip inequality for fields vanishing at the wall ----
Outcome c10() {
    MixedSpace s = channel_space(12, 0.1);
    PoincareReport rep = poincare_strip_check(s, 0.1, 100, 31415);
    return {rep.max_ratio <= 1.0 && rep.max_ratio > 0.0,
            "max |v| / (h |grad v|) over 100 fields = " + num(rep.max_ratio) + " (tol 1.0)"};
}

struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Entry kEntries[] = {
    {1, "shear-norm-identities", c1},  {2, "trilinear-skew-symmetry", c2},
    {3, "couette-fixed-point", c3},    {4, "energy-identity", c4},
    {5, "manufactured-convergence", c5}, {6, "minimizer-agreement", c6},
    {7, "level-set-regions", c7},      {8, "laminarization-contrast", c8},
    {9, "bound-audit-artifacts", c9},  {10, "strip-inequality", c10},
};

}  // namespace

int main(int argc, char** argv) {
    g_self_dir = fs::weakly_canonical(fs::path(argv[0])).parent_path().string();
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--list") {
            for (const auto& e : kEntries) std::printf("c%-3d %s\n", e.id, e.name);
            return 0;
        }
        if (a == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (a.rfind("--only=", 0) == 0) {
            only = std::atoi(a.c_str() + 7);
        } else {
            std::fprintf(stderr, "usage: acceptance [--list] [--only N]\n");
            return 64;
        }
    }

    int failures = 0;
    for (const auto& e : kEntries) {
        if (only != 0 && e.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s c%d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", e.id, e.name,
                    out.detail.c_str(), sec);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
