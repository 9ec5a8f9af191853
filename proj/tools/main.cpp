#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "leslab/bounds.hpp"
#include "leslab/config.hpp"
#include "leslab/solver.hpp"
#include "leslab/vtk_io.hpp"

using json = nlohmann::ordered_json;
using namespace leslab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw precondition_error("cannot write " + path.string());
    out << text;
}

DirichletSpec boundary_drive(const ExperimentConfig& cfg, const Mesh& mesh) {
    std::set<BoundaryMarker> present;
    for (const auto& e : mesh.boundary_edges) present.insert(e.marker);
    DirichletSpec bc;
    const double U = cfg.U;
    auto rest = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    if (present.count(BoundaryMarker::OuterCircle))
        bc[BoundaryMarker::OuterCircle] = [U](const Vec2& x) {
            const double r = x.norm();
            return Vec2{-U * x.y / r, U * x.x / r};
        };
    if (present.count(BoundaryMarker::InnerCircle)) bc[BoundaryMarker::InnerCircle] = rest;
    if (present.count(BoundaryMarker::TopWall))
        bc[BoundaryMarker::TopWall] = [U](const Vec2&) { return Vec2{U, 0.0}; };
    if (present.count(BoundaryMarker::BottomWall)) bc[BoundaryMarker::BottomWall] = rest;
    return bc;
}

// running trapezoidal average over [burn_in, times[i]] for each sample row
std::vector<double> running_averages(const DissipationSeries& s) {
    std::vector<double> avg(s.times.size(), std::numeric_limits<double>::quiet_NaN());
    DissipationSeries head;
    head.U = s.U;
    head.L = s.L;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        head.times.push_back(s.times[i]);
        head.eps.push_back(s.eps[i]);
        head.ke.push_back(s.ke[i]);
        if (head.times.size() >= 2 && s.times[i] > s.burn_in)
            avg[i] = time_average(head, s.burn_in).first;
    }
    return avg;
}

std::string series_csv(const DissipationSeries& s) {
    std::string text = "t,eps,ke,avg_eps,c_eps\n";
    const std::vector<double> avg = running_averages(s);
    const double u3 = s.U * s.U * s.U;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const double ce = s.U > 0.0 ? avg[i] * s.L / u3 : std::numeric_limits<double>::quiet_NaN();
        text += fmt(s.times[i]) + "," + fmt(s.eps[i]) + "," + fmt(s.ke[i]) + "," + fmt(avg[i]) +
                "," + fmt(ce) + "\n";
    }
    return text;
}

std::string series_gnuplot(const std::string& csv_name) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set xlabel 't'\n";
    s += "plot '" + csv_name + "' using 1:2 with lines, '' using 1:3 with lines\n";
    return s;
}

json mesh_stats_json(const Mesh& mesh) {
    json j;
    j["n_vertices"] = mesh.n_vertices();
    j["n_triangles"] = mesh.n_triangles();
    j["n_boundary_edges"] = mesh.boundary_edges.size();
    j["h_max"] = mesh.h_max;
    j["h_min"] = mesh.h_min;
    j["area"] = mesh.area;
    json markers = json::object();
    std::map<std::string, int> counts;
    for (const auto& e : mesh.boundary_edges) counts[marker_name(e.marker)]++;
    for (const auto& [k, v] : counts) markers[k] = v;
    j["boundary_markers"] = markers;
    return j;
}

json params_json(const ModelParams& p, double C) {
    json j;
    j["nu"] = p.nu;
    j["re"] = p.re;
    j["cs"] = p.cs;
    j["delta"] = p.delta;
    j["cs_delta"] = p.cs * p.delta;
    j["U"] = p.U;
    j["L"] = p.L;
    j["C"] = C;
    return j;
}

json bound_report_json(const BoundInputs& in) {
    json j;
    j["inputs"] = {{"re", in.re}, {"h", in.h},        {"cs", in.cs}, {"delta", in.delta},
                   {"L", in.L},   {"U", in.U},        {"C", in.C}};
    j["thm1"] = bound_thm1(in);
    j["thm1_normalized"] = bound_thm1(in) * in.L / (in.U * in.U * in.U);
    j["thm1_hypothesis_met"] = thm1_hypothesis_met(in);
    if (in.cs_delta() > 0.0) {
        const BoundReport rep = bound_thm2(in);
        j["thm2"] = rep.thm2;
        j["thm2_normalized"] = rep.thm2_normalized;
        j["lambda1"] = rep.lambda1;
        j["lambda2"] = rep.lambda2;
        j["lambda3"] = rep.lambda3;
        j["dominant"] = rep.dominant;
        j["region"] = region_name(rep.region);
        j["h_less_than_L"] = rep.h_less_than_L;
    } else {
        j["thm2"] = nullptr;  // undefined without a model term
    }
    return j;
}

struct RunArtifacts {
    TransientResult result;
    ModelParams params;
    double h_max = 0.0;
    json summary;
};

// Executes one configured experiment and writes config/series/summary (and
// VTK, checkpoint, warnings) artifacts into out_dir.
RunArtifacts run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    write_text(out_dir / "config.toml", serialize_config(cfg));

    Mesh mesh = make_mesh(cfg);
    MixedSpace space = MixedSpace::build(mesh, boundary_drive(cfg, mesh));
    ModelParams params = make_params(cfg, mesh.h_max);
    TimeSteppingConfig stepping = make_stepping(cfg);

    const long nsteps = std::max<long>(1, std::llround(cfg.t_final / cfg.dt));
    TransientOptions opts;
    opts.burn_in = cfg.burn_in;
    opts.checkpoint_every = cfg.checkpoint_every;
    opts.checkpoint_path = (out_dir / "checkpoint.txt").string();
    if (cfg.vtk_every > 0) {
        const fs::path dir = out_dir;
        const int every = cfg.vtk_every;
        opts.on_step = [&space, dir, every, nsteps](const FlowState& st, const StepResult&,
                                                    int k) {
            if (k % every == 0 || k == nsteps) {
                char name[64];
                std::snprintf(name, sizeof name, "fields_%06d.vtk", k);
                write_vtk_fields((dir / name).string(), space, st);
            }
        };
    }

    RunArtifacts art;
    art.params = params;
    art.h_max = mesh.h_max;
    art.result = run_transient(space, params, stepping, opts);

    const DissipationSeries& series = art.result.series;
    if (cfg.write_csv) {
        write_text(out_dir / "series.csv", series_csv(series));
        write_text(out_dir / "series.gp", series_gnuplot("series.csv"));
    }

    json& j = art.summary;
    j["completed"] = art.result.completed;
    if (!art.result.completed) j["error"] = art.result.error;
    j["model"] = cfg.model;
    j["seed"] = cfg.seed;
    j["mesh"] = mesh_stats_json(mesh);
    j["params"] = params_json(params, cfg.C);
    j["stepping"] = {{"dt", cfg.dt},
                     {"t_final", cfg.t_final},
                     {"steps", art.result.picard.steps},
                     {"picard_tol", cfg.picard_tol},
                     {"picard_max", cfg.picard_max}};
    j["picard"] = {{"total_iterations", art.result.picard.total_iterations},
                   {"max_iterations", art.result.picard.max_iterations},
                   {"nonconverged_steps", art.result.picard.nonconverged_steps}};
    j["series"] = {{"samples", series.times.size()},
                   {"burn_in", series.burn_in},
                   {"final_t", series.times.empty() ? 0.0 : series.times.back()},
                   {"final_eps", series.eps.empty()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : series.eps.back()},
                   {"final_ke", series.ke.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                  : series.ke.back()},
                   {"avg_eps", series.avg_eps},
                   {"c_eps", series.c_eps}};

    BoundInputs bin;
    bin.re = params.re;
    bin.h = mesh.h_max;
    bin.cs = params.cs;
    bin.delta = params.delta;
    bin.L = params.L;
    bin.U = params.U;
    bin.C = cfg.C;
    j["bound"] = bound_report_json(bin);

    // sanity inequality against the under-resolved estimate at C = 1
    std::vector<std::string> warnings;
    if (bin.cs_delta() > 0.0 && std::isfinite(series.c_eps)) {
        BoundInputs unit = bin;
        unit.C = 1.0;
        const double cap = bound_thm2(unit).thm2_normalized;
        const bool ok = series.c_eps <= cap;
        j["bound_check"] = {{"c_eps", series.c_eps},
                            {"thm2_normalized_C1", cap},
                            {"satisfied", ok}};
        if (!ok)
            warnings.push_back("measured c_eps " + fmt(series.c_eps) +
                               " exceeds the C=1 normalized estimate " + fmt(cap));
    }
    if (art.result.picard.nonconverged_steps > 0)
        warnings.push_back(std::to_string(art.result.picard.nonconverged_steps) +
                           " steps stopped at the Picard iteration cap");
    if (!art.result.completed) warnings.push_back("run aborted: " + art.result.error);
    j["warnings"] = warnings;
    if (!warnings.empty()) {
        std::string text;
        for (const auto& w : warnings) text += w + "\n";
        write_text(out_dir / "warnings.txt", text);
    }

    if (cfg.write_json) write_text(out_dir / "summary.json", j.dump(2) + "\n");
    return art;
}

int cmd_run(const ExperimentConfig& cfg, const fs::path& out_dir) {
    RunArtifacts art = run_experiment(cfg, out_dir);
    std::cout << art.summary.dump(2) << "\n";
    if (!art.result.completed) {
        std::cerr << "run aborted: " << art.result.error << "\n";
        return kExitSolver;
    }
    return 0;
}

// -------- verify --------

struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
};

int cmd_verify(const fs::path& out_dir, std::uint64_t seed) {
    std::vector<Check> checks;
    std::vector<Mesh> meshes;  // keep alive behind the spaces

    {
        Check c{"shear-layer-norms", false, 0.0, 1e-10};
        for (double h : {0.05, 0.1, 0.25}) {
            ChannelSpec spec;
            spec.nx = 20;
            spec.ny = 20;
            spec.align_strip = h;
            meshes.push_back(build_channel_mesh(spec));
            MixedSpace s = MixedSpace::build(meshes.back());
            c.measured = std::max(c.measured, lemma1_quadrature_check(s, h, 1.0, 1.0).max_rel_err);
        }
        c.pass = c.measured <= c.tolerance;
        checks.push_back(c);
    }

    {
        Check c{"skew-symmetry", false, 0.0, 1e-12};
        ChannelSpec spec;
        spec.nx = 10;
        spec.ny = 10;
        meshes.push_back(build_channel_mesh(spec));
        MixedSpace s = MixedSpace::build(meshes.back());
        AssembledForms forms = assemble_constant_forms(s);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int k = 0; k < 100; ++k) {
            Eigen::VectorXd u(s.n_vel), v(s.n_vel);
            for (int i = 0; i < s.n_vel; ++i) u[i] = dist(rng);
            for (int i = 0; i < s.n_vel; ++i) v[i] = dist(rng);
            const double scale = std::sqrt(u.dot(forms.A * u)) * v.dot(forms.A * v);
            c.measured = std::max(c.measured, std::abs(apply_trilinear(s, u, v, v)) / scale);
        }
        c.pass = c.measured <= c.tolerance;
        checks.push_back(c);
    }

    double couette_ceps = 0.0;
    {
        Check c{"couette-fixed-point", false, 0.0, 1e-7};
        ChannelSpec spec;
        spec.nx = 16;
        spec.ny = 16;
        meshes.push_back(build_channel_mesh(spec));
        DirichletSpec bc;
        bc[BoundaryMarker::TopWall] = [](const Vec2&) { return Vec2{1.0, 0.0}; };
        bc[BoundaryMarker::BottomWall] = [](const Vec2&) { return Vec2{0.0, 0.0}; };
        MixedSpace s = MixedSpace::build(meshes.back(), bc);
        const double h = meshes.back().h_max;
        ModelParams params = ModelParams::make(0.01, 0.17, h, 1.0, 1.0);
        TimeSteppingConfig cfg;
        cfg.dt = 0.01;
        FlowState st;
        st.u = interpolate(s, [](const Vec2& x) { return Vec2{x.y, 0.0}; });
        st.p = Eigen::VectorXd::Zero(s.n_pres);
        Eigen::VectorXd u0 = st.u;
        Stepper stepper(s, params, cfg);
        for (int k = 0; k < 20; ++k) stepper.step(st);
        c.measured = std::sqrt(integral_l2_sq(s, st.u - u0));
        c.pass = c.measured <= c.tolerance;
        checks.push_back(c);

        const double eps = dissipation_rate(s, st, params);
        const double expect = params.nu + params.cs_delta_sq();
        couette_ceps = std::abs(eps - expect) / expect;
        checks.push_back({"couette-dissipation", couette_ceps <= 1e-8, couette_ceps, 1e-8});
    }

    {
        Check ce{"energy-identity", false, 0.0, 1e-10};
        Check cd{"divergence-residual", false, 0.0, 1e-10};
        ChannelSpec spec;
        spec.nx = 8;
        spec.ny = 8;
        meshes.push_back(build_channel_mesh(spec));
        DirichletSpec bc;
        auto zero = [](const Vec2&) { return Vec2{0.0, 0.0}; };
        bc[BoundaryMarker::TopWall] = zero;
        bc[BoundaryMarker::BottomWall] = zero;
        bc[BoundaryMarker::PeriodicLeft] = zero;
        bc[BoundaryMarker::PeriodicRight] = zero;
        MixedSpace s = MixedSpace::build(meshes.back(), bc);
        ModelParams params = ModelParams::make(0.05, 0.17, meshes.back().h_max, 1.0, 1.0);
        TimeSteppingConfig cfg;
        cfg.dt = 0.02;
        std::mt19937_64 rng(seed + 1);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::VectorXd red(s.n_vel_reduced);
        for (int i = 0; i < s.n_vel_reduced; ++i) red[i] = dist(rng);
        FlowState st;
        st.u = s.expand_velocity(red);
        st.p = Eigen::VectorXd::Zero(s.n_pres);
        Stepper stepper(s, params, cfg);
        for (int k = 0; k < 20; ++k) {
            StepResult r = stepper.step(st);
            ce.measured = std::max(ce.measured, r.energy_residual);
            cd.measured = std::max(cd.measured, r.div_residual);
        }
        ce.pass = ce.measured <= ce.tolerance;
        cd.pass = cd.measured <= cd.tolerance;
        checks.push_back(ce);
        checks.push_back(cd);
    }

    {
        Check c{"poincare-strip", false, 0.0, 1.0};
        ChannelSpec spec;
        spec.nx = 12;
        spec.ny = 12;
        spec.align_strip = 0.1;
        meshes.push_back(build_channel_mesh(spec));
        MixedSpace s = MixedSpace::build(meshes.back());
        c.measured = poincare_strip_check(s, 0.1, 100, seed + 2).max_ratio;
        c.pass = c.measured <= c.tolerance;
        checks.push_back(c);
    }

    json report;
    report["seed"] = seed;
    bool all = true;
    json items = json::array();
    for (const auto& c : checks) {
        items.push_back(
            {{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}, {"tolerance", c.tolerance}});
        std::printf("%-22s %s   measured %.3e   tolerance %.0e\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.measured, c.tolerance);
        all = all && c.pass;
    }
    report["checks"] = items;
    report["all_pass"] = all;
    fs::create_directories(out_dir);
    write_text(out_dir / "verify.json", report.dump(2) + "\n");
    return all ? 0 : 1;
}

// -------- bounds --------

int cmd_bounds(const BoundInputs& in, bool sweep, const fs::path& out_dir) {
    std::cout << bound_report_json(in).dump(2) << "\n";
    if (!sweep) return 0;
    fs::create_directories(out_dir);

    std::vector<double> re_grid, h_grid;
    for (int k = 0; k < 25; ++k) re_grid.push_back(std::pow(10.0, 2.0 + 4.0 * k / 24.0));
    for (int k = 0; k < 25; ++k)
        h_grid.push_back(std::pow(10.0, -3.0 + (std::log10(0.5) + 3.0) * k / 24.0));

    DeltaRule rule;  // delta = h
    auto rows = summary_surface(re_grid, h_grid, rule, in.cs, in.L, in.U, in.C);
    {
        std::ofstream csv(out_dir / "surface.csv");
        write_surface_csv(csv, rows);
        write_text(out_dir / "surface.gp", surface_gnuplot_block("surface.csv"));
    }

    std::vector<double> ratio_grid;
    for (int k = 0; k < 100; ++k)
        ratio_grid.push_back(std::pow(10.0, -3.0 + 3.0 * k / 99.0));
    ZetaCurves z = zeta_curves(in.re, in.L, ratio_grid);
    {
        std::ofstream csv(out_dir / "zeta.csv");
        write_zeta_csv(csv, z);
        write_text(out_dir / "zeta.gp", zeta_gnuplot_block("zeta.csv"));
    }

    {
        std::string csv =
            "re,h_over_L,cs_min,f_min,cs_delta_min,g_min,band_lo,band_hi,exceeds_band\n";
        for (double re : {1e2, 1e3, 1e4, 1e5, 1e6}) {
            for (double r : {1e-3, 1e-2, 1e-1, 0.5 - 1e-9}) {
                MinimizerResult f = minimize_cor1(re, r);
                MinimizerResult g = minimize_cor2(re, r * in.L, in.L);
                csv += fmt(re) + "," + fmt(r) + "," + fmt(f.argmin) + "," + fmt(f.min_value) +
                       "," + fmt(g.argmin) + "," + fmt(g.min_value) + "," + fmt(1.0 / re) +
                       ",0.1," + (g.min_value > 0.1 ? "true" : "false") + "\n";
            }
        }
        write_text(out_dir / "minimizers.csv", csv);
    }
    std::cout << "sweep artifacts written to " << out_dir.string() << "\n";
    return 0;
}

// -------- compare --------

double std_dev_after(const DissipationSeries& s, double t0) {
    double sum = 0.0;
    long n = 0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        if (s.times[i] >= t0 - 1e-12) {
            sum += s.ke[i];
            ++n;
        }
    if (n < 2) throw precondition_error("not enough samples after the burn-in window");
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i)
        if (s.times[i] >= t0 - 1e-12) var += (s.ke[i] - mean) * (s.ke[i] - mean);
    return std::sqrt(var / n);
}

int cmd_compare(const ExperimentConfig& nse, const ExperimentConfig& sm, const fs::path& out_dir,
                double threshold) {
    if (nse.dt != sm.dt || nse.t_final != sm.t_final || nse.output_every != sm.output_every) {
        std::cerr << "mismatched horizons: dt, t_final, output_every must agree\n";
        return kExitConfig;
    }
    fs::create_directories(out_dir);
    RunArtifacts a = run_experiment(nse, out_dir / "nse");
    RunArtifacts b = run_experiment(sm, out_dir / "sm");
    if (!a.result.completed || !b.result.completed) {
        std::cerr << "a run failed; see per-run summaries\n";
        return kExitSolver;
    }

    const DissipationSeries& sa = a.result.series;
    const DissipationSeries& sb = b.result.series;
    const double t_half = nse.t_final / 2.0;
    const double sd_nse = std_dev_after(sa, t_half);
    const double sd_sm = std_dev_after(sb, t_half);
    const double ratio = sd_nse > 0.0 ? sd_sm / sd_nse
                                      : std::numeric_limits<double>::infinity();

    std::string csv = "t,eps_nse,ke_nse,eps_sm,ke_sm\n";
    const std::size_t n = std::min(sa.times.size(), sb.times.size());
    for (std::size_t i = 0; i < n; ++i)
        csv += fmt(sa.times[i]) + "," + fmt(sa.eps[i]) + "," + fmt(sa.ke[i]) + "," +
               fmt(sb.eps[i]) + "," + fmt(sb.ke[i]) + "\n";
    write_text(out_dir / "compare.csv", csv);
    {
        std::string gp;
        gp += "set datafile separator ','\n";
        gp += "set key autotitle columnhead\n";
        gp += "set xlabel 't'\n";
        gp += "plot 'compare.csv' using 1:3 with lines, '' using 1:5 with lines\n";
        write_text(out_dir / "compare.gp", gp);
    }

    json j;
    j["window"] = {t_half, nse.t_final};
    j["std_ke_nse"] = sd_nse;
    j["std_ke_sm"] = sd_sm;
    j["ratio"] = ratio;
    j["threshold"] = threshold;
    j["laminarized"] = ratio <= threshold;
    j["mean_c_eps_nse"] = sa.c_eps;
    j["mean_c_eps_sm"] = sb.c_eps;
    write_text(out_dir / "compare.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_mesh(const ExperimentConfig* cfg, const std::string& msh_path, const fs::path& out_dir) {
    Mesh mesh;
    if (!msh_path.empty())
        mesh = import_msh(msh_path);
    else if (cfg)
        mesh = make_mesh(*cfg);
    else {
        std::cerr << "mesh: provide --config or --msh\n";
        return kExitConfig;
    }
    fs::create_directories(out_dir);
    write_vtk_mesh((out_dir / "mesh.vtk").string(), mesh);
    std::cout << mesh_stats_json(mesh).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-element dissipation laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_override, msh_path, nse_path, sm_path;
    std::uint64_t seed_override = 0;
    bool sequential = false;
    double threshold = 0.1;
    bool sweep = false;
    BoundInputs bin;
    bin.re = 1000.0;
    bin.h = 0.05;
    bin.cs = 0.17;
    bin.delta = 0.05;

    app.add_option("--config", config_path, "experiment config file")->envname("LESLAB_CONFIG");
    app.add_option("--out", out_override, "output directory override");
    auto* seed_opt = app.add_option("--seed", seed_override, "RNG seed override");
    app.add_flag("--sequential", sequential, "force serial assembly kernels");

    CLI::App* run = app.add_subcommand("run", "run one configured experiment");
    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    CLI::App* bounds = app.add_subcommand("bounds", "evaluate the closed-form estimates");
    bounds->set_help_flag("--help", "print help");  // frees -h for the mesh size
    bounds->add_option("--re", bin.re, "Reynolds number");
    bounds->add_option("--h", bin.h, "mesh size");
    bounds->add_option("--cs", bin.cs, "Smagorinsky constant");
    bounds->add_option("--delta", bin.delta, "filter length");
    bounds->add_option("--L", bin.L, "length scale");
    bounds->add_option("--U", bin.U, "speed scale");
    bounds->add_option("--C", bin.C, "generic prefactor");
    bounds->add_flag("--sweep", sweep, "emit surface/level-set/minimizer tables");
    CLI::App* compare = app.add_subcommand("compare", "NSE vs Smagorinsky laminarization study");
    compare->add_option("--nse", nse_path, "plain NSE config")->required();
    compare->add_option("--sm", sm_path, "Smagorinsky config")->required();
    compare->add_option("--threshold", threshold, "std(ke) ratio verdict threshold");
    CLI::App* meshcmd = app.add_subcommand("mesh", "generate or inspect a mesh");
    meshcmd->add_option("--msh", msh_path, "import a Gmsh 2.2 ASCII file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (sequential) exec::set_default_mode(ExecMode::Serial);

    try {
        ExperimentConfig cfg;
        bool have_cfg = false;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            have_cfg = true;
            if (seed_opt->count()) cfg.seed = seed_override;
        }
        const fs::path out_dir =
            !out_override.empty() ? fs::path(out_override)
                                  : fs::path(have_cfg ? cfg.out_dir : std::string("out"));

        if (run->parsed()) {
            if (!have_cfg) {
                std::cerr << "run: --config is required\n";
                return kExitConfig;
            }
            return cmd_run(cfg, out_dir);
        }
        if (verify->parsed()) {
            const std::uint64_t seed =
                seed_opt->count() ? seed_override : (have_cfg ? cfg.seed : 1);
            return cmd_verify(out_dir, seed);
        }
        if (bounds->parsed()) return cmd_bounds(bin, sweep, out_dir);
        if (compare->parsed()) {
            ExperimentConfig nse = load_config(nse_path);
            ExperimentConfig sm = load_config(sm_path);
            if (seed_opt->count()) {
                nse.seed = seed_override;
                sm.seed = seed_override;
            }
            return cmd_compare(nse, sm, out_dir, threshold);
        }
        if (meshcmd->parsed()) return cmd_mesh(have_cfg ? &cfg : nullptr, msh_path, out_dir);
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return 0;
}
