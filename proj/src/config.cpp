#include "leslab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "leslab/core.hpp"

namespace leslab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw precondition_error("config line " + std::to_string(line) + ": " + what);
}

double as_double(const std::string& v, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty()) fail(line, "expected a number, got '" + v + "'");
    return x;
}

int as_int(const std::string& v, int line) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty()) fail(line, "expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::uint64_t as_u64(const std::string& v, int line) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        fail(line, "expected an unsigned integer, got '" + v + "'");
    return x;
}

bool as_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(line, "expected true or false, got '" + v + "'");
}

std::string as_string(const std::string& v, int line) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        fail(line, "expected a quoted string, got '" + v + "'");
    const std::string body = v.substr(1, v.size() - 2);
    if (body.find('"') != std::string::npos || body.find('\\') != std::string::npos)
        fail(line, "escapes are not supported in strings");
    return body;
}

// strips a trailing comment, respecting quoted strings
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "domain" && section != "model" && section != "stepping" &&
                section != "outputs")
                fail(line, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");

        if (section.empty()) {
            if (key == "seed") cfg.seed = as_u64(val, line);
            else fail(line, "unknown top-level key '" + key + "'");
        } else if (section == "domain") {
            if (key == "type") cfg.domain = as_string(val, line);
            else if (key == "L") cfg.L = as_double(val, line);
            else if (key == "nx") cfg.nx = as_int(val, line);
            else if (key == "ny") cfg.ny = as_int(val, line);
            else if (key == "align_strip") cfg.align_strip = as_double(val, line);
            else if (key == "outer_radius") cfg.outer_radius = as_double(val, line);
            else if (key == "inner_radius") cfg.inner_radius = as_double(val, line);
            else if (key == "inner_center_x") cfg.inner_center_x = as_double(val, line);
            else if (key == "inner_center_y") cfg.inner_center_y = as_double(val, line);
            else if (key == "m") cfg.m = as_int(val, line);
            else if (key == "n") cfg.n = as_int(val, line);
            else if (key == "refinement") cfg.refinement = as_int(val, line);
            else if (key == "path") cfg.path = as_string(val, line);
            else fail(line, "unknown [domain] key '" + key + "'");
        } else if (section == "model") {
            if (key == "type") cfg.model = as_string(val, line);
            else if (key == "nu") cfg.nu = as_double(val, line);
            else if (key == "re") cfg.re = as_double(val, line);
            else if (key == "cs") cfg.cs = as_double(val, line);
            else if (key == "delta_rule") cfg.delta_rule = as_string(val, line);
            else if (key == "delta_exponent") cfg.delta_exponent = as_double(val, line);
            else if (key == "delta_value") cfg.delta_value = as_double(val, line);
            else if (key == "U") cfg.U = as_double(val, line);
            else if (key == "C") cfg.C = as_double(val, line);
            else fail(line, "unknown [model] key '" + key + "'");
        } else if (section == "stepping") {
            if (key == "dt") cfg.dt = as_double(val, line);
            else if (key == "t_final") cfg.t_final = as_double(val, line);
            else if (key == "picard_tol") cfg.picard_tol = as_double(val, line);
            else if (key == "picard_max") cfg.picard_max = as_int(val, line);
            else if (key == "output_every") cfg.output_every = as_int(val, line);
            else if (key == "burn_in") cfg.burn_in = as_double(val, line);
            else if (key == "checkpoint_every") cfg.checkpoint_every = as_int(val, line);
            else fail(line, "unknown [stepping] key '" + key + "'");
        } else {  // outputs
            if (key == "dir") cfg.out_dir = as_string(val, line);
            else if (key == "vtk_every") cfg.vtk_every = as_int(val, line);
            else if (key == "csv") cfg.write_csv = as_bool(val, line);
            else if (key == "json") cfg.write_json = as_bool(val, line);
            else fail(line, "unknown [outputs] key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void ExperimentConfig::validate() const {
    if (domain != "channel" && domain != "annulus" && domain != "msh")
        throw precondition_error("domain type must be channel, annulus, or msh");
    if (domain == "msh" && path.empty()) throw precondition_error("msh domain needs a path");
    if (model != "nse" && model != "smagorinsky")
        throw precondition_error("model type must be nse or smagorinsky");
    if (delta_rule != "equal-h" && delta_rule != "h-pow" && delta_rule != "fixed")
        throw precondition_error("delta_rule must be equal-h, h-pow, or fixed");
    if (delta_rule == "fixed" && delta_value < 0.0)
        throw precondition_error("fixed delta must be nonnegative");
    const bool has_nu = nu > 0.0, has_re = re > 0.0;
    if (!has_nu && !has_re) throw precondition_error("set one of nu or re");
    if (has_nu && has_re) throw precondition_error("set only one of nu or re");
    if (cs < 0.0) throw precondition_error("cs must be nonnegative");
    if (!(U > 0.0)) throw precondition_error("U must be positive");
    if (!(C > 0.0)) throw precondition_error("C must be positive");
    // stepping ranges are checked again by TimeSteppingConfig::validate
    if (!(dt > 0.0)) throw precondition_error("dt must be positive");
    if (t_final < 0.0) throw precondition_error("t_final must be nonnegative");
    if (checkpoint_every < 0) throw precondition_error("checkpoint_every must be nonnegative");
    if (vtk_every < 0) throw precondition_error("vtk_every must be nonnegative");
}

namespace {

std::string fmt_d(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
    std::string s;
    s += "seed = " + std::to_string(c.seed) + "\n\n";
    s += "[domain]\n";
    s += "type = \"" + c.domain + "\"\n";
    s += "L = " + fmt_d(c.L) + "\n";
    s += "nx = " + std::to_string(c.nx) + "\n";
    s += "ny = " + std::to_string(c.ny) + "\n";
    s += "align_strip = " + fmt_d(c.align_strip) + "\n";
    s += "outer_radius = " + fmt_d(c.outer_radius) + "\n";
    s += "inner_radius = " + fmt_d(c.inner_radius) + "\n";
    s += "inner_center_x = " + fmt_d(c.inner_center_x) + "\n";
    s += "inner_center_y = " + fmt_d(c.inner_center_y) + "\n";
    s += "m = " + std::to_string(c.m) + "\n";
    s += "n = " + std::to_string(c.n) + "\n";
    s += "refinement = " + std::to_string(c.refinement) + "\n";
    if (!c.path.empty()) s += "path = \"" + c.path + "\"\n";
    s += "\n[model]\n";
    s += "type = \"" + c.model + "\"\n";
    if (c.nu > 0.0) s += "nu = " + fmt_d(c.nu) + "\n";
    if (c.re > 0.0) s += "re = " + fmt_d(c.re) + "\n";
    s += "cs = " + fmt_d(c.cs) + "\n";
    s += "delta_rule = \"" + c.delta_rule + "\"\n";
    s += "delta_exponent = " + fmt_d(c.delta_exponent) + "\n";
    s += "delta_value = " + fmt_d(c.delta_value) + "\n";
    s += "U = " + fmt_d(c.U) + "\n";
    s += "C = " + fmt_d(c.C) + "\n";
    s += "\n[stepping]\n";
    s += "dt = " + fmt_d(c.dt) + "\n";
    s += "t_final = " + fmt_d(c.t_final) + "\n";
    s += "picard_tol = " + fmt_d(c.picard_tol) + "\n";
    s += "picard_max = " + std::to_string(c.picard_max) + "\n";
    s += "output_every = " + std::to_string(c.output_every) + "\n";
    s += "burn_in = " + fmt_d(c.burn_in) + "\n";
    s += "checkpoint_every = " + std::to_string(c.checkpoint_every) + "\n";
    s += "\n[outputs]\n";
    s += "dir = \"" + c.out_dir + "\"\n";
    s += "vtk_every = " + std::to_string(c.vtk_every) + "\n";
    s += std::string("csv = ") + (c.write_csv ? "true" : "false") + "\n";
    s += std::string("json = ") + (c.write_json ? "true" : "false") + "\n";
    return s;
}

Mesh make_mesh(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.domain == "channel") {
        ChannelSpec spec;
        spec.L = cfg.L;
        spec.nx = cfg.nx;
        spec.ny = cfg.ny;
        spec.align_strip = cfg.align_strip;
        return build_channel_mesh(spec);
    }
    if (cfg.domain == "annulus") {
        AnnulusSpec spec;
        spec.outer_radius = cfg.outer_radius;
        spec.inner_radius = cfg.inner_radius;
        spec.inner_center = {cfg.inner_center_x, cfg.inner_center_y};
        spec.m = cfg.m;
        spec.n = cfg.n;
        return build_annulus_mesh(spec, cfg.refinement);
    }
    return import_msh(cfg.path);
}

ModelParams make_params(const ExperimentConfig& cfg, double h_mesh) {
    cfg.validate();
    if (!(h_mesh > 0.0)) throw precondition_error("mesh size must be positive");
    const double L = cfg.domain == "annulus" ? cfg.outer_radius : cfg.L;
    const double nu = cfg.nu > 0.0 ? cfg.nu : cfg.U * L / cfg.re;
    double cs = cfg.model == "nse" ? 0.0 : cfg.cs;
    double delta = 0.0;
    if (cfg.delta_rule == "equal-h") delta = h_mesh;
    else if (cfg.delta_rule == "h-pow") delta = std::pow(h_mesh, cfg.delta_exponent);
    else delta = cfg.delta_value;
    return ModelParams::make(nu, cs, delta, cfg.U, L);
}

TimeSteppingConfig make_stepping(const ExperimentConfig& cfg) {
    cfg.validate();
    TimeSteppingConfig ts;
    ts.dt = cfg.dt;
    ts.t_final = cfg.t_final;
    ts.picard_tol = cfg.picard_tol;
    ts.picard_max = cfg.picard_max;
    ts.output_every = cfg.output_every;
    ts.validate();
    return ts;
}

}  // namespace leslab
