#include "tikflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "tikflow/errors.hpp"

namespace tikflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "problem.name",      "problem.A_diag",      "problem.b",
        "problem.a",         "problem.c",           "schedule.family",
        "schedule.delta",    "schedule.r",          "schedule.c",
        "schedule.t_ref",    "dynamics.kind",       "dynamics.alpha",
        "dynamics.beta",     "dynamics.delta_visc", "dynamics.t0",
        "dynamics.x0",       "dynamics.v0",         "integrator.method",
        "integrator.rel_tol","integrator.abs_tol",  "integrator.t_end",
        "integrator.samples","integrator.max_steps","integrator.fixed_step",
        "integrator.prox_step_fraction",            "output_path",
        "seed",
    };
    return keys;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw validation_error("config: empty key");
    kv_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double RunConfig::get_real(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw validation_error("config: '" + key + "' is not a real number");
    }
}

long RunConfig::get_int(const std::string& key, long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw validation_error("config: '" + key + "' is not an integer");
    }
}

std::optional<Vec> RunConfig::get_vec(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return parse_reals(it->second);
}

void RunConfig::validate_keys() const {
    for (const auto& [k, v] : kv_) {
        if (!known_keys().count(k)) throw validation_error("config: unknown key '" + k + "'");
    }
}

Vec parse_reals(const std::string& csv) {
    Vec out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw validation_error("config: empty entry in real list");
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw validation_error("config: '" + tok + "' is not a real number");
        }
    }
    if (out.empty()) throw validation_error("config: empty real list");
    return out;
}

ObjectiveProblem problem_from_config(const RunConfig& cfg) {
    const std::string name = cfg.get_string("problem.name", "f2");
    if (name == "f1") return problems::f1();
    if (name == "f2") return problems::f2();
    if (name == "quadratic") {
        const auto a = cfg.get_vec("problem.A_diag");
        const auto b = cfg.get_vec("problem.b");
        if (!a || !b)
            throw validation_error("config: quadratic requires problem.A_diag and problem.b");
        return problems::quadratic(*a, *b);
    }
    if (name == "abs_affine") {
        const auto a = cfg.get_vec("problem.a");
        if (!a) throw validation_error("config: abs_affine requires problem.a");
        return problems::abs_affine(*a, cfg.get_real("problem.c", 0.0));
    }
    throw validation_error("config: unknown problem '" + name + "'");
}

TikhonovSchedule schedule_from_config(const RunConfig& cfg, double default_t_ref) {
    const std::string family = cfg.get_string("schedule.family", "delta_over_t");
    const double t_ref = cfg.get_real("schedule.t_ref", default_t_ref);
    if (family == "delta_over_t")
        return TikhonovSchedule::delta_over_t(cfg.get_real("schedule.delta", 2.0), t_ref);
    if (family == "inverse_power")
        return TikhonovSchedule::inverse_power(cfg.get_real("schedule.r", 0.5), t_ref);
    if (family == "constant")
        return TikhonovSchedule::constant(cfg.get_real("schedule.c", 1.0), t_ref);
    if (family == "zero") return TikhonovSchedule::zero(t_ref);
    throw validation_error("config: unknown schedule family '" + family + "'");
}

namespace {

DynamicsKind kind_from_string(const std::string& s) {
    if (s == "sd_tikhonov") return DynamicsKind::SdTikhonov;
    if (s == "rescaled_first_order") return DynamicsKind::RescaledFirstOrder;
    if (s == "inertial_implicit_hessian") return DynamicsKind::InertialImplicitHessian;
    if (s == "inertial_explicit_hessian") return DynamicsKind::InertialExplicitHessian;
    if (s == "avd_baseline") return DynamicsKind::AvdBaseline;
    if (s == "coupled_vx") return DynamicsKind::CoupledVX;
    if (s == "coupled_vx_nonsmooth") return DynamicsKind::CoupledVXNonsmooth;
    throw validation_error("config: unknown dynamics kind '" + s + "'");
}

Vec initial_point(const RunConfig& cfg, const std::string& key, int dim) {
    const std::string raw = cfg.get_string(key, "");
    if (raw.empty()) return zeros(dim);
    if (raw == "random") {
        std::mt19937_64 rng(static_cast<unsigned long>(cfg.get_int("seed", 0)));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Vec x(dim);
        for (double& v : x) v = u(rng);
        return x;
    }
    Vec x = parse_reals(raw);
    if (static_cast<int>(x.size()) != dim)
        throw validation_error("config: " + key + " has wrong dimension");
    return x;
}

}  // namespace

DynamicsSpec dynamics_from_config(const RunConfig& cfg) {
    cfg.validate_keys();
    ObjectiveProblem problem = problem_from_config(cfg);
    const double t0 = cfg.get_real("dynamics.t0", 1.0);
    TikhonovSchedule schedule = schedule_from_config(cfg, t0);

    DynamicsSpec spec{.kind = kind_from_string(cfg.get_string("dynamics.kind", "sd_tikhonov")),
                      .problem = std::move(problem),
                      .schedule = schedule,
                      .alpha = cfg.get_real("dynamics.alpha", 3.5),
                      .beta = cfg.get_real("dynamics.beta", 1.0),
                      .delta_visc = cfg.get_real("dynamics.delta_visc", 3.0),
                      .t0 = t0,
                      .x0 = {},
                      .v0 = std::nullopt};
    spec.x0 = initial_point(cfg, "dynamics.x0", spec.problem.dim());
    if (cfg.has("dynamics.v0")) spec.v0 = initial_point(cfg, "dynamics.v0", spec.problem.dim());
    spec.validate();
    return spec;
}

IntegratorConfig integrator_from_config(const RunConfig& cfg, const DynamicsSpec& spec) {
    IntegratorConfig ic;
    const std::string method = cfg.get_string(
        "integrator.method",
        spec.kind == DynamicsKind::CoupledVXNonsmooth ? "proximal_semi_implicit" : "adaptive_rk");
    if (method == "adaptive_rk")
        ic.method = IntegratorMethod::AdaptiveRK;
    else if (method == "fixed_rk4")
        ic.method = IntegratorMethod::FixedRK4;
    else if (method == "proximal_semi_implicit")
        ic.method = IntegratorMethod::ProximalSemiImplicit;
    else
        throw validation_error("config: unknown integrator method '" + method + "'");
    ic.rel_tol = cfg.get_real("integrator.rel_tol", ic.rel_tol);
    ic.abs_tol = cfg.get_real("integrator.abs_tol", ic.abs_tol);
    ic.t_end = cfg.get_real("integrator.t_end", 0.0);
    ic.samples = static_cast<int>(cfg.get_int("integrator.samples", ic.samples));
    ic.max_steps = cfg.get_int("integrator.max_steps", ic.max_steps);
    ic.fixed_step = cfg.get_real("integrator.fixed_step", ic.fixed_step);
    ic.prox_step_fraction =
        cfg.get_real("integrator.prox_step_fraction", ic.prox_step_fraction);
    ic.validate();
    return ic;
}

}  // namespace tikflow
