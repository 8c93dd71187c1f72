#include "tikflow/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tikflow/analysis.hpp"
#include "tikflow/config.hpp"
#include "tikflow/csv.hpp"
#include "tikflow/errors.hpp"
#include "tikflow/verify.hpp"

namespace tikflow::cli {

namespace {

struct Override {
    std::string key, value;
};

// Dotted --section.key value pairs are config overrides. They are peeled off
// before CLI11 sees the command line.
std::vector<std::string> extract_overrides(int argc, char** argv, std::vector<Override>& out) {
    std::vector<std::string> rest;
    const auto is_override = [](const std::string& a) {
        if (a.rfind("--", 0) != 0) return false;
        const std::string key = a.substr(2, a.find('=') - 2);
        return key.find('.') != std::string::npos || key == "seed" || key == "output_path";
    };
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (is_override(arg)) {
            std::string key = arg.substr(2);
            std::string value;
            const auto eq = key.find('=');
            if (eq != std::string::npos) {
                value = key.substr(eq + 1);
                key = key.substr(0, eq);
            } else if (i + 1 < argc) {
                value = argv[++i];
            } else {
                throw validation_error("override '" + arg + "' is missing a value");
            }
            out.push_back({key, value});
        } else {
            rest.push_back(arg);
        }
    }
    return rest;
}

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides) {
    RunConfig cfg = path.empty() ? RunConfig() : RunConfig::from_file(path);
    for (const auto& o : overrides) cfg.set(o.key, o.value);
    cfg.validate_keys();
    return cfg;
}

std::string csv_safe(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n') c = ';';
    }
    return s;
}

int thread_budget(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("TIKFLOW_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct RunOutcome {
    double f_gap_slope = std::numeric_limits<double>::quiet_NaN();
    double grad_slope = std::numeric_limits<double>::quiet_NaN();
    double final_dist = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

RunOutcome run_and_fit(const RunConfig& cfg) {
    RunOutcome out;
    const DynamicsSpec spec = dynamics_from_config(cfg);
    const IntegratorConfig ic = integrator_from_config(cfg, spec);
    const TrajectoryRecord rec = integrate(spec, ic);
    const double T = rec.times.back();
    try {
        out.f_gap_slope = fit_rate(rec, Observable::FGap, T / 10.0, T).slope;
    } catch (const numerical_error&) {
    }
    try {
        if (spec.problem.has_gradient())
            out.grad_slope = fit_rate(rec, Observable::GradNorm, T / 10.0, T).slope;
    } catch (const numerical_error&) {
    }
    out.final_dist = rec.dist_min_norm.back();
    return out;
}

int cmd_simulate(const RunConfig& cfg, std::string output) {
    const DynamicsSpec spec = dynamics_from_config(cfg);
    const IntegratorConfig ic = integrator_from_config(cfg, spec);
    TrajectoryRecord rec = integrate(spec, ic);

    try {
        attach_energy(rec, spec.problem);
    } catch (const unsupported_operation&) {
        // no viscosity solve available; E column stays empty
    }

    if (output.empty()) output = cfg.get_string("output_path", "trajectory.csv");
    std::ofstream os(output);
    if (!os) throw validation_error("cannot open output file '" + output + "'");
    write_trajectory_csv(os, rec);

    std::cout << "wrote " << rec.size() << " samples to " << output << "\n";
    if (!spec.theorem_grade())
        std::cout << "note: parameters are outside the theorem-grade range\n";
    const double T = rec.times.back();
    auto print_fit = [&](Observable obs, const char* label) {
        try {
            const RateFit fit = fit_rate(rec, obs, T / 10.0, T);
            std::cout << label << " slope on [" << format_real(T / 10.0) << ", "
                      << format_real(T) << "]: " << fit.slope << " (r^2 " << fit.r_squared
                      << ")\n";
        } catch (const degenerate_data_error& e) {
            std::cout << label << ": " << e.what() << "\n";
        } catch (const numerical_error& e) {
            std::cout << label << ": " << e.what() << "\n";
        }
    };
    print_fit(Observable::FGap, "f_gap");
    if (spec.problem.has_gradient()) print_fit(Observable::GradNorm, "grad_norm");
    if (std::isfinite(rec.dist_min_norm.back()))
        std::cout << "dist_min_norm at T: " << rec.dist_min_norm.back() << "\n";
    return 0;
}

std::string short_param(const std::string& key) {
    if (key == "dynamics.alpha" || key == "alpha") return "alpha";
    if (key == "schedule.delta" || key == "delta") return "delta";
    if (key == "schedule.r" || key == "r") return "r";
    throw validation_error("sweep: can vary one of alpha, delta, r (got '" + key + "')");
}

std::string full_param(const std::string& shortname) {
    if (shortname == "alpha") return "dynamics.alpha";
    if (shortname == "delta") return "schedule.delta";
    return "schedule.r";
}

int cmd_sweep(const RunConfig& base, const std::vector<std::string>& vary, std::string output) {
    if (vary.empty() || vary.size() > 2)
        throw validation_error("sweep: provide one or two --vary key=v1,v2,...");

    std::vector<std::string> names;
    std::vector<std::vector<double>> grids;
    for (const auto& v : vary) {
        const auto eq = v.find('=');
        if (eq == std::string::npos) throw validation_error("sweep: --vary expects key=values");
        names.push_back(short_param(v.substr(0, eq)));
        const std::string vals = v.substr(eq + 1);
        grids.push_back(vals.empty() ? Vec{} : parse_reals(vals));
    }

    struct Row {
        std::vector<double> params;
        RunOutcome outcome;
    };
    std::vector<Row> rows;
    const std::size_t n1 = grids[0].size();
    const std::size_t n2 = grids.size() == 2 ? grids[1].size() : 1;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            Row row;
            row.params.push_back(grids[0][i]);
            if (grids.size() == 2) row.params.push_back(grids[1][j]);
            rows.push_back(std::move(row));
        }
    }

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= rows.size()) return;
            RunConfig cfg = base;
            for (std::size_t p = 0; p < names.size(); ++p)
                cfg.set(full_param(names[p]), format_real(rows[k].params[p]));
            try {
                rows[k].outcome = run_and_fit(cfg);
            } catch (const std::exception& e) {
                rows[k].outcome.error = e.what();
            }
        }
    };
    const int workers = thread_budget(rows.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < workers - 1; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    if (output.empty()) output = base.get_string("output_path", "sweep.csv");
    std::ofstream os(output);
    if (!os) throw validation_error("cannot open output file '" + output + "'");
    for (std::size_t p = 0; p < names.size(); ++p) os << (p ? "," : "") << names[p];
    os << ",f_gap_slope,grad_norm_slope,final_dist,error\n";
    auto put = [&](double v) {
        os << ',';
        if (std::isfinite(v)) os << format_real(v);
    };
    for (const auto& row : rows) {
        for (std::size_t p = 0; p < row.params.size(); ++p)
            os << (p ? "," : "") << format_real(row.params[p]);
        put(row.outcome.f_gap_slope);
        put(row.outcome.grad_slope);
        put(row.outcome.final_dist);
        os << ',' << csv_safe(row.outcome.error) << '\n';
    }
    std::cout << "wrote " << rows.size() << " rows to " << output << "\n";
    return 0;
}

int cmd_viscosity(const RunConfig& cfg, std::string eps_list, std::string eps_grid,
                  std::string output) {
    const ObjectiveProblem p = problem_from_config(cfg);
    Vec eps;
    if (!eps_list.empty()) {
        eps = parse_reals(eps_list);
    } else if (!eps_grid.empty()) {
        std::istringstream ss(eps_grid);
        std::string lo_s, hi_s, n_s;
        if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
            !std::getline(ss, n_s))
            throw validation_error("viscosity: --eps-grid expects lo:hi:n");
        const double lo = std::stod(lo_s), hi = std::stod(hi_s);
        const int n = std::stoi(n_s);
        if (!(lo > 0.0) || !(hi > lo) || n < 2)
            throw validation_error("viscosity: need 0 < lo < hi and n >= 2");
        for (int i = 0; i < n; ++i)
            eps.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    } else {
        throw validation_error("viscosity: provide --eps or --eps-grid");
    }
    std::sort(eps.begin(), eps.end(), std::greater<double>());

    if (output.empty()) output = cfg.get_string("output_path", "viscosity.csv");
    std::ofstream os(output);
    if (!os) throw validation_error("cannot open output file '" + output + "'");
    os << "eps";
    for (int i = 1; i <= p.dim(); ++i) os << ",x_" << i;
    os << ",norm,residual,error\n";

    Vec warm;
    int failures = 0;
    for (double e : eps) {
        os << format_real(e);
        try {
            const ViscosityPoint vp = viscosity_point(p, e, warm.empty() ? nullptr : &warm);
            warm = vp.point;
            for (double x : vp.point) os << ',' << format_real(x);
            os << ',' << format_real(norm(vp.point)) << ',' << format_real(vp.residual) << ",";
        } catch (const std::exception& ex) {
            ++failures;
            for (int i = 0; i < p.dim(); ++i) os << ',';  // empty x columns
            os << ",,," << csv_safe(ex.what());           // empty norm and residual
        }
        os << '\n';
    }
    std::cout << "wrote " << eps.size() << " rows to " << output;
    if (failures) std::cout << " (" << failures << " solver failures)";
    std::cout << "\n";
    return 0;
}

int cmd_verify(bool quick, int criterion) {
    if (criterion < 0 || criterion > 11)
        throw validation_error("verify: --criterion must be in 1..11");
    AcceptanceOptions opt;
    opt.quick = quick;
    opt.only_criterion = criterion;
    if (const char* env = std::getenv("TIKFLOW_VERIFY_TOL_SCALE")) {
        opt.tol_scale = std::strtod(env, nullptr);
        if (!(opt.tol_scale > 0.0))
            throw validation_error("TIKFLOW_VERIFY_TOL_SCALE must be positive");
    }
    const auto results = run_acceptance(opt, &std::cout);
    int passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
    return all_passed(results) ? 0 : 3;
}

}  // namespace

int run(int argc, char** argv) {
    std::vector<Override> overrides;
    std::vector<std::string> args;
    try {
        args = extract_overrides(argc, argv, overrides);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"Numerical laboratory for Tikhonov-regularized gradient flows"};
    app.require_subcommand(1);

    std::string config_path, output, vary_unused;
    std::vector<std::string> vary;
    std::string eps_list, eps_grid;
    bool quick = false;
    int criterion = 0;

    auto* sim = app.add_subcommand("simulate", "Integrate one system and write a trajectory CSV");
    sim->add_option("config", config_path, "flat key = value config file");
    sim->add_option("-o,--output", output, "output CSV path");

    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid and tabulate fitted rates");
    sweep->add_option("config", config_path, "flat key = value config file");
    sweep->add_option("-o,--output", output, "output CSV path");
    sweep->add_option("--vary", vary, "key=v1,v2,... over alpha, delta or r (max twice)")
        ->expected(1, 2);

    auto* visc = app.add_subcommand("viscosity", "Tabulate the viscosity curve x_eps");
    visc->add_option("config", config_path, "flat key = value config file");
    visc->add_option("-o,--output", output, "output CSV path");
    visc->add_option("--eps", eps_list, "comma-separated eps values");
    visc->add_option("--eps-grid", eps_grid, "log grid lo:hi:n");

    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
    verify->add_flag("--quick", quick, "skip the nonsmooth run");
    verify->add_option("--criterion", criterion, "run a single criterion (1-11)");

    std::vector<char*> argv2;
    for (auto& s : args) argv2.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sim->parsed()) return cmd_simulate(load_config(config_path, overrides), output);
        if (sweep->parsed()) return cmd_sweep(load_config(config_path, overrides), vary, output);
        if (visc->parsed())
            return cmd_viscosity(load_config(config_path, overrides), eps_list, eps_grid, output);
        if (verify->parsed()) return cmd_verify(quick, criterion);
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const unsupported_operation& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace tikflow::cli
