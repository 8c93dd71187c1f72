#pragma once

#include <string>
#include <vector>

#include "tikflow/dynamics.hpp"
#include "tikflow/vec.hpp"

namespace tikflow {

enum class IntegratorMethod { AdaptiveRK, FixedRK4, ProximalSemiImplicit };

std::string to_string(IntegratorMethod m);

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::AdaptiveRK;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    long max_steps = 20'000'000;
    /// Horizon. 0 selects the default 1e3*t0 (1e2*t0 for nonsmooth runs).
    double t_end = 0.0;
    /// Number of log-spaced sample times, including both endpoints.
    int samples = 400;
    /// Step size of FixedRK4.
    double fixed_step = 1e-3;
    /// ProximalSemiImplicit step is min(prox_step_fraction*t, h_max(t)).
    double prox_step_fraction = 0.01;

    void validate() const;
    double horizon(const DynamicsSpec& spec) const;
};

/// Log-spaced grid t0 = s_1 < ... < s_n = t1.
std::vector<double> log_grid(double t0, double t1, int n);

/// Sampled trajectory with per-sample diagnostics. `states` holds the
/// observed variable: x(t) for every kind except RescaledFirstOrder, where
/// it holds v(t). `companions` holds xdot for the second-order systems and
/// the companion v for the coupled ones. `derivatives` holds d/dt of
/// `states` where the integrator provides it.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> companions;
    std::vector<Vec> derivatives;

    std::vector<double> f_gap;
    std::vector<double> grad_norm;      // NaN for nonsmooth problems
    std::vector<double> dist_min_norm;  // NaN when x* unknown
    std::vector<double> eps_value;      // Tikhonov coefficient acting at each sample
    std::vector<double> energy;         // NaN until filled by the analysis module

    /// Reference minimum used for f_gap; best sampled value when the true
    /// minimum is unknown (flagged by f_gap_vs_best_seen).
    double min_reference = 0.0;
    bool f_gap_vs_best_seen = false;
    int dim = 0;

    std::size_t size() const { return times.size(); }
};

TrajectoryRecord integrate(const DynamicsSpec& spec, const IntegratorConfig& cfg);

}  // namespace tikflow
