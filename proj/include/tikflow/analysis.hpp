#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tikflow/integrate.hpp"
#include "tikflow/problem.hpp"
#include "tikflow/schedule.hpp"

namespace tikflow {

/// Minimizer of f + (eps/2)||.||^2 with its optimality residual.
struct ViscosityPoint {
    double eps = 0.0;
    Vec point;
    double residual = 0.0;
};

/// Computes x_eps, warm-started from `warm` when given. Smooth problems are
/// solved by Newton on the strongly convex objective; otherwise x_eps is
/// prox_{f/eps}(0).
ViscosityPoint viscosity_point(const ObjectiveProblem& p, double eps,
                               const Vec* warm = nullptr);

/// Anchored energy E(t) = [phi_t(x) - phi_t(x_eps)] + (eps/2)||x - x_eps||^2
/// with phi_t = f + (eps(t)/2)||.||^2.
double lyapunov_energy(const ObjectiveProblem& p, const TikhonovSchedule& schedule, double t,
                       const Vec& x);

/// Fills record.energy along the samples using the record's effective
/// eps column, warm-starting the viscosity solves. Samples with eps = 0
/// keep NaN.
void attach_energy(TrajectoryRecord& record, const ObjectiveProblem& p);

/// Averaged trajectory x(t) = (t0/t)^{a-1} v(t0)
///                          + ((a-1)/t^{a-1}) int_{t0}^t th^{a-2} v(th) dth,
/// evaluated on the sample grid of v_record by Gauss-Legendre quadrature of
/// the Hermite reconstruction of v. The total measure mass is checked to
/// 1e-10 at every output time.
TrajectoryRecord average_trajectory(const TrajectoryRecord& v_record,
                                    const ObjectiveProblem& p, double alpha, double t0);

/// int (f(v) - min f) dmu_t  -  (f(x(t)) - min f); nonnegative for convex f
/// up to quadrature error.
double jensen_gap(const TrajectoryRecord& v_record, const ObjectiveProblem& p, double alpha,
                  double t);

enum class Observable { FGap, GradNorm, DistMinNorm, EnergyE };

std::string to_string(Observable o);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    double r_squared = 0.0;
    int n_samples = 0;
};

/// Least-squares line through (log t, log y) over [t_lo, t_hi].
RateFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values,
                      double t_lo, double t_hi, int min_samples = 20);

RateFit fit_rate(const TrajectoryRecord& record, Observable obs, double t_lo, double t_hi);

/// Checks the integrated energy bound
///   E(t) <= gamma(t1) E(t1)/gamma(t) - (||x*||^2/gamma(t)) int_{t1}^t
///           epsdot gamma ds
/// with t1 the first sample, plus the pointwise bound
///   ||x - x_eps||^2 <= E(t)/eps(t),
/// both with 1e-6 relative slack. gamma is carried in log space; the
/// integral uses the closed forms of the delta/t and constant families and
/// adaptive quadrature otherwise.
struct LyapunovBoundReport {
    int samples_checked = 0;
    int energy_bound_violations = 0;
    int distance_bound_violations = 0;
    double max_relative_excess = 0.0;
    double first_violation_time = 0.0;
    bool pass() const { return energy_bound_violations == 0 && distance_bound_violations == 0; }
};

LyapunovBoundReport check_lyapunov_bound(const TrajectoryRecord& record,
                                         const TikhonovSchedule& schedule,
                                         const ObjectiveProblem& p);

/// Integrates the second-order system, the coupled (v,x) system, and the
/// averaging reconstruction from the rescaled first-order flow, then compares
/// the three x-paths on the sample grid.
struct EquivalenceReport {
    double max_discrepancy = 0.0;
    double tolerance = 0.0;  // 50 rel_tol (1 + max||x||)
    double first_divergence_time = 0.0;
    bool pass() const { return max_discrepancy <= tolerance; }
};

EquivalenceReport equivalence_check(const DynamicsSpec& second_order,
                                    const DynamicsSpec& coupled, const IntegratorConfig& cfg);

}  // namespace tikflow
