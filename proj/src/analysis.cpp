#include "tikflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tikflow/errors.hpp"
#include "tikflow/linalg.hpp"
#include "tikflow/quadrature.hpp"

namespace tikflow {

namespace {

double regularized_value(const ObjectiveProblem& p, double eps, const Vec& x) {
    return p.value(x) + 0.5 * eps * dot(x, x);
}

Vec newton_viscosity(const ObjectiveProblem& p, double eps, Vec start) {
    const int d = p.dim();
    if (!p.in_domain(start)) start = zeros(d);
    Vec x = std::move(start);
    for (int it = 0; it < 200; ++it) {
        Vec g = p.gradient(x);
        axpy(g, eps, x);
        if (norm(g) <= 1e-11) return x;

        SymMatrix h(d);
        Vec e(d, 0.0);
        for (int j = 0; j < d; ++j) {
            e[j] = 1.0;
            const Vec col = p.hess_vec(x, e);
            for (int i = 0; i < d; ++i) h(i, j) = col[i];
            e[j] = 0.0;
        }
        h.add_diagonal(eps);
        Vec step = cholesky_solve(std::move(h), -1.0 * g);

        if (norm(g) <= 1e-6) {  // quadratic zone; line search would stall on roundoff
            Vec trial = x;
            axpy(trial, 1.0, step);
            if (p.in_domain(trial)) {
                x = std::move(trial);
                continue;
            }
        }
        const double phi0 = regularized_value(p, eps, x);
        const double slope = dot(g, step);
        double s = 1.0;
        Vec trial;
        for (int ls = 0; ls < 60; ++ls) {
            trial = x;
            axpy(trial, s, step);
            if (p.in_domain(trial) &&
                regularized_value(p, eps, trial) <= phi0 + 1e-4 * s * slope)
                break;
            s *= 0.5;
        }
        x = std::move(trial);
    }
    Vec g = p.gradient(x);
    axpy(g, eps, x);
    if (norm(g) <= 1e-8) return x;
    throw convergence_failure("viscosity point: Newton budget exhausted");
}

}  // namespace

ViscosityPoint viscosity_point(const ObjectiveProblem& p, double eps, const Vec* warm) {
    if (!(eps > 0.0)) throw std::domain_error("viscosity_point: eps must be positive");
    ViscosityPoint out;
    out.eps = eps;
    if (p.has_gradient() && p.has_hess_vec()) {
        out.point = newton_viscosity(p, eps, warm ? *warm : zeros(p.dim()));
        Vec g = p.gradient(out.point);
        axpy(g, eps, out.point);
        out.residual = norm(g);
    } else if (p.has_prox()) {
        out.point = p.prox(1.0 / eps, zeros(p.dim()));
        if (p.has_gradient()) {
            Vec g = p.gradient(out.point);
            axpy(g, eps, out.point);
            out.residual = norm(g);
        } else {
            // prox fixed-point residual at step 1/(2 eps)
            const double s = 0.5 / eps;
            Vec z = out.point;
            z *= (1.0 - s * eps);
            const Vec back = p.prox(s, z);
            out.residual = dist(out.point, back) / s;
        }
    } else {
        throw unsupported_operation("viscosity_point: need hess_vec or prox");
    }
    if (!(out.residual <= 1e-8))
        throw convergence_failure("viscosity point: residual above 1e-8");
    return out;
}

double lyapunov_energy(const ObjectiveProblem& p, const TikhonovSchedule& schedule, double t,
                       const Vec& x) {
    const double eps = schedule.epsilon(t);
    if (!(eps > 0.0)) throw std::domain_error("lyapunov_energy: requires eps(t) > 0");
    const ViscosityPoint vp = viscosity_point(p, eps, &x);
    const double gap = regularized_value(p, eps, x) - regularized_value(p, eps, vp.point);
    const double d = dist(x, vp.point);
    return gap + 0.5 * eps * d * d;
}

void attach_energy(TrajectoryRecord& record, const ObjectiveProblem& p) {
    Vec warm;
    for (std::size_t k = 0; k < record.size(); ++k) {
        const double eps = record.eps_value[k];
        if (!(eps > 0.0)) continue;
        const ViscosityPoint vp =
            viscosity_point(p, eps, warm.empty() ? nullptr : &warm);
        warm = vp.point;
        const double gap = regularized_value(p, eps, record.states[k]) -
                           regularized_value(p, eps, vp.point);
        const double d = dist(record.states[k], vp.point);
        record.energy[k] = gap + 0.5 * eps * d * d;
    }
}

namespace {

// per-interval cubic (Hermite when derivatives are present, else linear),
// evaluated at the 5-point Gauss-Legendre nodes of [a, b]
struct IntervalInterp {
    double a, b;
    const Vec *ya, *yb, *da, *db;

    Vec eval(double theta) const {
        const double h = b - a;
        const double s = (theta - a) / h;
        const std::size_t n = ya->size();
        Vec out(n);
        if (da && db) {
            const double s2 = s * s, s3 = s2 * s;
            const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
            const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
            for (std::size_t i = 0; i < n; ++i)
                out[i] = h00 * (*ya)[i] + h10 * h * (*da)[i] + h01 * (*yb)[i] +
                         h11 * h * (*db)[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - s) * (*ya)[i] + s * (*yb)[i];
        }
        return out;
    }
};

}  // namespace

TrajectoryRecord average_trajectory(const TrajectoryRecord& v_record, const ObjectiveProblem& p,
                                    double alpha, double t0) {
    if (!(alpha > 1.0)) throw validation_error("average_trajectory: alpha must exceed 1");
    const std::size_t n = v_record.size();
    if (n < 2) throw insufficient_samples_error("average_trajectory: need at least 2 samples");
    if (std::abs(v_record.times.front() - t0) > 1e-12 * t0)
        throw validation_error("average_trajectory: record must start at t0");

    const double am = alpha - 1.0;
    const std::size_t d = v_record.states.front().size();
    const bool hermite = v_record.derivatives.size() == n;

    std::vector<Vec> avg(n);
    avg[0] = v_record.states[0];

    Vec integral(d, 0.0);   // int th^{alpha-2} v(th) dth
    double mass_int = 0.0;  // int th^{alpha-2} dth (same rule, mass check)
    for (std::size_t k = 1; k < n; ++k) {
        const double a = v_record.times[k - 1], b = v_record.times[k];
        IntervalInterp interp{a, b, &v_record.states[k - 1], &v_record.states[k],
                              hermite ? &v_record.derivatives[k - 1] : nullptr,
                              hermite ? &v_record.derivatives[k] : nullptr};
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < 5; ++q) {
            const double th = mid + half * GaussLegendre5::nodes[q];
            const double w = half * GaussLegendre5::weights[q] * std::pow(th, alpha - 2.0);
            axpy(integral, w, interp.eval(th));
            mass_int += w;
        }
        const double t = b;
        const double atom = std::pow(t0 / t, am);
        const double mass = atom + am / std::pow(t, am) * mass_int;
        if (std::abs(mass - 1.0) > 1e-10)
            throw insufficient_samples_error(
                "average_trajectory: measure mass deviates from 1 beyond 1e-10");
        Vec x = atom * v_record.states[0];
        axpy(x, am / std::pow(t, am), integral);
        avg[k] = std::move(x);
    }

    TrajectoryRecord out;
    out.dim = static_cast<int>(d);
    out.times = v_record.times;
    out.states = std::move(avg);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.f_gap.resize(n);
    out.grad_norm.assign(n, nan);
    out.dist_min_norm.assign(n, nan);
    out.eps_value = v_record.eps_value;
    out.energy.assign(n, nan);
    std::vector<double> fvals(n);
    for (std::size_t k = 0; k < n; ++k) fvals[k] = p.value(out.states[k]);
    if (p.min_value()) {
        out.min_reference = *p.min_value();
    } else {
        out.min_reference = *std::min_element(fvals.begin(), fvals.end());
        out.f_gap_vs_best_seen = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        out.f_gap[k] = fvals[k] - out.min_reference;
        if (p.has_gradient()) out.grad_norm[k] = norm(p.gradient(out.states[k]));
        if (p.min_norm_solution())
            out.dist_min_norm[k] = dist(out.states[k], *p.min_norm_solution());
    }
    return out;
}

double jensen_gap(const TrajectoryRecord& v_record, const ObjectiveProblem& p, double alpha,
                  double t) {
    const std::size_t n = v_record.size();
    if (n < 2) throw insufficient_samples_error("jensen_gap: need at least 2 samples");
    const double t0 = v_record.times.front();
    if (t < t0 * (1.0 + 1e-12) || t > v_record.times.back() * (1.0 + 1e-12))
        throw validation_error("jensen_gap: t outside the sampled window");

    const double am = alpha - 1.0;
    const double minf = p.min_value() ? *p.min_value() : v_record.min_reference;

    // mu_t-average of the scalar f(v(th)) - min f, piecewise linear in th;
    // the last interval may be cut at t
    double integral = 0.0;
    std::size_t k = 1;
    for (; k < n; ++k) {
        const double lo = v_record.times[k - 1];
        if (lo >= t * (1.0 - 1e-12)) break;
        const double hi = std::min(v_record.times[k], t);
        const double fa = p.value(v_record.states[k - 1]) - minf;
        const double fb = p.value(v_record.states[k]) - minf;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int q = 0; q < 5; ++q) {
            const double th = mid + half * GaussLegendre5::nodes[q];
            const double s = (th - v_record.times[k - 1]) /
                             (v_record.times[k] - v_record.times[k - 1]);
            integral += half * GaussLegendre5::weights[q] * std::pow(th, alpha - 2.0) *
                        ((1.0 - s) * fa + s * fb);
        }
        if (hi >= t) break;
    }
    const double atom = std::pow(t0 / t, am);
    const double avg_gap =
        atom * (p.value(v_record.states[0]) - minf) + am / std::pow(t, am) * integral;

    // f at the averaged point, over the samples up to t
    std::size_t m = 0;
    while (m < n && v_record.times[m] <= t * (1.0 + 1e-12)) ++m;
    TrajectoryRecord truncated;
    truncated.times.assign(v_record.times.begin(), v_record.times.begin() + m);
    truncated.states.assign(v_record.states.begin(), v_record.states.begin() + m);
    if (v_record.derivatives.size() == n)
        truncated.derivatives.assign(v_record.derivatives.begin(),
                                     v_record.derivatives.begin() + m);
    truncated.eps_value.assign(m, 0.0);
    if (std::abs(truncated.times.back() - t) > 1e-12 * t) {
        // append the evaluation time with linearly interpolated state
        const double a = v_record.times[m - 1], b = v_record.times[m];
        const double s = (t - a) / (b - a);
        Vec vt(v_record.states[m - 1].size());
        for (std::size_t i = 0; i < vt.size(); ++i)
            vt[i] = (1.0 - s) * v_record.states[m - 1][i] + s * v_record.states[m][i];
        truncated.times.push_back(t);
        truncated.states.push_back(std::move(vt));
        truncated.eps_value.push_back(0.0);
        truncated.derivatives.clear();  // fall back to linear reconstruction
    }
    const TrajectoryRecord averaged = average_trajectory(truncated, p, alpha, t0);
    const double x_gap = p.value(averaged.states.back()) - minf;
    return avg_gap - x_gap;
}

std::string to_string(Observable o) {
    switch (o) {
        case Observable::FGap: return "f_gap";
        case Observable::GradNorm: return "grad_norm";
        case Observable::DistMinNorm: return "dist_min_norm";
        case Observable::EnergyE: return "energy_E";
    }
    return "?";
}

RateFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values,
                      double t_lo, double t_hi, int min_samples) {
    if (!(t_lo < t_hi)) throw validation_error("fit: window must satisfy t_lo < t_hi");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (t < t_lo || t > t_hi) continue;
        const double y = values[k];
        if (!(y > 0.0) || !std::isfinite(y))
            throw degenerate_data_error("fit: observable at or below the noise floor", t);
        const double lx = std::log(t), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
        ++n;
    }
    if (n < min_samples)
        throw validation_error("fit: fewer than the required samples in the window");
    const double det = n * sxx - sx * sx;
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.n_samples = n;
    const double ss_tot = syy - sy * sy / n;
    const double ss_res = std::max(0.0, ss_tot - fit.slope * fit.slope * det / n);
    fit.r_squared = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

RateFit fit_rate(const TrajectoryRecord& record, Observable obs, double t_lo, double t_hi) {
    const std::vector<double>* col = nullptr;
    switch (obs) {
        case Observable::FGap: col = &record.f_gap; break;
        case Observable::GradNorm: col = &record.grad_norm; break;
        case Observable::DistMinNorm: col = &record.dist_min_norm; break;
        case Observable::EnergyE: col = &record.energy; break;
    }
    return fit_power_law(record.times, *col, t_lo, t_hi);
}

namespace {

// -(1/gamma(t)) int_{t1}^{t} epsdot(s) gamma(s) ds  (nonnegative)
double damping_integral(const TikhonovSchedule& sch, double t1, double t) {
    switch (sch.family()) {
        case ScheduleFamily::Constant:
        case ScheduleFamily::Zero: return 0.0;
        case ScheduleFamily::DeltaOverT: {
            const double delta = sch.parameter();
            if (std::abs(delta - 1.0) < 1e-12) return std::log(t / t1) / t;
            // delta t1^{-d} (t^{d-1} - t1^{d-1})/(d-1) / gamma(t), gamma = (t/t1)^d
            return delta / (delta - 1.0) * (std::pow(t, delta - 1.0) - std::pow(t1, delta - 1.0)) /
                   std::pow(t, delta);
        }
        case ScheduleFamily::InversePower: {
            const double lg_t = sch.log_gamma(t);
            auto integrand = [&](double s) {
                return -sch.epsilon_dot(s) * std::exp(sch.log_gamma(s) - lg_t);
            };
            return integrate_adaptive(integrand, t1, t, 1e-13);
        }
    }
    return 0.0;
}

}  // namespace

LyapunovBoundReport check_lyapunov_bound(const TrajectoryRecord& record,
                                         const TikhonovSchedule& schedule,
                                         const ObjectiveProblem& p) {
    if (!p.min_norm_solution())
        throw validation_error("check_lyapunov_bound: requires a known minimum norm solution");
    if (!schedule.positive())
        throw validation_error("check_lyapunov_bound: requires eps(t) > 0");
    if (record.size() < 2) throw validation_error("check_lyapunov_bound: empty record");

    const double xstar2 = dot(*p.min_norm_solution(), *p.min_norm_solution());
    const double t1 = record.times.front();
    const double lg1 = schedule.log_gamma(t1);

    LyapunovBoundReport rep;
    Vec warm;
    double e1 = 0.0;
    for (std::size_t k = 0; k < record.size(); ++k) {
        const double t = record.times[k];
        const double eps = schedule.epsilon(t);
        const ViscosityPoint vp = viscosity_point(p, eps, warm.empty() ? nullptr : &warm);
        warm = vp.point;
        const double gap =
            regularized_value(p, eps, record.states[k]) - regularized_value(p, eps, vp.point);
        const double dd = dist(record.states[k], vp.point);
        const double energy = gap + 0.5 * eps * dd * dd;
        if (k == 0) e1 = energy;  // anchor; the bound at t1 reduces to E(t1) <= E(t1)
        ++rep.samples_checked;

        const double decay = std::exp(lg1 - schedule.log_gamma(t));
        const double rhs = decay * e1 + xstar2 * damping_integral(schedule, t1, t);
        const double slack = 1e-6 * rhs + 1e-14 * (1.0 + e1);
        if (energy > rhs + slack) {
            ++rep.energy_bound_violations;
            if (rep.energy_bound_violations + rep.distance_bound_violations == 1)
                rep.first_violation_time = t;
        }
        rep.max_relative_excess =
            std::max(rep.max_relative_excess, (energy - rhs) / std::max(rhs, 1e-300));

        const double dist_rhs = energy / eps;
        if (dd * dd > dist_rhs * (1.0 + 1e-6) + 1e-14) {
            ++rep.distance_bound_violations;
            if (rep.energy_bound_violations + rep.distance_bound_violations == 1)
                rep.first_violation_time = t;
        }
    }
    return rep;
}

EquivalenceReport equivalence_check(const DynamicsSpec& second_order,
                                    const DynamicsSpec& coupled, const IntegratorConfig& cfg) {
    if (second_order.kind != DynamicsKind::InertialImplicitHessian)
        throw validation_error("equivalence_check: first spec must be inertial_implicit_hessian");
    if (coupled.kind != DynamicsKind::CoupledVX)
        throw validation_error("equivalence_check: second spec must be coupled_vx");
    if (second_order.alpha != coupled.alpha || second_order.t0 != coupled.t0 ||
        second_order.problem.dim() != coupled.problem.dim())
        throw validation_error("equivalence_check: specs must share problem, alpha and t0");
    if (second_order.x0 != coupled.x0)
        throw validation_error("equivalence_check: specs must share x0");
    if (second_order.v0.value_or(zeros(second_order.problem.dim())) !=
        coupled.v0.value_or(zeros(coupled.problem.dim())))
        throw validation_error("equivalence_check: specs must share the initial velocity");

    const TrajectoryRecord a = integrate(second_order, cfg);
    const TrajectoryRecord b = integrate(coupled, cfg);

    // rescaled first-order run from v(t0) = x0 + t0/(alpha-1) xdot0
    DynamicsSpec vspec = coupled;
    vspec.kind = DynamicsKind::RescaledFirstOrder;
    Vec packed = coupled.initial_state();
    vspec.x0.assign(packed.begin(), packed.begin() + coupled.problem.dim());
    vspec.v0.reset();
    const TrajectoryRecord v = integrate(vspec, cfg);
    const TrajectoryRecord c =
        average_trajectory(v, coupled.problem, coupled.alpha, coupled.t0);

    EquivalenceReport rep;
    double max_norm = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) max_norm = std::max(max_norm, norm(a.states[k]));
    rep.tolerance = 50.0 * cfg.rel_tol * (1.0 + max_norm);
    rep.first_divergence_time = a.times.back();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double dab = dist(a.states[k], b.states[k]);
        const double dac = dist(a.states[k], c.states[k]);
        const double dbc = dist(b.states[k], c.states[k]);
        const double worst = std::max({dab, dac, dbc});
        if (worst > rep.tolerance && rep.max_discrepancy <= rep.tolerance)
            rep.first_divergence_time = a.times[k];
        rep.max_discrepancy = std::max(rep.max_discrepancy, worst);
    }
    return rep;
}

}  // namespace tikflow
