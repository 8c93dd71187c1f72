#include "tikflow/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "tikflow/analysis.hpp"
#include "tikflow/dynamics.hpp"
#include "tikflow/errors.hpp"
#include "tikflow/integrate.hpp"
#include "tikflow/problem.hpp"
#include "tikflow/schedule.hpp"

namespace tikflow {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

struct Runs {
    // criterion 1-3 runs: implicit Hessian, delta/t, alpha=3.5, delta=2
    TrajectoryRecord f2_dt, f1_dt, avd_contrast;
    // criterion 5-6 runs: first order
    TrajectoryRecord sd_dt, sd_r05;
};

DynamicsSpec implicit_spec(ObjectiveProblem p, const TikhonovSchedule& s, double alpha) {
    return DynamicsSpec{.kind = DynamicsKind::InertialImplicitHessian,
                        .problem = std::move(p),
                        .schedule = s,
                        .alpha = alpha,
                        .t0 = 1.0,
                        .x0 = zeros(2)};
}

TrajectoryRecord run_second_order(ObjectiveProblem p, const TikhonovSchedule& s, double alpha,
                                  double T) {
    IntegratorConfig cfg;
    cfg.t_end = T;
    cfg.samples = 400;
    return integrate(implicit_spec(std::move(p), s, alpha), cfg);
}

using Criterion = std::function<CriterionResult(Runs&, const AcceptanceOptions&)>;

CriterionResult c1_value_rate_delta(Runs& r, const AcceptanceOptions&) {
    const auto sched = TikhonovSchedule::delta_over_t(2.0);
    r.f2_dt = run_second_order(problems::f2(), sched, 3.5, 1e3);
    r.f1_dt = run_second_order(problems::f1(), sched, 3.5, 1e3);
    const RateFit a = fit_rate(r.f2_dt, Observable::FGap, 1e2, 1e3);
    const RateFit b = fit_rate(r.f1_dt, Observable::FGap, 1e2, 1e3);
    CriterionResult res{1, "value rate, delta/t inertial system"};
    res.pass = a.slope <= -1.8 && b.slope <= -1.8;
    res.detail = "f_gap slope on [1e2,1e3]: f2=" + fmt(a.slope) + ", f1=" + fmt(b.slope) +
                 " (required <= -1.8)";
    return res;
}

CriterionResult c2_gradient_rate_delta(Runs& r, const AcceptanceOptions&) {
    const RateFit a = fit_rate(r.f2_dt, Observable::GradNorm, 1e2, 1e3);
    const RateFit b = fit_rate(r.f1_dt, Observable::GradNorm, 1e2, 1e3);
    CriterionResult res{2, "gradient rate, delta/t inertial system"};
    res.pass = a.slope <= -0.9 && b.slope <= -0.9;
    res.detail = "grad_norm slope on [1e2,1e3]: f2=" + fmt(a.slope) + ", f1=" + fmt(b.slope) +
                 " (required <= -0.9)";
    return res;
}

CriterionResult c3_min_norm_selection(Runs& r, const AcceptanceOptions& opt) {
    const double dist_T = r.f2_dt.dist_min_norm.back();

    DynamicsSpec avd{.kind = DynamicsKind::AvdBaseline,
                     .problem = problems::f2(),
                     .schedule = TikhonovSchedule::zero(),
                     .alpha = 3.5,
                     .t0 = 1.0,
                     .x0 = Vec{2.0, -3.0}};
    IntegratorConfig cfg;
    cfg.t_end = 1e3;
    r.avd_contrast = integrate(avd, cfg);
    const double contrast = r.avd_contrast.dist_min_norm.back();

    CriterionResult res{3, "minimum norm selection on the degenerate problem"};
    const double tol = 1e-2 * opt.tol_scale;
    res.pass = dist_T <= tol;
    res.detail = "|x(T) - x*| = " + fmt(dist_T) + " (required <= " + fmt(tol) +
                 "); AVD contrast from (2,-3) ends at " + fmt(contrast) +
                 " (informational, selection effect visible when >= 0.1)";
    return res;
}

CriterionResult c4_value_rate_power(Runs&, const AcceptanceOptions& opt) {
    CriterionResult res{4, "value rate, 1/t^r inertial system"};
    res.pass = true;
    std::string detail;
    const double band = 0.2 * opt.tol_scale;
    for (const double rr : {0.5, 0.9}) {
        const auto sched = TikhonovSchedule::inverse_power(rr);
        for (const bool use_f2 : {true, false}) {
            const TrajectoryRecord rec =
                run_second_order(use_f2 ? problems::f2() : problems::f1(), sched, 3.5, 1e3);
            const RateFit fit = fit_rate(rec, Observable::FGap, 1e2, 1e3);
            const double target = -2.0 * rr;
            const bool ok = std::abs(fit.slope - target) <= band;
            res.pass = res.pass && ok;
            detail += std::string(use_f2 ? "f2" : "f1") + " r=" + fmt(rr) +
                      " slope=" + fmt(fit.slope) + " target=" + fmt(target) + "+-" + fmt(band) +
                      (ok ? " ok; " : " VIOLATED; ");
        }
    }
    res.detail = detail;
    return res;
}

CriterionResult c5_first_order_rates(Runs& r, const AcceptanceOptions& opt) {
    CriterionResult res{5, "first-order steepest descent rates"};
    IntegratorConfig cfg;
    cfg.t_end = 1e3;
    cfg.samples = 400;

    const auto f2 = problems::f2();
    const auto sched_dt = TikhonovSchedule::delta_over_t(2.0);
    DynamicsSpec sd{.kind = DynamicsKind::SdTikhonov,
                    .problem = f2,
                    .schedule = sched_dt,
                    .t0 = 1.0,
                    .x0 = zeros(2)};
    r.sd_dt = integrate(sd, cfg);
    attach_energy(r.sd_dt, f2);

    const RateFit e_fit = fit_rate(r.sd_dt, Observable::EnergyE, 1e2, 1e3);
    const RateFit g_fit = fit_rate(r.sd_dt, Observable::FGap, 1e2, 1e3);
    const bool part1 = e_fit.slope <= -0.9 && g_fit.slope <= -0.9;

    const auto sched_r = TikhonovSchedule::inverse_power(0.5);
    DynamicsSpec sd_r = sd;
    sd_r.schedule = sched_r;
    r.sd_r05 = integrate(sd_r, cfg);

    const RateFit gap_fit = fit_rate(r.sd_r05, Observable::FGap, 1e2, 1e3);
    // ||x(t) - x_eps(t)||^2 along the run
    std::vector<double> d2(r.sd_r05.size());
    Vec warm;
    for (std::size_t k = 0; k < r.sd_r05.size(); ++k) {
        const ViscosityPoint vp = viscosity_point(f2, sched_r.epsilon(r.sd_r05.times[k]),
                                                  warm.empty() ? nullptr : &warm);
        warm = vp.point;
        const double d = dist(r.sd_r05.states[k], vp.point);
        d2[k] = d * d;
    }
    const RateFit d2_fit = fit_power_law(r.sd_r05.times, d2, 1e2, 1e3);

    const double band_gap = 0.15 * opt.tol_scale;
    const double band_d2 = 0.2 * opt.tol_scale;
    const bool part2 = std::abs(gap_fit.slope - (-0.5)) <= band_gap;
    const bool part3 = std::abs(d2_fit.slope - (-0.5)) <= band_d2;
    res.pass = part1 && part2 && part3;
    res.detail =
        "delta/t: E slope=" + fmt(e_fit.slope) + ", f_gap slope=" + fmt(g_fit.slope) +
        " (required <= -0.9" + std::string(part1 ? ", ok" : ", VIOLATED") + "); r=0.5: f_gap slope=" +
        fmt(gap_fit.slope) + " target=-0.5+-" + fmt(band_gap) +
        (part2 ? " ok" : " VIOLATED") + ", |x-x_eps|^2 slope=" + fmt(d2_fit.slope) +
        " target=-0.5+-" + fmt(band_d2) + (part3 ? " ok" : " VIOLATED");
    return res;
}

CriterionResult c6_lyapunov_bound(Runs& r, const AcceptanceOptions&) {
    const auto f2 = problems::f2();
    const LyapunovBoundReport a =
        check_lyapunov_bound(r.sd_dt, TikhonovSchedule::delta_over_t(2.0), f2);
    const LyapunovBoundReport b =
        check_lyapunov_bound(r.sd_r05, TikhonovSchedule::inverse_power(0.5), f2);
    CriterionResult res{6, "integrated Lyapunov energy bound"};
    res.pass = a.pass() && b.pass();
    res.detail = "delta/t: " + std::to_string(a.energy_bound_violations + a.distance_bound_violations) +
                 " violations over " + std::to_string(a.samples_checked) + " samples; r=0.5: " +
                 std::to_string(b.energy_bound_violations + b.distance_bound_violations) +
                 " violations over " + std::to_string(b.samples_checked) + " samples";
    return res;
}

CriterionResult c7_equivalence(Runs&, const AcceptanceOptions& opt) {
    CriterionResult res{7, "second-order / coupled / averaged equivalence"};
    res.pass = true;
    std::string detail;
    IntegratorConfig cfg;
    cfg.t_end = 1e2;
    cfg.samples = 2000;
    cfg.rel_tol = 1e-8;
    const double tol = 1e-5 * opt.tol_scale;
    for (const bool use_f2 : {true, false}) {
        for (const bool use_dt : {true, false}) {
            const auto sched = use_dt ? TikhonovSchedule::delta_over_t(2.0)
                                      : TikhonovSchedule::inverse_power(0.5);
            auto p = use_f2 ? problems::f2() : problems::f1();
            DynamicsSpec second = implicit_spec(p, sched, 3.0);
            DynamicsSpec coupled = second;
            coupled.kind = DynamicsKind::CoupledVX;
            const EquivalenceReport rep = equivalence_check(second, coupled, cfg);
            const bool ok = rep.max_discrepancy <= tol;
            res.pass = res.pass && ok;
            detail += std::string(use_f2 ? "f2" : "f1") + "/" +
                      (use_dt ? "delta_over_t" : "inverse_power") + ": " +
                      fmt(rep.max_discrepancy) + (ok ? "; " : " VIOLATED; ");
        }
    }
    res.detail = "max three-way discrepancy (tol " + fmt(tol) + "): " + detail;
    return res;
}

CriterionResult c8_viscosity_curve(Runs&, const AcceptanceOptions& opt) {
    CriterionResult res{8, "viscosity curve norm bound and convergence"};
    res.pass = true;
    std::string detail;
    const auto probs = {problems::f1(), problems::f2(),
                        problems::quadratic(Vec{1.0, 2.0}, Vec{1.0, 2.0}),
                        // semidefinite quadratic with an unbounded argmin
                        problems::quadratic(Vec{1.0, 0.0}, Vec{1.0, 0.0})};
    for (const auto& p : probs) {
        const Vec& xstar = *p.min_norm_solution();
        const double nstar = norm(xstar);
        Vec warm;
        bool bound_ok = true;
        // log grid 10 down to 1e-4
        for (int i = 0; i <= 25; ++i) {
            const double eps = 10.0 * std::pow(10.0, -5.0 * i / 25.0);
            const ViscosityPoint vp = viscosity_point(p, eps, warm.empty() ? nullptr : &warm);
            warm = vp.point;
            if (norm(vp.point) > nstar * (1.0 + 1e-9) + 1e-12) bound_ok = false;
        }
        const ViscosityPoint tail = viscosity_point(p, 1e-4, &warm);
        const double conv = dist(tail.point, xstar);
        const double conv_tol = 1e-2 * (1.0 + nstar) * opt.tol_scale;
        const bool ok = bound_ok && conv <= conv_tol;
        res.pass = res.pass && ok;
        detail += p.name() + ": |x_eps|<=|x*| " + (bound_ok ? "holds" : "VIOLATED") +
                  ", |x_1e-4 - x*|=" + fmt(conv) + " (tol " + fmt(conv_tol) + "); ";
    }
    res.detail = detail;
    return res;
}

CriterionResult c9_extended_gradient_lemma(Runs&, const AcceptanceOptions&) {
    CriterionResult res{9, "extended gradient lemma on quadratics"};
    const auto q = problems::quadratic(Vec{1.0, 2.0, 0.5}, Vec{1.0, 2.0, 0.0});
    const double L = *q.lipschitz_grad();
    const double minv = *q.min_value();
    unsigned long long state = 0x9e3779b97f4a7c15ULL;
    auto next_uniform = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return 2.0 * (static_cast<double>(state % 1000000ULL) / 1000000.0) - 1.0;
    };
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Vec x(q.dim());
        for (double& v : x) v = 3.0 * next_uniform();
        const double lhs = q.value(x) - minv;
        const double rhs = dot(q.gradient(x), q.gradient(x)) / (2.0 * L);
        worst = std::max(worst, rhs - lhs);
        if (lhs < rhs - 1e-12 * (1.0 + std::abs(lhs))) ok = false;
    }
    // equality case f = ||x||^2/2
    const auto iso = problems::quadratic(Vec{1.0, 1.0}, Vec{0.0, 0.0});
    double eq_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        Vec x{3.0 * next_uniform(), 3.0 * next_uniform()};
        const double lhs = iso.value(x);
        const double rhs = dot(iso.gradient(x), iso.gradient(x)) / 2.0;
        eq_err = std::max(eq_err, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    res.pass = ok && eq_err <= 1e-12;
    res.detail = "f - min f >= |grad f|^2/(2L) at 100 points (worst excess " + fmt(worst) +
                 "); equality error for |x|^2/2: " + fmt(eq_err);
    return res;
}

CriterionResult c10_nonsmooth_selection(Runs&, const AcceptanceOptions& opt) {
    CriterionResult res{10, "nonsmooth coupled system minimum norm selection"};
    DynamicsSpec spec{.kind = DynamicsKind::CoupledVXNonsmooth,
                      .problem = problems::abs_affine(Vec{1.0, 1.0}, 1.0),
                      .schedule = TikhonovSchedule::delta_over_t(2.0),
                      .alpha = 3.5,
                      .t0 = 1.0,
                      .x0 = zeros(2)};
    IntegratorConfig cfg;
    cfg.method = IntegratorMethod::ProximalSemiImplicit;
    cfg.t_end = 1e2;
    cfg.samples = 400;
    const TrajectoryRecord rec = integrate(spec, cfg);

    const double final_dist = rec.dist_min_norm.back();
    const double tol = 5e-2 * opt.tol_scale;

    // median of successive f_gap differences over the last decade
    std::vector<double> diffs;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        if (rec.times[k] >= 10.0) diffs.push_back(rec.f_gap[k] - rec.f_gap[k - 1]);
    }
    std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
    const double median = diffs[diffs.size() / 2];

    res.pass = final_dist <= tol && median <= 0.0;
    res.detail = "|x(T) - x*| = " + fmt(final_dist) + " (tol " + fmt(tol) +
                 "); median f_gap step over last decade = " + fmt(median) + " (required <= 0)";
    return res;
}

CriterionResult c11_integrator_contracts(Runs&, const AcceptanceOptions&) {
    CriterionResult res{11, "integrator order and refinement contracts"};
    // linear test problem xdot = -x on [1, 2]
    DynamicsSpec lin{.kind = DynamicsKind::SdTikhonov,
                     .problem = problems::quadratic(Vec{1.0}, Vec{0.0}),
                     .schedule = TikhonovSchedule::zero(),
                     .t0 = 1.0,
                     .x0 = Vec{1.0}};
    const double exact = std::exp(-1.0);

    IntegratorConfig fc;
    fc.method = IntegratorMethod::FixedRK4;
    fc.t_end = 2.0;
    fc.samples = 2;
    double prev_err = 0.0;
    double min_order = 1e9;
    for (int i = 0; i < 3; ++i) {
        fc.fixed_step = 0.02 / (1 << i);
        const TrajectoryRecord rec = integrate(lin, fc);
        const double err = std::abs(rec.states.back()[0] - exact);
        if (i > 0) min_order = std::min(min_order, std::log2(prev_err / err));
        prev_err = err;
    }

    // refinement contract on the delta/t first-order benchmark
    DynamicsSpec sd{.kind = DynamicsKind::SdTikhonov,
                    .problem = problems::f2(),
                    .schedule = TikhonovSchedule::delta_over_t(2.0),
                    .t0 = 1.0,
                    .x0 = zeros(2)};
    IntegratorConfig a;
    a.t_end = 1e2;
    a.samples = 2;
    a.rel_tol = 1e-6;
    a.abs_tol = 1e-9;
    IntegratorConfig b = a;
    b.rel_tol = 5e-7;
    const Vec xa = integrate(sd, a).states.back();
    const Vec xb = integrate(sd, b).states.back();
    const double change = dist(xa, xb);
    const double allowed = 10.0 * a.rel_tol * (1.0 + norm(xa));

    res.pass = min_order >= 3.8 && change <= allowed;
    res.detail = "observed RK4 order = " + fmt(min_order) +
                 " (required >= 3.8); refinement change = " + fmt(change) + " (allowed " +
                 fmt(allowed) + ")";
    return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            std::ostream* progress) {
    Runs runs;
    const std::vector<Criterion> criteria = {
        c1_value_rate_delta, c2_gradient_rate_delta, c3_min_norm_selection,
        c4_value_rate_power, c5_first_order_rates,   c6_lyapunov_bound,
        c7_equivalence,      c8_viscosity_curve,     c9_extended_gradient_lemma,
        c10_nonsmooth_selection, c11_integrator_contracts};

    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int index = static_cast<int>(i) + 1;
        if (opt.only_criterion != 0 && index != opt.only_criterion &&
            !(opt.only_criterion >= 2 && opt.only_criterion <= 3 && index == 1) &&
            !(opt.only_criterion == 6 && index == 5))
            continue;  // criteria 2-3 reuse the runs of 1; 6 reuses 5
        if (opt.quick && index == 10) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult res = criteria[i](runs, opt);
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (opt.only_criterion == 0 || index == opt.only_criterion) {
            if (progress) {
                (*progress) << "[" << (index < 10 ? " " : "") << index << "/11] "
                            << (res.pass ? "PASS" : "FAIL") << "  " << res.name << " ("
                            << fmt(res.seconds) << "s)\n        " << res.detail << "\n";
                progress->flush();
            }
            results.push_back(std::move(res));
        }
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.pass; });
}

}  // namespace tikflow
