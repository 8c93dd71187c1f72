#include "tikflow/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tikflow/errors.hpp"

namespace tikflow {

std::string to_string(IntegratorMethod m) {
    switch (m) {
        case IntegratorMethod::AdaptiveRK: return "adaptive_rk";
        case IntegratorMethod::FixedRK4: return "fixed_rk4";
        case IntegratorMethod::ProximalSemiImplicit: return "proximal_semi_implicit";
    }
    return "?";
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw validation_error("integrator: tolerances must be positive");
    if (samples < 2) throw validation_error("integrator: need at least 2 samples");
    if (max_steps <= 0) throw validation_error("integrator: max_steps must be positive");
    if (!(fixed_step > 0.0)) throw validation_error("integrator: fixed_step must be positive");
    if (!(prox_step_fraction > 0.0))
        throw validation_error("integrator: prox_step_fraction must be positive");
    if (t_end < 0.0) throw validation_error("integrator: t_end must be nonnegative");
}

double IntegratorConfig::horizon(const DynamicsSpec& spec) const {
    if (t_end > 0.0) {
        if (t_end <= spec.t0) throw validation_error("integrator: t_end must exceed t0");
        return t_end;
    }
    return spec.kind == DynamicsKind::CoupledVXNonsmooth ? 1e2 * spec.t0 : 1e3 * spec.t0;
}

std::vector<double> log_grid(double t0, double t1, int n) {
    if (!(t0 > 0.0) || !(t1 > t0)) throw validation_error("log_grid: need 0 < t0 < t1");
    std::vector<double> g(n);
    const double l0 = std::log(t0), l1 = std::log(t1);
    for (int i = 0; i < n; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
    g.front() = t0;
    g.back() = t1;
    return g;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// difference between the 5th and the embedded 4th order weights
constexpr double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695, E4 = B4 - 393.0 / 640,
                 E5 = B5 + 92097.0 / 339200, E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

struct StepResult {
    Vec y_new;
    Vec f_new;  // FSAL derivative at t+h
    double err; // scaled error norm
};

template <typename Rhs>
StepResult dp45_step(const Rhs& rhs, double t, const Vec& y, const Vec& f0, double h,
                     double rel_tol, double abs_tol) {
    const std::size_t n = y.size();
    Vec k2, k3, k4, k5, k6, k7, tmp(n);

    auto stage = [&](double c, auto fill) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * fill(i);
        return rhs(t + c * h, tmp);
    };

    k2 = stage(C2, [&](std::size_t i) { return A21 * f0[i]; });
    k3 = stage(C3, [&](std::size_t i) { return A31 * f0[i] + A32 * k2[i]; });
    k4 = stage(C4, [&](std::size_t i) { return A41 * f0[i] + A42 * k2[i] + A43 * k3[i]; });
    k5 = stage(C5, [&](std::size_t i) {
        return A51 * f0[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i];
    });
    k6 = stage(1.0, [&](std::size_t i) {
        return A61 * f0[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i];
    });

    StepResult r;
    r.y_new.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        r.y_new[i] =
            y[i] + h * (B1 * f0[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    k7 = rhs(t + h, r.y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e =
            h * (E1 * f0[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(r.y_new[i]));
        err += (e / scale) * (e / scale);
    }
    r.err = std::sqrt(err / n);
    r.f_new = std::move(k7);
    return r;
}

// cubic Hermite interpolation on [t0, t0+h]
void hermite(const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1, double h, double theta,
             Vec& y_out, Vec& dy_out) {
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double g00 = (6 * t2 - 6 * theta) / h, g10 = 3 * t2 - 4 * theta + 1;
    const double g01 = (6 * theta - 6 * t2) / h, g11 = 3 * t2 - 2 * theta;
    const std::size_t n = y0.size();
    y_out.resize(n);
    dy_out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        y_out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
        dy_out[i] = g00 * y0[i] + g10 * f0[i] + g01 * y1[i] + g11 * f1[i];
    }
}

struct Sampler {
    explicit Sampler(const DynamicsSpec& spec, std::vector<double> grid)
        : spec_(&spec), grid_(std::move(grid)) {}

    const DynamicsSpec* spec_;
    std::vector<double> grid_;
    std::size_t next_ = 0;
    std::vector<Vec> states, companions, derivatives;
    std::vector<double> times;

    bool done() const { return next_ >= grid_.size(); }
    double next_time() const { return grid_[next_]; }

    void emit(double t, const Vec& y, const Vec& dy) {
        const int d = spec_->problem.dim();
        const bool split = spec_->second_order() || spec_->coupled();
        const bool coupled = spec_->coupled();
        Vec x, comp, dx;
        if (!split) {
            x = y;
            dx = dy;
        } else if (coupled) {
            x.assign(y.begin() + d, y.end());       // observed variable
            comp.assign(y.begin(), y.begin() + d);  // companion v
            dx.assign(dy.begin() + d, dy.end());
        } else {
            x.assign(y.begin(), y.begin() + d);
            comp.assign(y.begin() + d, y.end());  // velocity
            dx = comp;
        }
        times.push_back(t);
        states.push_back(std::move(x));
        companions.push_back(std::move(comp));
        derivatives.push_back(std::move(dx));
    }

    // consume all grid points in (t_lo, t_hi] by Hermite interpolation
    void collect(double t_lo, double h, const Vec& y0, const Vec& f0, const Vec& y1,
                 const Vec& f1) {
        Vec yi, dyi;
        while (!done() && next_time() <= t_lo + h * (1.0 + 1e-14)) {
            const double ts = std::min(next_time(), t_lo + h);
            const double theta = std::clamp((ts - t_lo) / h, 0.0, 1.0);
            hermite(y0, f0, y1, f1, h, theta, yi, dyi);
            emit(ts, yi, dyi);
            ++next_;
        }
    }

    // roundoff can leave the horizon a few ulp short; emit what remains
    void flush(const Vec& y, const Vec& dy) {
        while (!done()) {
            emit(next_time(), y, dy);
            ++next_;
        }
    }
};

}  // namespace

namespace {

TrajectoryRecord finalize(const DynamicsSpec& spec, Sampler&& s) {
    TrajectoryRecord rec;
    rec.dim = spec.problem.dim();
    rec.times = std::move(s.times);
    rec.states = std::move(s.states);
    rec.companions = std::move(s.companions);
    rec.derivatives = std::move(s.derivatives);

    const auto& p = spec.problem;
    const std::size_t n = rec.times.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.f_gap.resize(n);
    rec.grad_norm.assign(n, nan);
    rec.dist_min_norm.assign(n, nan);
    rec.eps_value.resize(n);
    rec.energy.assign(n, nan);

    std::vector<double> fvals(n);
    for (std::size_t k = 0; k < n; ++k) fvals[k] = p.value(rec.states[k]);
    if (p.min_value()) {
        rec.min_reference = *p.min_value();
    } else {
        rec.min_reference = *std::min_element(fvals.begin(), fvals.end());
        rec.f_gap_vs_best_seen = true;
    }

    const bool composed_eps = spec.kind == DynamicsKind::RescaledFirstOrder ||
                              spec.kind == DynamicsKind::InertialImplicitHessian ||
                              spec.coupled();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = rec.times[k];
        rec.f_gap[k] = fvals[k] - rec.min_reference;
        if (p.has_gradient()) rec.grad_norm[k] = norm(p.gradient(rec.states[k]));
        if (p.min_norm_solution()) rec.dist_min_norm[k] = dist(rec.states[k], *p.min_norm_solution());
        if (spec.kind == DynamicsKind::AvdBaseline)
            rec.eps_value[k] = 0.0;
        else if (composed_eps)
            rec.eps_value[k] = ComposedSchedule(spec.schedule, spec.alpha).epsilon(t);
        else
            rec.eps_value[k] = spec.schedule.epsilon(t);
        if (!std::isfinite(rec.f_gap[k]))
            throw integration_failure("non-finite diagnostic", t);
    }
    return rec;
}

TrajectoryRecord run_adaptive(const DynamicsSpec& spec, const IntegratorConfig& cfg, double T) {
    auto rhs = [&](double t, const Vec& y) { return phase_rhs(spec, t, y); };
    Sampler sampler(spec, log_grid(spec.t0, T, cfg.samples));

    double t = spec.t0;
    Vec y = spec.initial_state();
    Vec f0 = rhs(t, y);
    sampler.emit(t, y, f0);
    ++sampler.next_;

    double h = std::min(0.01 * spec.t0, T - spec.t0);
    long steps = 0;

    while (t < T && T - t > 1e-12 * T) {
        if (++steps > cfg.max_steps)
            throw integration_failure("adaptive integrator exhausted max_steps", t);
        h = std::min({h, T - t, 0.25 * t});
        if (h < 1e-13 * std::max(t, 1.0))
            throw integration_failure("step size underflow (blowup or domain exit)", t);

        StepResult r;
        try {
            r = dp45_step(rhs, t, y, f0, h, cfg.rel_tol, cfg.abs_tol);
        } catch (const std::domain_error&) {
            h *= 0.3;  // lookahead or stage left the domain: retry smaller
            continue;
        }
        if (!all_finite(r.y_new) || !std::isfinite(r.err)) {
            h *= 0.3;
            continue;
        }

        if (r.err <= 1.0) {
            sampler.collect(t, h, y, f0, r.y_new, r.f_new);
            t += h;
            y = std::move(r.y_new);
            f0 = std::move(r.f_new);
        }
        const double factor =
            r.err > 0.0 ? std::clamp(0.9 * std::pow(r.err, -0.2), 0.2, 5.0) : 5.0;
        h *= factor;
    }
    sampler.flush(y, f0);
    return finalize(spec, std::move(sampler));
}

TrajectoryRecord run_fixed_rk4(const DynamicsSpec& spec, const IntegratorConfig& cfg, double T) {
    auto rhs = [&](double t, const Vec& y) { return phase_rhs(spec, t, y); };
    Sampler sampler(spec, log_grid(spec.t0, T, cfg.samples));

    double t = spec.t0;
    Vec y = spec.initial_state();
    Vec f0 = rhs(t, y);
    sampler.emit(t, y, f0);
    ++sampler.next_;

    const std::size_t n = y.size();
    Vec tmp(n), k2, k3, k4, y1(n);
    long steps = 0;
    while (t < T && T - t > 1e-12 * T) {
        if (++steps > cfg.max_steps)
            throw integration_failure("fixed RK4 exhausted max_steps", t);
        double h = std::min(cfg.fixed_step, T - t);
        if (!sampler.done()) h = std::min(h, sampler.next_time() - t);
        h = std::max(h, 1e-14 * t);

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * f0[i];
        k2 = rhs(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        k3 = rhs(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        k4 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + h / 6.0 * (f0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if (!all_finite(y1)) throw integration_failure("state became non-finite", t);
        t += h;
        std::swap(y, y1);
        f0 = rhs(t, y);
        if (!sampler.done() && t >= sampler.next_time() * (1.0 - 1e-14)) {
            sampler.emit(sampler.next_time(), y, f0);
            ++sampler.next_;
        }
    }
    sampler.flush(y, f0);
    return finalize(spec, std::move(sampler));
}

TrajectoryRecord run_proximal(const DynamicsSpec& spec, const IntegratorConfig& cfg, double T) {
    Sampler sampler(spec, log_grid(spec.t0, T, cfg.samples));
    const int d = spec.problem.dim();

    double t = spec.t0;
    Vec y = spec.initial_state();
    Vec v(y.begin(), y.begin() + d), x(y.begin() + d, y.end());

    auto emit = [&](double ts) {
        Vec packed(2 * d);
        for (int i = 0; i < d; ++i) {
            packed[i] = v[i];
            packed[d + i] = x[i];
        }
        // xdot from the averaging equation; exact for the x-component
        Vec dy(2 * d, 0.0);
        const double k = (spec.alpha - 1.0) / ts;
        for (int i = 0; i < d; ++i) dy[d + i] = -k * (x[i] - v[i]);
        sampler.emit(ts, packed, dy);
        ++sampler.next_;
    };
    emit(t);

    long steps = 0;
    while (t < T && T - t > 1e-12 * T) {
        if (++steps > cfg.max_steps)
            throw integration_failure("proximal stepper exhausted max_steps", t);
        double h = std::min({cfg.prox_step_fraction * t, nonsmooth_step_max(spec, t), T - t});
        if (!sampler.done()) h = std::min(h, sampler.next_time() - t);
        h = std::max(h, 1e-14 * t);
        auto [vp, xp] = nonsmooth_step(spec, t, v, x, h);
        v = std::move(vp);
        x = std::move(xp);
        if (!all_finite(v) || !all_finite(x))
            throw integration_failure("state became non-finite", t);
        t += h;
        if (!sampler.done() && t >= sampler.next_time() * (1.0 - 1e-14)) emit(sampler.next_time());
    }
    while (!sampler.done()) emit(sampler.next_time());
    return finalize(spec, std::move(sampler));
}

}  // namespace

TrajectoryRecord integrate(const DynamicsSpec& spec, const IntegratorConfig& cfg) {
    spec.validate();
    cfg.validate();
    const double T = cfg.horizon(spec);

    const bool nonsmooth = spec.kind == DynamicsKind::CoupledVXNonsmooth;
    if (nonsmooth && cfg.method != IntegratorMethod::ProximalSemiImplicit)
        throw validation_error("integrate: coupled_vx_nonsmooth requires proximal_semi_implicit");
    if (cfg.method == IntegratorMethod::ProximalSemiImplicit && !spec.coupled())
        throw validation_error("integrate: proximal_semi_implicit requires a coupled system");

    switch (cfg.method) {
        case IntegratorMethod::AdaptiveRK: return run_adaptive(spec, cfg, T);
        case IntegratorMethod::FixedRK4: return run_fixed_rk4(spec, cfg, T);
        case IntegratorMethod::ProximalSemiImplicit: return run_proximal(spec, cfg, T);
    }
    throw validation_error("integrate: unknown method");
}

}  // namespace tikflow
