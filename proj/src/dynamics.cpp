#include "tikflow/dynamics.hpp"

#include <cmath>

#include "tikflow/errors.hpp"

namespace tikflow {

std::string to_string(DynamicsKind k) {
    switch (k) {
        case DynamicsKind::SdTikhonov: return "sd_tikhonov";
        case DynamicsKind::RescaledFirstOrder: return "rescaled_first_order";
        case DynamicsKind::InertialImplicitHessian: return "inertial_implicit_hessian";
        case DynamicsKind::InertialExplicitHessian: return "inertial_explicit_hessian";
        case DynamicsKind::AvdBaseline: return "avd_baseline";
        case DynamicsKind::CoupledVX: return "coupled_vx";
        case DynamicsKind::CoupledVXNonsmooth: return "coupled_vx_nonsmooth";
    }
    return "?";
}

namespace {

bool needs_alpha(DynamicsKind k) {
    return k == DynamicsKind::RescaledFirstOrder || k == DynamicsKind::InertialImplicitHessian ||
           k == DynamicsKind::CoupledVX || k == DynamicsKind::CoupledVXNonsmooth;
}

}  // namespace

void DynamicsSpec::validate() const {
    if (!(t0 > 0.0)) throw validation_error("dynamics: t0 must be positive");
    if (static_cast<int>(x0.size()) != problem.dim())
        throw validation_error("dynamics: x0 dimension mismatch");
    if (v0 && static_cast<int>(v0->size()) != problem.dim())
        throw validation_error("dynamics: v0 dimension mismatch");
    if (needs_alpha(kind) && !(alpha > 1.0))
        throw validation_error("dynamics: " + to_string(kind) + " requires alpha > 1");
    if (kind == DynamicsKind::AvdBaseline && !(alpha > 0.0))
        throw validation_error("dynamics: avd_baseline requires alpha > 0");

    switch (kind) {
        case DynamicsKind::SdTikhonov:
        case DynamicsKind::RescaledFirstOrder:
        case DynamicsKind::InertialImplicitHessian:
        case DynamicsKind::AvdBaseline:
        case DynamicsKind::CoupledVX:
            if (!problem.has_gradient())
                throw unsupported_operation("dynamics: " + to_string(kind) +
                                            " requires a smooth problem");
            break;
        case DynamicsKind::InertialExplicitHessian:
            if (!problem.has_gradient() || !problem.has_hess_vec())
                throw unsupported_operation(
                    "dynamics: inertial_explicit_hessian requires gradient and hess_vec");
            break;
        case DynamicsKind::CoupledVXNonsmooth:
            if (!problem.has_prox())
                throw unsupported_operation("dynamics: coupled_vx_nonsmooth requires a prox");
            if (v0 && norm(*v0) != 0.0)
                throw validation_error(
                    "dynamics: coupled_vx_nonsmooth requires zero initial velocity");
            break;
    }
    if (!problem.in_domain(x0)) throw std::domain_error("dynamics: x0 outside the domain of f");
}

int DynamicsSpec::phase_dim() const {
    const int d = problem.dim();
    return (second_order() || coupled()) ? 2 * d : d;
}

Vec DynamicsSpec::initial_state() const {
    const int d = problem.dim();
    const Vec vel = v0.value_or(zeros(d));
    if (second_order()) {
        Vec y(2 * d);
        for (int i = 0; i < d; ++i) {
            y[i] = x0[i];
            y[d + i] = vel[i];
        }
        return y;
    }
    if (coupled()) {
        // companion variable v = x + t/(alpha-1) xdot
        Vec y(2 * d);
        for (int i = 0; i < d; ++i) {
            y[i] = x0[i] + t0 / (alpha - 1.0) * vel[i];
            y[d + i] = x0[i];
        }
        return y;
    }
    return x0;
}

bool DynamicsSpec::theorem_grade() const {
    switch (kind) {
        case DynamicsKind::RescaledFirstOrder:
        case DynamicsKind::InertialImplicitHessian:
        case DynamicsKind::CoupledVX:
        case DynamicsKind::CoupledVXNonsmooth:
            if (schedule.family() == ScheduleFamily::DeltaOverT)
                return alpha > 3.0 && schedule.parameter() > 1.0;
            if (schedule.family() == ScheduleFamily::InversePower) return alpha > 1.0;
            return false;
        case DynamicsKind::InertialExplicitHessian:
            return delta_visc > 2.0 && beta > 0.0 &&
                   (schedule.family() == ScheduleFamily::InversePower ||
                    schedule.family() == ScheduleFamily::DeltaOverT);
        case DynamicsKind::SdTikhonov:
            if (schedule.family() == ScheduleFamily::DeltaOverT) return schedule.parameter() > 1.0;
            return schedule.family() == ScheduleFamily::InversePower;
        case DynamicsKind::AvdBaseline: return alpha >= 3.0;
    }
    return false;
}

Vec rhs_sd_tikhonov(const DynamicsSpec& spec, double t, const Vec& x) {
    Vec r = spec.problem.gradient(x);
    const double e = spec.schedule.epsilon(t);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -r[i] - e * x[i];
    return r;
}

Vec rhs_rescaled_first_order(const DynamicsSpec& spec, double t, const Vec& v) {
    const ComposedSchedule cs(spec.schedule, spec.alpha);
    Vec r = spec.problem.gradient(v);
    const double e = cs.epsilon(t);
    const double td = cs.tau_dot(t);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -td * (r[i] + e * v[i]);
    return r;
}

Vec rhs_inertial_implicit_hessian(const DynamicsSpec& spec, double t, const Vec& x,
                                  const Vec& xdot) {
    const ComposedSchedule cs(spec.schedule, spec.alpha);
    const double lead = t / (spec.alpha - 1.0);
    Vec w = x;
    axpy(w, lead, xdot);
    Vec g = spec.problem.gradient(w);  // throws domain_error if w leaves the domain
    const double e = cs.epsilon(t);
    const double damp = spec.alpha / t;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -damp * xdot[i] - g[i] - e * w[i];
    return g;
}

Vec rhs_inertial_explicit_hessian(const DynamicsSpec& spec, double t, const Vec& x,
                                  const Vec& xdot) {
    const double e = spec.schedule.epsilon(t);
    const double damp = spec.delta_visc * std::sqrt(e);
    Vec g = spec.problem.gradient(x);
    const Vec hv = spec.problem.hess_vec(x, xdot);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = -damp * xdot[i] - spec.beta * hv[i] - g[i] - e * x[i];
    return g;
}

Vec rhs_avd_baseline(const DynamicsSpec& spec, double t, const Vec& x, const Vec& xdot) {
    Vec g = spec.problem.gradient(x);
    const double damp = spec.alpha / t;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -damp * xdot[i] - g[i];
    return g;
}

std::pair<Vec, Vec> rhs_coupled_vx(const DynamicsSpec& spec, double t, const Vec& v,
                                   const Vec& x) {
    Vec vdot = rhs_rescaled_first_order(spec, t, v);
    Vec xdot(x.size());
    const double k = (spec.alpha - 1.0) / t;
    for (std::size_t i = 0; i < x.size(); ++i) xdot[i] = -k * (x[i] - v[i]);
    return {std::move(vdot), std::move(xdot)};
}

Vec phase_rhs(const DynamicsSpec& spec, double t, const Vec& state) {
    const int d = spec.problem.dim();
    switch (spec.kind) {
        case DynamicsKind::SdTikhonov: return rhs_sd_tikhonov(spec, t, state);
        case DynamicsKind::RescaledFirstOrder: return rhs_rescaled_first_order(spec, t, state);
        case DynamicsKind::InertialImplicitHessian:
        case DynamicsKind::InertialExplicitHessian:
        case DynamicsKind::AvdBaseline: {
            const Vec x(state.begin(), state.begin() + d);
            const Vec xd(state.begin() + d, state.end());
            Vec acc;
            if (spec.kind == DynamicsKind::InertialImplicitHessian)
                acc = rhs_inertial_implicit_hessian(spec, t, x, xd);
            else if (spec.kind == DynamicsKind::InertialExplicitHessian)
                acc = rhs_inertial_explicit_hessian(spec, t, x, xd);
            else
                acc = rhs_avd_baseline(spec, t, x, xd);
            Vec dy(2 * d);
            for (int i = 0; i < d; ++i) {
                dy[i] = xd[i];
                dy[d + i] = acc[i];
            }
            return dy;
        }
        case DynamicsKind::CoupledVX: {
            const Vec v(state.begin(), state.begin() + d);
            const Vec x(state.begin() + d, state.end());
            auto [vdot, xdot] = rhs_coupled_vx(spec, t, v, x);
            Vec dy(2 * d);
            for (int i = 0; i < d; ++i) {
                dy[i] = vdot[i];
                dy[d + i] = xdot[i];
            }
            return dy;
        }
        case DynamicsKind::CoupledVXNonsmooth:
            throw unsupported_operation("coupled_vx_nonsmooth has no pointwise rhs; "
                                        "use the proximal stepper");
    }
    return {};
}

double nonsmooth_step_max(const DynamicsSpec& spec, double t) {
    return 0.1 * t / (spec.alpha - 1.0);
}

std::pair<Vec, Vec> nonsmooth_step(const DynamicsSpec& spec, double t, const Vec& v, const Vec& x,
                                   double h) {
    if (!(h > 0.0)) throw validation_error("nonsmooth_step: h must be positive");
    if (h > nonsmooth_step_max(spec, t) * (1.0 + 1e-12))
        throw validation_error("nonsmooth_step: h exceeds h_max(t)");
    const ComposedSchedule cs(spec.schedule, spec.alpha);
    const double taud = cs.tau_dot(t);
    const double e = cs.epsilon(t);
    const double den = 1.0 + h * taud * e;
    const double lambda = h * taud / den;

    Vec vp = spec.problem.prox(lambda, (1.0 / den) * v);

    const double k = h * (spec.alpha - 1.0) / t;
    Vec xp(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xp[i] = (x[i] + k * vp[i]) / (1.0 + k);
    return {std::move(vp), std::move(xp)};
}

}  // namespace tikflow
