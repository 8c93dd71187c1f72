#pragma once

#include <optional>
#include <string>
#include <utility>

#include "tikflow/problem.hpp"
#include "tikflow/schedule.hpp"
#include "tikflow/vec.hpp"

namespace tikflow {

/// The evolution rules, with eps(.) a TikhonovSchedule and
/// tau(t) = t^2/(2(alpha-1)), w = x + t/(alpha-1) xdot:
///
///   SdTikhonov              xdot = -grad f(x) - eps(t) x
///   RescaledFirstOrder      vdot = -(t/(alpha-1)) [grad f(v) + eps(tau(t)) v]
///   InertialImplicitHessian xddot = -(alpha/t) xdot - grad f(w) - eps(tau(t)) w
///   InertialExplicitHessian xddot = -delta sqrt(eps(t)) xdot - beta H(x) xdot
///                                   - grad f(x) - eps(t) x
///   AvdBaseline             xddot = -(alpha/t) xdot - grad f(x)
///   CoupledVX               vdot as RescaledFirstOrder;
///                           xdot = -((alpha-1)/t)(x - v)
///   CoupledVXNonsmooth      CoupledVX with grad f replaced by the
///                           subdifferential, advanced by proximal steps
enum class DynamicsKind {
    SdTikhonov,
    RescaledFirstOrder,
    InertialImplicitHessian,
    InertialExplicitHessian,
    AvdBaseline,
    CoupledVX,
    CoupledVXNonsmooth
};

std::string to_string(DynamicsKind k);

struct DynamicsSpec {
    DynamicsKind kind = DynamicsKind::SdTikhonov;
    ObjectiveProblem problem;
    TikhonovSchedule schedule;
    double alpha = 3.0;
    double beta = 1.0;        // explicit Hessian damping coefficient
    double delta_visc = 3.0;  // explicit viscous damping coefficient
    double t0 = 1.0;
    Vec x0;
    std::optional<Vec> v0;  // initial velocity of the second-order systems

    /// Throws validation_error / unsupported_operation on inconsistent specs.
    void validate() const;

    bool second_order() const {
        return kind == DynamicsKind::InertialImplicitHessian ||
               kind == DynamicsKind::InertialExplicitHessian || kind == DynamicsKind::AvdBaseline;
    }
    bool coupled() const {
        return kind == DynamicsKind::CoupledVX || kind == DynamicsKind::CoupledVXNonsmooth;
    }
    int phase_dim() const;
    /// Packed initial phase state: x | [x, xdot] | [v, x].
    Vec initial_state() const;

    /// True when the parameters satisfy the hypotheses of the convergence
    /// theorems for the second-order systems (alpha > 3, delta > 1 for the
    /// delta/t family; alpha > 1 for the inverse-power family).
    bool theorem_grade() const;
};

Vec rhs_sd_tikhonov(const DynamicsSpec& spec, double t, const Vec& x);
Vec rhs_rescaled_first_order(const DynamicsSpec& spec, double t, const Vec& v);
/// Returns the acceleration xddot.
Vec rhs_inertial_implicit_hessian(const DynamicsSpec& spec, double t, const Vec& x,
                                  const Vec& xdot);
Vec rhs_inertial_explicit_hessian(const DynamicsSpec& spec, double t, const Vec& x,
                                  const Vec& xdot);
Vec rhs_avd_baseline(const DynamicsSpec& spec, double t, const Vec& x, const Vec& xdot);
/// Returns (vdot, xdot).
std::pair<Vec, Vec> rhs_coupled_vx(const DynamicsSpec& spec, double t, const Vec& v, const Vec& x);

/// Packed phase-space right-hand side used by the ODE integrators.
Vec phase_rhs(const DynamicsSpec& spec, double t, const Vec& state);

/// Largest admissible proximal step at time t.
double nonsmooth_step_max(const DynamicsSpec& spec, double t);

/// One semi-implicit proximal step of the coupled system: the Tikhonov term
/// is handled implicitly-linearly, the subdifferential by a backward
/// (proximal) step, and the averaging equation by implicit Euler.
/// Coefficients are frozen at the left endpoint t. Returns (v+, x+).
std::pair<Vec, Vec> nonsmooth_step(const DynamicsSpec& spec, double t, const Vec& v, const Vec& x,
                                   double h);

}  // namespace tikflow
