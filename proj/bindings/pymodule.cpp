#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tikflow/analysis.hpp"
#include "tikflow/csv.hpp"
#include "tikflow/dynamics.hpp"
#include "tikflow/errors.hpp"
#include "tikflow/integrate.hpp"
#include "tikflow/problem.hpp"
#include "tikflow/schedule.hpp"
#include "tikflow/verify.hpp"

namespace py = pybind11;
using namespace tikflow;

namespace {

DynamicsSpec make_spec(DynamicsKind kind, const ObjectiveProblem& problem,
                       const TikhonovSchedule& schedule, double alpha, double beta,
                       double delta_visc, double t0, const Vec& x0,
                       const std::optional<Vec>& v0) {
    DynamicsSpec spec{.kind = kind,
                      .problem = problem,
                      .schedule = schedule,
                      .alpha = alpha,
                      .beta = beta,
                      .delta_visc = delta_visc,
                      .t0 = t0,
                      .x0 = x0,
                      .v0 = v0};
    spec.validate();
    return spec;
}

}  // namespace

PYBIND11_MODULE(_tikflow, m) {
    m.doc() = "Tikhonov-regularized gradient flow laboratory";

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<unsupported_operation>(m, "UnsupportedOperation", PyExc_TypeError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

    py::enum_<ScheduleFamily>(m, "ScheduleFamily")
        .value("DeltaOverT", ScheduleFamily::DeltaOverT)
        .value("InversePower", ScheduleFamily::InversePower)
        .value("Constant", ScheduleFamily::Constant)
        .value("Zero", ScheduleFamily::Zero);

    py::class_<TikhonovSchedule>(m, "TikhonovSchedule")
        .def_static("delta_over_t", &TikhonovSchedule::delta_over_t, py::arg("delta"),
                    py::arg("t_ref") = 1.0)
        .def_static("inverse_power", &TikhonovSchedule::inverse_power, py::arg("r"),
                    py::arg("t_ref") = 1.0)
        .def_static("constant", &TikhonovSchedule::constant, py::arg("c"), py::arg("t_ref") = 1.0)
        .def_static("zero", &TikhonovSchedule::zero, py::arg("t_ref") = 1.0)
        .def_property_readonly("family", &TikhonovSchedule::family)
        .def_property_readonly("t_ref", &TikhonovSchedule::t_ref)
        .def_property_readonly("parameter", &TikhonovSchedule::parameter)
        .def("epsilon", &TikhonovSchedule::epsilon)
        .def("epsilon_dot", &TikhonovSchedule::epsilon_dot)
        .def("gamma", &TikhonovSchedule::gamma)
        .def("log_gamma", &TikhonovSchedule::log_gamma)
        .def("composed", [](const TikhonovSchedule& s, double alpha) {
            return composed_schedule(s, alpha);
        });

    py::class_<ComposedSchedule>(m, "ComposedSchedule")
        .def("tau", &ComposedSchedule::tau)
        .def("tau_dot", &ComposedSchedule::tau_dot)
        .def("epsilon", &ComposedSchedule::epsilon);

    py::class_<ObjectiveProblem>(m, "ObjectiveProblem")
        .def_property_readonly("name", &ObjectiveProblem::name)
        .def_property_readonly("dim", &ObjectiveProblem::dim)
        .def("value", &ObjectiveProblem::value)
        .def("gradient", &ObjectiveProblem::gradient)
        .def("prox", &ObjectiveProblem::prox, py::arg("lam"), py::arg("x"))
        .def("hess_vec", &ObjectiveProblem::hess_vec)
        .def_property_readonly("has_gradient", &ObjectiveProblem::has_gradient)
        .def_property_readonly("has_prox", &ObjectiveProblem::has_prox)
        .def_property_readonly("has_hess_vec", &ObjectiveProblem::has_hess_vec)
        .def_property_readonly("lipschitz_grad", &ObjectiveProblem::lipschitz_grad)
        .def_property_readonly("min_value", &ObjectiveProblem::min_value)
        .def_property_readonly("min_norm_solution",
                               [](const ObjectiveProblem& p) { return p.min_norm_solution(); })
        .def("in_domain", &ObjectiveProblem::in_domain);

    m.def("f1", &problems::f1);
    m.def("f2", &problems::f2);
    m.def("quadratic", &problems::quadratic, py::arg("a_diag"), py::arg("b"));
    m.def("abs_affine", &problems::abs_affine, py::arg("a"), py::arg("c"));

    py::enum_<DynamicsKind>(m, "DynamicsKind")
        .value("SdTikhonov", DynamicsKind::SdTikhonov)
        .value("RescaledFirstOrder", DynamicsKind::RescaledFirstOrder)
        .value("InertialImplicitHessian", DynamicsKind::InertialImplicitHessian)
        .value("InertialExplicitHessian", DynamicsKind::InertialExplicitHessian)
        .value("AvdBaseline", DynamicsKind::AvdBaseline)
        .value("CoupledVX", DynamicsKind::CoupledVX)
        .value("CoupledVXNonsmooth", DynamicsKind::CoupledVXNonsmooth);

    py::class_<DynamicsSpec>(m, "DynamicsSpec")
        .def(py::init(&make_spec), py::arg("kind"), py::arg("problem"), py::arg("schedule"),
             py::arg("alpha") = 3.0, py::arg("beta") = 1.0, py::arg("delta_visc") = 3.0,
             py::arg("t0") = 1.0, py::arg("x0") = Vec{}, py::arg("v0") = std::nullopt)
        .def_readonly("kind", &DynamicsSpec::kind)
        .def_readonly("alpha", &DynamicsSpec::alpha)
        .def_readonly("t0", &DynamicsSpec::t0)
        .def_readonly("x0", &DynamicsSpec::x0)
        .def("theorem_grade", &DynamicsSpec::theorem_grade);

    m.def("rhs_sd_tikhonov", &rhs_sd_tikhonov);
    m.def("rhs_rescaled_first_order", &rhs_rescaled_first_order);
    m.def("rhs_inertial_implicit_hessian", &rhs_inertial_implicit_hessian);
    m.def("rhs_inertial_explicit_hessian", &rhs_inertial_explicit_hessian);
    m.def("rhs_coupled_vx", &rhs_coupled_vx);
    m.def("nonsmooth_step", &nonsmooth_step);
    m.def("nonsmooth_step_max", &nonsmooth_step_max);

    py::enum_<IntegratorMethod>(m, "IntegratorMethod")
        .value("AdaptiveRK", IntegratorMethod::AdaptiveRK)
        .value("FixedRK4", IntegratorMethod::FixedRK4)
        .value("ProximalSemiImplicit", IntegratorMethod::ProximalSemiImplicit);

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def_readwrite("method", &IntegratorConfig::method)
        .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
        .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
        .def_readwrite("max_steps", &IntegratorConfig::max_steps)
        .def_readwrite("t_end", &IntegratorConfig::t_end)
        .def_readwrite("samples", &IntegratorConfig::samples)
        .def_readwrite("fixed_step", &IntegratorConfig::fixed_step)
        .def_readwrite("prox_step_fraction", &IntegratorConfig::prox_step_fraction);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("times", &TrajectoryRecord::times)
        .def_readonly("states", &TrajectoryRecord::states)
        .def_readonly("companions", &TrajectoryRecord::companions)
        .def_readonly("f_gap", &TrajectoryRecord::f_gap)
        .def_readonly("grad_norm", &TrajectoryRecord::grad_norm)
        .def_readonly("dist_min_norm", &TrajectoryRecord::dist_min_norm)
        .def_readonly("eps_value", &TrajectoryRecord::eps_value)
        .def_readonly("energy", &TrajectoryRecord::energy)
        .def_readonly("min_reference", &TrajectoryRecord::min_reference)
        .def_readonly("f_gap_vs_best_seen", &TrajectoryRecord::f_gap_vs_best_seen)
        .def("__len__", &TrajectoryRecord::size)
        .def("to_csv", [](const TrajectoryRecord& rec) {
            std::ostringstream ss;
            write_trajectory_csv(ss, rec);
            return ss.str();
        });

    m.def("integrate", &integrate, py::arg("spec"), py::arg("config") = IntegratorConfig());

    py::class_<ViscosityPoint>(m, "ViscosityPoint")
        .def_readonly("eps", &ViscosityPoint::eps)
        .def_readonly("point", &ViscosityPoint::point)
        .def_readonly("residual", &ViscosityPoint::residual);

    m.def(
        "viscosity_point",
        [](const ObjectiveProblem& p, double eps) { return viscosity_point(p, eps); },
        py::arg("problem"), py::arg("eps"));
    m.def("lyapunov_energy", &lyapunov_energy);
    m.def("attach_energy", &attach_energy);
    m.def("average_trajectory", &average_trajectory);
    m.def("jensen_gap", &jensen_gap);

    py::enum_<Observable>(m, "Observable")
        .value("FGap", Observable::FGap)
        .value("GradNorm", Observable::GradNorm)
        .value("DistMinNorm", Observable::DistMinNorm)
        .value("EnergyE", Observable::EnergyE);

    py::class_<RateFit>(m, "RateFit")
        .def_readonly("slope", &RateFit::slope)
        .def_readonly("intercept", &RateFit::intercept)
        .def_readonly("r_squared", &RateFit::r_squared)
        .def_readonly("n_samples", &RateFit::n_samples);

    m.def("fit_rate", &fit_rate);
    m.def("fit_power_law", &fit_power_law, py::arg("times"), py::arg("values"), py::arg("t_lo"),
          py::arg("t_hi"), py::arg("min_samples") = 20);

    py::class_<LyapunovBoundReport>(m, "LyapunovBoundReport")
        .def_readonly("samples_checked", &LyapunovBoundReport::samples_checked)
        .def_readonly("energy_bound_violations", &LyapunovBoundReport::energy_bound_violations)
        .def_readonly("distance_bound_violations",
                      &LyapunovBoundReport::distance_bound_violations)
        .def_readonly("max_relative_excess", &LyapunovBoundReport::max_relative_excess)
        .def("passed", &LyapunovBoundReport::pass);
    m.def("check_lyapunov_bound", &check_lyapunov_bound);

    py::class_<EquivalenceReport>(m, "EquivalenceReport")
        .def_readonly("max_discrepancy", &EquivalenceReport::max_discrepancy)
        .def_readonly("tolerance", &EquivalenceReport::tolerance)
        .def_readonly("first_divergence_time", &EquivalenceReport::first_divergence_time)
        .def("passed", &EquivalenceReport::pass);
    m.def("equivalence_check", &equivalence_check);

    py::class_<CriterionResult>(m, "CriterionResult")
        .def_readonly("index", &CriterionResult::index)
        .def_readonly("name", &CriterionResult::name)
        .def_readonly("passed", &CriterionResult::pass)
        .def_readonly("seconds", &CriterionResult::seconds)
        .def_readonly("detail", &CriterionResult::detail);

    m.def(
        "run_acceptance",
        [](bool quick, double tol_scale) {
            AcceptanceOptions opt;
            opt.quick = quick;
            opt.tol_scale = tol_scale;
            return run_acceptance(opt, nullptr);
        },
        py::arg("quick") = false, py::arg("tol_scale") = 1.0);

    m.def("log_grid", &log_grid);
}
