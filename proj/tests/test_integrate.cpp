#include <doctest.h>

#include <cmath>

#include "tikflow/errors.hpp"
#include "tikflow/integrate.hpp"
#include "tikflow/problem.hpp"

using namespace tikflow;

namespace {

DynamicsSpec sd_spec(ObjectiveProblem p, TikhonovSchedule s, Vec x0, double t0 = 1.0) {
    return DynamicsSpec{.kind = DynamicsKind::SdTikhonov,
                        .problem = std::move(p),
                        .schedule = s,
                        .t0 = t0,
                        .x0 = std::move(x0)};
}

}  // namespace

TEST_CASE("log grid endpoints and monotonicity") {
    const auto g = log_grid(1.0, 1e3, 100);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 1e3);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 10), validation_error);
}

TEST_CASE("exponential decay reference solution") {
    // xdot = -x with x(1) = 1: x(2) = exp(-1)
    auto spec = sd_spec(problems::quadratic(Vec{1.0}, Vec{0.0}), TikhonovSchedule::zero(),
                        Vec{1.0});
    IntegratorConfig cfg;
    cfg.t_end = 2.0;
    cfg.samples = 50;
    const auto rec = integrate(spec, cfg);
    CHECK(std::abs(rec.states.back()[0] - std::exp(-1.0)) <= 1e-7);
    // interpolated samples against the exact flow (dense output is a cubic
    // Hermite, one order below the stepper)
    for (std::size_t k = 0; k < rec.size(); ++k)
        CHECK(std::abs(rec.states[k][0] - std::exp(-(rec.times[k] - 1.0))) <= 1e-6);
}

TEST_CASE("equilibrium initial state stays put") {
    IntegratorConfig cfg;
    cfg.t_end = 50.0;
    auto sd = sd_spec(problems::f2(), TikhonovSchedule::zero(), Vec{0.5, 0.5});
    const auto rec = integrate(sd, cfg);
    double dev = 0.0;
    for (const auto& x : rec.states) dev = std::max(dev, dist(x, {0.5, 0.5}));
    CHECK(dev <= cfg.abs_tol * 10.0);

    DynamicsSpec inert{.kind = DynamicsKind::InertialImplicitHessian,
                       .problem = problems::f2(),
                       .schedule = TikhonovSchedule::zero(),
                       .alpha = 3.0,
                       .t0 = 1.0,
                       .x0 = Vec{0.5, 0.5}};
    const auto rec2 = integrate(inert, cfg);
    dev = 0.0;
    for (const auto& x : rec2.states) dev = std::max(dev, dist(x, {0.5, 0.5}));
    CHECK(dev <= cfg.abs_tol * 10.0);
}

TEST_CASE("delta/t benchmark against a tiny-step fixed RK4 reference") {
    auto spec = sd_spec(problems::f2(), TikhonovSchedule::delta_over_t(2.0), zeros(2));
    IntegratorConfig cfg;
    cfg.t_end = 1e3;
    const auto rec = integrate(spec, cfg);
    CHECK(rec.dist_min_norm.back() <= 1e-2);

    IntegratorConfig ref;
    ref.method = IntegratorMethod::FixedRK4;
    ref.fixed_step = 1e-3;
    ref.t_end = 1e3;
    ref.samples = 2;
    const auto reference = integrate(spec, ref);
    CHECK(dist(rec.states.back(), reference.states.back()) <= 1e-6);
}

TEST_CASE("fixed RK4 observed order at least 3.8") {
    auto spec = sd_spec(problems::quadratic(Vec{1.0}, Vec{0.0}), TikhonovSchedule::zero(),
                        Vec{1.0});
    IntegratorConfig cfg;
    cfg.method = IntegratorMethod::FixedRK4;
    cfg.t_end = 2.0;
    cfg.samples = 2;
    const double exact = std::exp(-1.0);
    double prev = 0.0;
    for (int i = 0; i < 3; ++i) {
        cfg.fixed_step = 0.02 / (1 << i);
        const double err = std::abs(integrate(spec, cfg).states.back()[0] - exact);
        if (i > 0) CHECK(std::log2(prev / err) >= 3.8);
        prev = err;
    }
}

TEST_CASE("adaptive and fixed integrators agree on smooth benchmarks") {
    IntegratorConfig ad;
    ad.t_end = 10.0;
    ad.samples = 20;
    IntegratorConfig fx = ad;
    fx.method = IntegratorMethod::FixedRK4;
    fx.fixed_step = 1e-3;

    auto sd = sd_spec(problems::f2(), TikhonovSchedule::delta_over_t(2.0), Vec{1.0, -1.0});
    DynamicsSpec inert{.kind = DynamicsKind::InertialImplicitHessian,
                       .problem = problems::f1(),
                       .schedule = TikhonovSchedule::inverse_power(0.5),
                       .alpha = 3.5,
                       .t0 = 1.0,
                       .x0 = zeros(2)};
    for (const auto& spec : {sd, inert}) {
        const Vec a = integrate(spec, ad).states.back();
        const Vec b = integrate(spec, fx).states.back();
        CHECK(dist(a, b) <= 10.0 * ad.rel_tol * (1.0 + norm(a)));
    }
}

TEST_CASE("proximal stepper converges to the adaptive trajectory on smooth problems") {
    DynamicsSpec coupled{.kind = DynamicsKind::CoupledVX,
                         .problem = problems::f2(),
                         .schedule = TikhonovSchedule::delta_over_t(2.0),
                         .alpha = 3.0,
                         .t0 = 1.0,
                         .x0 = Vec{1.0, -0.5}};
    IntegratorConfig ad;
    ad.t_end = 20.0;
    ad.samples = 10;
    const Vec ref = integrate(coupled, ad).states.back();

    IntegratorConfig px = ad;
    px.method = IntegratorMethod::ProximalSemiImplicit;
    std::vector<double> errs;
    for (int i = 0; i < 4; ++i) {
        px.prox_step_fraction = 0.02 / (1 << i);
        errs.push_back(dist(integrate(coupled, px).states.back(), ref));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
    // observed order from the asymptotic pair
    CHECK(std::log2(errs[2] / errs[3]) >= 0.95);
}

TEST_CASE("f is nonincreasing along the pure steepest descent flow") {
    auto spec = sd_spec(problems::f2(), TikhonovSchedule::zero(), Vec{2.0, -3.0});
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    const auto rec = integrate(spec, cfg);
    for (std::size_t k = 1; k < rec.size(); ++k)
        CHECK(rec.f_gap[k] <= rec.f_gap[k - 1] + 1e-10);
}

TEST_CASE("step exhaustion reports an integration failure") {
    auto spec = sd_spec(problems::f2(), TikhonovSchedule::delta_over_t(2.0), Vec{1.0, 1.0});
    IntegratorConfig cfg;
    cfg.t_end = 1e3;
    cfg.max_steps = 5;
    CHECK_THROWS_AS(integrate(spec, cfg), integration_failure);
}

TEST_CASE("blowup is detected with the failure time") {
    // concave "objective": xdot = -grad f - 0 = +x explodes as e^t
    ObjectiveProblem runaway("runaway", 1, [](const Vec& x) { return -0.5 * x[0] * x[0]; });
    runaway.with_gradient([](const Vec& x) { return Vec{-x[0]}; });
    auto spec = sd_spec(runaway, TikhonovSchedule::zero(), Vec{1.0});
    IntegratorConfig cfg;
    cfg.t_end = 1e4;
    cfg.samples = 10;
    try {
        integrate(spec, cfg);
        FAIL("expected integration_failure");
    } catch (const integration_failure& e) {
        CHECK(e.time() > 100.0);  // exp(t) overflows near t ~ 710
        CHECK(e.time() < 1e3);
    }
}

TEST_CASE("domain exit is reported after retries") {
    // f(x) = x + const on (-1, inf): the flow xdot = -1 exits at t = 2
    ObjectiveProblem line("line", 1, [](const Vec& x) { return x[0]; });
    line.with_gradient([](const Vec&) { return Vec{1.0}; }).with_domain_lower(Vec{-1.0});
    auto spec = sd_spec(line, TikhonovSchedule::zero(), Vec{0.0});
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.samples = 10;
    try {
        integrate(spec, cfg);
        FAIL("expected integration_failure");
    } catch (const integration_failure& e) {
        CHECK(e.time() == doctest::Approx(2.0).epsilon(0.02));
    }
}

TEST_CASE("method and kind compatibility") {
    DynamicsSpec ns{.kind = DynamicsKind::CoupledVXNonsmooth,
                    .problem = problems::abs_affine(Vec{1.0, 1.0}, 1.0),
                    .schedule = TikhonovSchedule::delta_over_t(2.0),
                    .alpha = 3.5,
                    .t0 = 1.0,
                    .x0 = zeros(2)};
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    CHECK_THROWS_AS(integrate(ns, cfg), validation_error);  // needs the proximal stepper

    auto sd = sd_spec(problems::f2(), TikhonovSchedule::zero(), zeros(2));
    cfg.method = IntegratorMethod::ProximalSemiImplicit;
    CHECK_THROWS_AS(integrate(sd, cfg), validation_error);  // not a coupled system
}

TEST_CASE("refinement contract: halving rel_tol moves the endpoint by at most 10x tol") {
    auto spec = sd_spec(problems::f2(), TikhonovSchedule::delta_over_t(2.0), Vec{2.0, -3.0});
    IntegratorConfig a;
    a.t_end = 100.0;
    a.samples = 2;
    a.rel_tol = 1e-6;
    a.abs_tol = 1e-9;
    IntegratorConfig b = a;
    b.rel_tol = 5e-7;
    const Vec xa = integrate(spec, a).states.back();
    const Vec xb = integrate(spec, b).states.back();
    CHECK(dist(xa, xb) <= 10.0 * a.rel_tol * (1.0 + norm(xa)));
}

TEST_CASE("explicit Hessian system approaches the minimum norm solution") {
    DynamicsSpec spec{.kind = DynamicsKind::InertialExplicitHessian,
                      .problem = problems::f2(),
                      .schedule = TikhonovSchedule::inverse_power(0.5),
                      .beta = 1.0,
                      .delta_visc = 3.0,
                      .t0 = 1.0,
                      .x0 = Vec{2.0, -3.0}};
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    const auto rec = integrate(spec, cfg);
    // tracks the viscosity curve, whose offset at eps(T) = 0.1 is ~0.035
    CHECK(rec.dist_min_norm.back() <= 0.1);
    CHECK(rec.dist_min_norm.back() < rec.dist_min_norm.front());
}

TEST_CASE("sample times reproduce the log grid") {
    auto spec = sd_spec(problems::f2(), TikhonovSchedule::zero(), Vec{1.0, 0.0});
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    cfg.samples = 37;
    const auto rec = integrate(spec, cfg);
    const auto grid = log_grid(1.0, 100.0, 37);
    REQUIRE(rec.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(rec.times[k] == doctest::Approx(grid[k]).epsilon(1e-14));
}

TEST_CASE("diagnostics: best-seen fallback and eps columns") {
    ObjectiveProblem nomin("shifted", 1, [](const Vec& x) { return x[0] * x[0]; });
    nomin.with_gradient([](const Vec& x) { return Vec{2.0 * x[0]}; });
    auto spec = sd_spec(nomin, TikhonovSchedule::zero(), Vec{1.0});
    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    cfg.samples = 30;
    const auto rec = integrate(spec, cfg);
    CHECK(rec.f_gap_vs_best_seen);
    double lo = 1e300;
    for (double g : rec.f_gap) {
        CHECK(g >= 0.0);
        lo = std::min(lo, g);
    }
    CHECK(lo == 0.0);
    for (double d : rec.dist_min_norm) CHECK(std::isnan(d));

    // composed eps for the second-order system
    DynamicsSpec inert{.kind = DynamicsKind::InertialImplicitHessian,
                       .problem = problems::f2(),
                       .schedule = TikhonovSchedule::delta_over_t(1.0),
                       .alpha = 3.0,
                       .t0 = 2.0,
                       .x0 = zeros(2)};
    IntegratorConfig c2;
    c2.t_end = 20.0;
    c2.samples = 5;
    const auto rec2 = integrate(inert, c2);
    CHECK(rec2.eps_value.front() == doctest::Approx(1.0));  // 2 delta (alpha-1)/t^2 at t=2
}
