#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "tikflow/dynamics.hpp"
#include "tikflow/errors.hpp"
#include "tikflow/linalg.hpp"
#include "tikflow/problem.hpp"

using namespace tikflow;

namespace {

DynamicsSpec spec_for(DynamicsKind kind, ObjectiveProblem p, TikhonovSchedule s,
                      double alpha = 3.0) {
    return DynamicsSpec{.kind = kind,
                        .problem = std::move(p),
                        .schedule = s,
                        .alpha = alpha,
                        .t0 = 1.0,
                        .x0 = zeros(2)};
}

}  // namespace

TEST_CASE("sd tikhonov right-hand side") {
    auto spec = spec_for(DynamicsKind::SdTikhonov, problems::f2(),
                         TikhonovSchedule::constant(1.0));
    const Vec r = rhs_sd_tikhonov(spec, 2.0, {0.0, 0.0});
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));

    spec.schedule = TikhonovSchedule::zero();
    CHECK(norm(rhs_sd_tikhonov(spec, 2.0, {0.5, 0.5})) == doctest::Approx(0.0));

    // 1-D half square: -x - x at eps(1) = 1
    auto one_d = spec_for(DynamicsKind::SdTikhonov, problems::quadratic(Vec{1.0}, Vec{0.0}),
                          TikhonovSchedule::delta_over_t(1.0));
    one_d.x0 = Vec{1.0};
    CHECK(rhs_sd_tikhonov(one_d, 1.0, {1.0})[0] == doctest::Approx(-2.0));
}

TEST_CASE("rescaled first-order right-hand side") {
    auto spec = spec_for(DynamicsKind::RescaledFirstOrder, problems::f2(),
                         TikhonovSchedule::zero(), 3.0);
    const Vec r = rhs_rescaled_first_order(spec, 2.0, {0.0, 0.0});
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));
    CHECK(norm(rhs_rescaled_first_order(spec, 7.0, {0.5, 0.5})) == doctest::Approx(0.0));

    auto one_d = spec_for(DynamicsKind::RescaledFirstOrder,
                          problems::quadratic(Vec{1.0}, Vec{0.0}),
                          TikhonovSchedule::delta_over_t(1.0), 3.0);
    one_d.x0 = Vec{1.0};
    CHECK(rhs_rescaled_first_order(one_d, 2.0, {1.0})[0] == doctest::Approx(-2.0));
}

TEST_CASE("implicit Hessian right-hand side") {
    auto spec = spec_for(DynamicsKind::InertialImplicitHessian, problems::f2(),
                         TikhonovSchedule::zero(), 3.0);
    CHECK(norm(rhs_inertial_implicit_hessian(spec, 1.0, {0.5, 0.5}, {0.0, 0.0})) ==
          doctest::Approx(0.0));

    spec.schedule = TikhonovSchedule::delta_over_t(2.0);
    const Vec r = rhs_inertial_implicit_hessian(spec, 2.0, {0.0, 0.0}, {0.0, 0.0});
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));
}

TEST_CASE("implicit Hessian expansion identities on random inputs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> ut(1.0, 50.0);

    const double alpha = 3.5, delta = 2.0, r = 0.6;
    auto dt = spec_for(DynamicsKind::InertialImplicitHessian, problems::f2(),
                       TikhonovSchedule::delta_over_t(delta), alpha);
    auto ip = spec_for(DynamicsKind::InertialImplicitHessian, problems::f2(),
                       TikhonovSchedule::inverse_power(r), alpha);
    const auto f2 = problems::f2();

    for (int i = 0; i < 100; ++i) {
        const double t = ut(rng);
        const Vec x{u(rng), u(rng)};
        const Vec xd{u(rng), u(rng)};
        Vec w = x;
        axpy(w, t / (alpha - 1.0), xd);

        // delta/t: damping (alpha + 2 delta)/t, Tikhonov on x only 2 delta (alpha-1)/t^2
        {
            const Vec got = rhs_inertial_implicit_hessian(dt, t, x, xd);
            const Vec g = f2.gradient(w);
            const double damp = (alpha + 2.0 * delta) / t;
            const double tik = 2.0 * delta * (alpha - 1.0) / (t * t);
            for (int j = 0; j < 2; ++j) {
                const double want = -damp * xd[j] - g[j] - tik * x[j];
                CHECK(std::abs(got[j] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
            }
        }
        // 1/t^r: damping alpha/t + 2^r (alpha-1)^{r-1}/t^{2r-1}, Tikhonov 2^r (alpha-1)^r/t^{2r}
        {
            const Vec got = rhs_inertial_implicit_hessian(ip, t, x, xd);
            const Vec g = f2.gradient(w);
            const double damp = alpha / t + std::pow(2.0, r) * std::pow(alpha - 1.0, r - 1.0) /
                                                std::pow(t, 2.0 * r - 1.0);
            const double tik =
                std::pow(2.0, r) * std::pow(alpha - 1.0, r) / std::pow(t, 2.0 * r);
            for (int j = 0; j < 2; ++j) {
                const double want = -damp * xd[j] - g[j] - tik * x[j];
                CHECK(std::abs(got[j] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
            }
        }
    }
}

TEST_CASE("explicit Hessian right-hand side") {
    // asymptotic equilibrium of f2 at the minimizer, t = 1e8
    auto spec = spec_for(DynamicsKind::InertialExplicitHessian, problems::f2(),
                         TikhonovSchedule::delta_over_t(1.0));
    spec.delta_visc = 3.0;
    spec.beta = 1.0;
    CHECK(norm(rhs_inertial_explicit_hessian(spec, 1e8, {0.5, 0.5}, {0.0, 0.0})) <= 1e-7);

    // 1-D half square, eps(t) = 1/t at t=1: -3 - 1 - 1 - 1 = -6
    auto one_d = spec_for(DynamicsKind::InertialExplicitHessian,
                          problems::quadratic(Vec{1.0}, Vec{0.0}),
                          TikhonovSchedule::delta_over_t(1.0));
    one_d.delta_visc = 3.0;
    one_d.beta = 1.0;
    one_d.x0 = Vec{1.0};
    CHECK(rhs_inertial_explicit_hessian(one_d, 1.0, {1.0}, {1.0})[0] == doctest::Approx(-6.0));

    // the ones-matrix Hessian of f2 annihilates (1,-1)
    const auto f2 = problems::f2();
    const Vec hv = f2.hess_vec({0.3, -0.8}, {1.0, -1.0});
    CHECK(norm(hv) == doctest::Approx(0.0));
}

TEST_CASE("coupled system right-hand side") {
    auto spec = spec_for(DynamicsKind::CoupledVX, problems::f2(), TikhonovSchedule::zero(), 3.0);
    const auto [vd0, xd0] = rhs_coupled_vx(spec, 5.0, {0.5, 0.5}, {0.5, 0.5});
    CHECK(norm(vd0) == doctest::Approx(0.0));
    CHECK(norm(xd0) == doctest::Approx(0.0));

    const auto [vd, xd] = rhs_coupled_vx(spec, 2.0, {1.0, 0.0}, {0.0, 0.0});
    CHECK(xd[0] == doctest::Approx(1.0));
    CHECK(xd[1] == doctest::Approx(0.0));

    // v-component equals the rescaled first-order rhs
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    spec.schedule = TikhonovSchedule::delta_over_t(2.0);
    for (int i = 0; i < 20; ++i) {
        const double t = 1.0 + i;
        const Vec v{u(rng), u(rng)};
        const Vec x{u(rng), u(rng)};
        const auto [vdot, xdot] = rhs_coupled_vx(spec, t, v, x);
        CHECK(dist(vdot, rhs_rescaled_first_order(spec, t, v)) == doctest::Approx(0.0));
    }
}

TEST_CASE("Taylor consistency of implicit vs explicit Hessian damping on quadratics") {
    const auto q = problems::quadratic(Vec{1.0, 3.0}, Vec{0.5, -1.0});
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const Vec x{u(rng), u(rng)};
        const Vec xd{u(rng), u(rng)};
        const double beta = 0.1 + 0.05 * i;
        Vec shifted = x;
        axpy(shifted, beta, xd);
        const Vec lhs = q.gradient(shifted);
        Vec rhs = q.gradient(x);
        const Vec hv = q.hess_vec(x, xd);
        axpy(rhs, beta, hv);
        CHECK(dist(lhs, rhs) <= 1e-12 * std::max(1.0, norm(lhs)));
    }
}

TEST_CASE("equilibrium preservation with the zero schedule") {
    const auto f2 = problems::f2();
    const Vec star{0.5, 0.5};
    const Vec zero2{0.0, 0.0};
    const auto z = TikhonovSchedule::zero();

    CHECK(norm(rhs_sd_tikhonov(spec_for(DynamicsKind::SdTikhonov, f2, z), 3.0, star)) <= 1e-12);
    CHECK(norm(rhs_rescaled_first_order(spec_for(DynamicsKind::RescaledFirstOrder, f2, z), 3.0,
                                        star)) <= 1e-12);
    CHECK(norm(rhs_inertial_implicit_hessian(
              spec_for(DynamicsKind::InertialImplicitHessian, f2, z), 3.0, star, zero2)) <=
          1e-12);
    CHECK(norm(rhs_inertial_explicit_hessian(
              spec_for(DynamicsKind::InertialExplicitHessian, f2, z), 3.0, star, zero2)) <=
          1e-12);
    CHECK(norm(rhs_avd_baseline(spec_for(DynamicsKind::AvdBaseline, f2, z), 3.0, star, zero2)) <=
          1e-12);
    const auto [vd, xd] =
        rhs_coupled_vx(spec_for(DynamicsKind::CoupledVX, f2, z), 3.0, star, star);
    CHECK(norm(vd) <= 1e-12);
    CHECK(norm(xd) <= 1e-12);
}

TEST_CASE("nonsmooth step: soft threshold shrinkage and fixed point") {
    auto spec = spec_for(DynamicsKind::CoupledVXNonsmooth, problems::abs_affine(Vec{1.0}, 0.0),
                         TikhonovSchedule::zero(), 3.0);
    spec.x0 = Vec{0.0};

    // eps = 0: v+ = prox_{lambda |.|}(v) moves toward 0 by exactly lambda
    const double t = 2.0, h = 0.05;
    const double lambda = h * t / (spec.alpha - 1.0);
    const auto [vp, xp] = nonsmooth_step(spec, t, {5.0}, {1.0}, h);
    CHECK(vp[0] == doctest::Approx(5.0 - lambda).epsilon(1e-14));

    // 0 in argmin |.|: (0,0) is a fixed point
    const auto [vf, xf] = nonsmooth_step(spec, t, {0.0}, {0.0}, h);
    CHECK(vf[0] == 0.0);
    CHECK(xf[0] == 0.0);
}

TEST_CASE("nonsmooth step agrees with backward Euler to O(h^2) on a smooth quadratic") {
    // coupled system on f2 with delta/t schedule; backward Euler freezes the
    // coefficients at t+h, the proximal step at t, so they differ at O(h^2)
    const auto f2 = problems::f2();
    auto spec = spec_for(DynamicsKind::CoupledVXNonsmooth, f2,
                         TikhonovSchedule::delta_over_t(2.0), 3.0);

    const double t = 4.0;
    const Vec v0{1.5, -0.5}, x0{0.3, 0.2};

    auto backward_euler = [&](double h) {
        const ComposedSchedule cs(spec.schedule, spec.alpha);
        const double te = t + h;
        const double taud = te / (spec.alpha - 1.0);
        const double e = cs.epsilon(te);
        // (I + h taud (A + e I)) v+ = v + h taud b, with A = ones, b = (1,1)
        SymMatrix m(2);
        m(0, 0) = m(1, 1) = 1.0 + h * taud * (1.0 + e);
        m(0, 1) = m(1, 0) = h * taud;
        const Vec rhs{v0[0] + h * taud, v0[1] + h * taud};
        const Vec vp = cholesky_solve(m, rhs);
        const double k = h * (spec.alpha - 1.0) / te;
        Vec xb(2);
        for (int j = 0; j < 2; ++j) xb[j] = (x0[j] + k * vp[j]) / (1.0 + k);
        return std::make_pair(vp, xb);
    };

    double prev = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double h = 0.04 / (1 << i);
        const auto [vp, xp] = nonsmooth_step(spec, t, v0, x0, h);
        const auto [vb, xb] = backward_euler(h);
        const double diff = std::max(dist(vp, vb), dist(xp, xb));
        if (i > 0) {
            const double ratio = prev / diff;
            CHECK(ratio >= 3.0);  // O(h^2): halving h shrinks the gap ~4x
        }
        prev = diff;
    }
}

TEST_CASE("nonsmooth step rejects oversized h") {
    auto spec = spec_for(DynamicsKind::CoupledVXNonsmooth, problems::abs_affine(Vec{1.0}, 0.0),
                         TikhonovSchedule::zero(), 3.0);
    spec.x0 = Vec{0.0};
    const double t = 2.0;
    CHECK(nonsmooth_step_max(spec, t) == doctest::Approx(0.1));
    CHECK_THROWS_AS(nonsmooth_step(spec, t, {1.0}, {1.0}, 0.2), validation_error);
}

TEST_CASE("spec validation") {
    const auto f2 = problems::f2();
    const auto z = TikhonovSchedule::zero();

    auto bad_alpha = spec_for(DynamicsKind::InertialImplicitHessian, f2, z, 1.0);
    CHECK_THROWS_AS(bad_alpha.validate(), validation_error);

    auto bad_t0 = spec_for(DynamicsKind::SdTikhonov, f2, z);
    bad_t0.t0 = 0.0;
    CHECK_THROWS_AS(bad_t0.validate(), validation_error);

    auto bad_dim = spec_for(DynamicsKind::SdTikhonov, f2, z);
    bad_dim.x0 = Vec{1.0};
    CHECK_THROWS_AS(bad_dim.validate(), validation_error);

    auto ns = spec_for(DynamicsKind::CoupledVXNonsmooth,
                       problems::abs_affine(Vec{1.0, 1.0}, 1.0), z, 3.5);
    ns.v0 = Vec{0.1, 0.0};
    CHECK_THROWS_AS(ns.validate(), validation_error);
    ns.v0 = Vec{0.0, 0.0};
    CHECK_NOTHROW(ns.validate());

    auto smooth_needed = spec_for(DynamicsKind::SdTikhonov,
                                  problems::abs_affine(Vec{1.0, 1.0}, 1.0), z);
    CHECK_THROWS_AS(smooth_needed.validate(), unsupported_operation);

    auto f1_outside = spec_for(DynamicsKind::SdTikhonov, problems::f1(),
                               TikhonovSchedule::delta_over_t(2.0));
    f1_outside.x0 = Vec{-2.0, 0.0};
    CHECK_THROWS_AS(f1_outside.validate(), std::domain_error);

    CHECK_THROWS_AS(phase_rhs(ns, 2.0, zeros(4)), unsupported_operation);
}

TEST_CASE("theorem grade flags") {
    const auto f2 = problems::f2();
    CHECK(spec_for(DynamicsKind::InertialImplicitHessian, f2,
                   TikhonovSchedule::delta_over_t(2.0), 3.5)
              .theorem_grade());
    CHECK_FALSE(spec_for(DynamicsKind::InertialImplicitHessian, f2,
                         TikhonovSchedule::delta_over_t(2.0), 2.5)
                    .theorem_grade());
    CHECK(spec_for(DynamicsKind::InertialImplicitHessian, f2,
                   TikhonovSchedule::inverse_power(0.5), 2.0)
              .theorem_grade());
    CHECK_FALSE(spec_for(DynamicsKind::InertialImplicitHessian, f2, TikhonovSchedule::zero(), 3.5)
                    .theorem_grade());
}
