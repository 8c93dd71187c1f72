#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "tikflow/errors.hpp"
#include "tikflow/quadrature.hpp"
#include "tikflow/schedule.hpp"

using namespace tikflow;

namespace {

std::vector<TikhonovSchedule> all_families(double t_ref = 1.0) {
    return {TikhonovSchedule::delta_over_t(2.0, t_ref),
            TikhonovSchedule::inverse_power(0.5, t_ref),
            TikhonovSchedule::constant(0.3, t_ref), TikhonovSchedule::zero(t_ref)};
}

}  // namespace

TEST_CASE("epsilon evaluation") {
    CHECK(TikhonovSchedule::delta_over_t(2.0).epsilon(4.0) == doctest::Approx(0.5));
    CHECK(TikhonovSchedule::inverse_power(0.5).epsilon(4.0) == doctest::Approx(0.5));
    CHECK(TikhonovSchedule::zero().epsilon(17.3) == 0.0);
    CHECK(TikhonovSchedule::constant(0.25).epsilon(123.0) == 0.25);
}

TEST_CASE("epsilon derivative") {
    CHECK(TikhonovSchedule::delta_over_t(2.0).epsilon_dot(4.0) == doctest::Approx(-0.125));
    CHECK(TikhonovSchedule::constant(0.7).epsilon_dot(9.0) == 0.0);
    CHECK(TikhonovSchedule::inverse_power(0.5).epsilon_dot(1.0) == doctest::Approx(-0.5));
}

TEST_CASE("gamma closed forms") {
    // delta/t family: gamma(t) = (t/t1)^delta
    const auto dt = TikhonovSchedule::delta_over_t(2.0, 1.0);
    CHECK(dt.gamma(3.0) == doctest::Approx(9.0).epsilon(1e-14));

    // empty integral at t_ref for every family
    for (const auto& s : all_families(2.0)) CHECK(s.gamma(2.0) == doctest::Approx(1.0));

    // inverse power: int_1^4 s^{-1/2} ds = 2
    const auto ip = TikhonovSchedule::inverse_power(0.5, 1.0);
    CHECK(ip.gamma(4.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
    const double quad =
        integrate_adaptive([&](double s) { return ip.epsilon(s); }, 1.0, 4.0, 1e-13);
    CHECK(ip.log_gamma(4.0) == doctest::Approx(quad).epsilon(1e-12));
}

TEST_CASE("gamma consistency against quadrature for all families") {
    for (const auto& s : all_families()) {
        for (const double t : {1.5, 4.0, 30.0, 700.0}) {
            const double quad = integrate_adaptive(
                [&](double u) { return s.epsilon(u); }, s.t_ref(), t, 1e-12);
            CHECK(std::abs(s.log_gamma(t) - quad) <= 1e-8);
        }
    }
}

TEST_CASE("domain errors") {
    const auto s = TikhonovSchedule::delta_over_t(1.0, 1.0);
    CHECK_THROWS_AS(s.epsilon(0.0), std::domain_error);
    CHECK_THROWS_AS(s.epsilon(-2.0), std::domain_error);
    CHECK_THROWS_AS(s.epsilon_dot(0.0), std::domain_error);
    CHECK_THROWS_AS(s.gamma(0.5), std::domain_error);  // t < t_ref
    CHECK_THROWS_AS(composed_schedule(s, 1.0), std::domain_error);
    CHECK_THROWS_AS(TikhonovSchedule::delta_over_t(0.0), validation_error);
    CHECK_THROWS_AS(TikhonovSchedule::inverse_power(1.0), validation_error);
    CHECK_THROWS_AS(TikhonovSchedule::constant(-0.1), validation_error);
    CHECK_THROWS_AS(TikhonovSchedule::delta_over_t(1.0, 0.0), validation_error);
}

TEST_CASE("monotone nonincreasing on random pairs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (const auto& s : all_families()) {
        for (int i = 0; i < 100; ++i) {
            double a = s.t_ref() * std::pow(10.0, u(rng));
            double b = s.t_ref() * std::pow(10.0, u(rng));
            if (a > b) std::swap(a, b);
            CHECK(s.epsilon(b) <= s.epsilon(a));
            CHECK(s.epsilon_dot(0.5 * (a + b)) <= 0.0);
        }
    }
}

TEST_CASE("vanishing families decay by a factor 1e3 over 1e6") {
    for (const auto& s :
         {TikhonovSchedule::delta_over_t(2.0), TikhonovSchedule::inverse_power(0.6)}) {
        CHECK(s.vanishes());
        CHECK(s.epsilon(1e6 * s.t_ref()) < 1e-3 * s.epsilon(s.t_ref()));
    }
    CHECK_FALSE(TikhonovSchedule::constant(0.5).vanishes());
}

TEST_CASE("derivative matches central differences on a log grid") {
    for (const auto& s : all_families()) {
        for (int k = 0; k <= 20; ++k) {
            const double t = s.t_ref() * std::pow(10.0, 3.0 * k / 20.0);
            const double h = 1e-5 * t;
            const double fd = (s.epsilon(t + h) - s.epsilon(t - h)) / (2.0 * h);
            const double an = s.epsilon_dot(t);
            CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST_CASE("composed schedule") {
    // delta/t with delta=1, alpha=3 at t=2: tau=1, eps=1
    CHECK(composed_schedule(TikhonovSchedule::delta_over_t(1.0), 3.0).epsilon(2.0) ==
          doctest::Approx(1.0));
    // inverse power r=1/2, alpha=3 at t=2: 4^{1/2}/2 = 1
    CHECK(composed_schedule(TikhonovSchedule::inverse_power(0.5), 3.0).epsilon(2.0) ==
          doctest::Approx(1.0));
    CHECK(composed_schedule(TikhonovSchedule::zero(), 2.7).epsilon(5.0) == 0.0);
}

TEST_CASE("composition identity and printed coefficients") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double alpha = 1.0 + u(rng);
        const double t = std::pow(10.0, u(rng));
        const double delta = u(rng);
        const double r = 0.1 + 0.25 * u(rng);

        const auto dt = TikhonovSchedule::delta_over_t(delta);
        const auto ip = TikhonovSchedule::inverse_power(r);
        const double tau = t * t / (2.0 * (alpha - 1.0));
        CHECK(std::abs(composed_schedule(dt, alpha).epsilon(t) - dt.epsilon(tau)) <= 1e-14);
        CHECK(std::abs(composed_schedule(ip, alpha).epsilon(t) - ip.epsilon(tau)) <= 1e-14);

        // coefficients as printed for the two model systems
        const double want_dt = 2.0 * delta * (alpha - 1.0) / (t * t);
        CHECK(composed_schedule(dt, alpha).epsilon(t) ==
              doctest::Approx(want_dt).epsilon(1e-12));
        const double want_ip = std::pow(2.0 * (alpha - 1.0), r) / std::pow(t, 2.0 * r);
        CHECK(composed_schedule(ip, alpha).epsilon(t) ==
              doctest::Approx(want_ip).epsilon(1e-12));
    }
}
