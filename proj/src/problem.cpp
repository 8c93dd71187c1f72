#include "tikflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "tikflow/errors.hpp"
#include "tikflow/linalg.hpp"

namespace tikflow {

ObjectiveProblem::ObjectiveProblem(std::string name, int dim, ValueFn value)
    : name_(std::move(name)), dim_(dim), value_(std::move(value)) {
    if (dim_ <= 0) throw validation_error("problem: dimension must be positive");
    if (!value_) throw validation_error("problem: value oracle required");
}

ObjectiveProblem& ObjectiveProblem::with_gradient(GradFn g) {
    grad_ = std::move(g);
    return *this;
}
ObjectiveProblem& ObjectiveProblem::with_prox(ProxFn p) {
    prox_ = std::move(p);
    return *this;
}
ObjectiveProblem& ObjectiveProblem::with_hess_vec(HessVecFn h) {
    hess_vec_ = std::move(h);
    return *this;
}
ObjectiveProblem& ObjectiveProblem::with_lipschitz_grad(double l) {
    lipschitz_ = l;
    return *this;
}
ObjectiveProblem& ObjectiveProblem::with_min_value(double m) {
    min_value_ = m;
    return *this;
}
ObjectiveProblem& ObjectiveProblem::with_min_norm_solution(Vec x) {
    min_norm_ = std::move(x);
    return *this;
}
ObjectiveProblem& ObjectiveProblem::with_domain_lower(Vec lower) {
    domain_lower_ = std::move(lower);
    return *this;
}

bool ObjectiveProblem::in_domain(const Vec& x) const {
    if (!domain_lower_) return true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= (*domain_lower_)[i] + 1e-9) return false;
    }
    return true;
}

void ObjectiveProblem::check_domain(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw validation_error("problem: point dimension mismatch");
    if (!in_domain(x)) throw std::domain_error("problem '" + name_ + "': point outside domain");
}

double ObjectiveProblem::value(const Vec& x) const {
    check_domain(x);
    return value_(x);
}

Vec ObjectiveProblem::gradient(const Vec& x) const {
    if (!grad_) throw unsupported_operation("problem '" + name_ + "' has no gradient");
    check_domain(x);
    return grad_(x);
}

Vec ObjectiveProblem::prox(double lambda, const Vec& x) const {
    if (!prox_) throw unsupported_operation("problem '" + name_ + "' has no prox");
    if (!(lambda > 0.0)) throw std::domain_error("prox: lambda must be positive");
    if (static_cast<int>(x.size()) != dim_)
        throw validation_error("problem: point dimension mismatch");
    return prox_(lambda, x);
}

Vec ObjectiveProblem::hess_vec(const Vec& x, const Vec& dir) const {
    if (!hess_vec_)
        throw unsupported_operation("problem '" + name_ + "' has no Hessian-vector product");
    check_domain(x);
    return hess_vec_(x, dir);
}

namespace problems {

namespace {

// ln(1 + e^{-u}), stable for both signs of u
double softplus_neg(double u) {
    return u > 0.0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
}

// d/du ln(1 + e^{-u}) = -1/(1 + e^u)
double logistic_grad(double u) { return -1.0 / (1.0 + std::exp(u)); }

// d^2/du^2 ln(1 + e^{-u}) = sigma(u)(1 - sigma(u))
double logistic_curv(double u) {
    const double s = 1.0 / (1.0 + std::exp(-u));
    return s * (1.0 - s);
}

double f1_value_raw(const Vec& p) {
    const double d = p[0] - p[1];
    return softplus_neg(p[0] + p[1]) + d * d + p[1];
}

Vec f1_grad_raw(const Vec& p) {
    const double g = logistic_grad(p[0] + p[1]);
    const double d = 2.0 * (p[0] - p[1]);
    return {g + d, g - d + 1.0};
}

Vec f1_hess_vec_raw(const Vec& p, const Vec& v) {
    const double c = logistic_curv(p[0] + p[1]);
    const double s = c * (v[0] + v[1]);
    const double d = 2.0 * (v[0] - v[1]);
    return {s + d, s - d};
}

bool f1_in_domain(const Vec& p) { return p[0] > -1.0 + 1e-9 && p[1] > -1.0 + 1e-9; }

// Damped Newton for argmin_u f1(u) + ||u - x||^2/(2 lambda), residual <= 1e-10.
Vec f1_prox(double lambda, const Vec& x) {
    Vec u{std::max(x[0], -0.5), std::max(x[1], -0.5)};
    const double tol = 1e-10;
    for (int it = 0; it < 100; ++it) {
        Vec g = f1_grad_raw(u);
        for (int i = 0; i < 2; ++i) g[i] += (u[i] - x[i]) / lambda;
        if (norm(g) <= tol) return u;

        const double c = logistic_curv(u[0] + u[1]);
        SymMatrix h(2);
        h(0, 0) = c + 2.0 + 1.0 / lambda;
        h(0, 1) = h(1, 0) = c - 2.0;
        h(1, 1) = c + 2.0 + 1.0 / lambda;
        const Vec step = cholesky_solve(h, {-g[0], -g[1]});

        // near the solution the objective decrease is below roundoff; take
        // the full Newton step there instead of line searching
        if (norm(g) <= 1e-6) {
            Vec trial{u[0] + step[0], u[1] + step[1]};
            if (f1_in_domain(trial)) u = std::move(trial);
            continue;
        }
        const double obj0 = f1_value_raw(u) + dist(u, x) * dist(u, x) / (2.0 * lambda);
        const double slope = dot(g, step);
        double s = 1.0;
        Vec trial = u;
        for (int ls = 0; ls < 60; ++ls) {
            trial = {u[0] + s * step[0], u[1] + s * step[1]};
            if (f1_in_domain(trial)) {
                const double obj =
                    f1_value_raw(trial) + dist(trial, x) * dist(trial, x) / (2.0 * lambda);
                if (obj <= obj0 + 1e-4 * s * slope) break;
            }
            s *= 0.5;
        }
        u = trial;
    }
    Vec g = f1_grad_raw(u);
    for (int i = 0; i < 2; ++i) g[i] += (u[i] - x[i]) / lambda;
    if (norm(g) <= tol) return u;
    throw convergence_failure("f1 prox: Newton iteration budget exhausted");
}

}  // namespace

ObjectiveProblem f1() {
    ObjectiveProblem p("f1", 2, f1_value_raw);
    const Vec xstar{0.125, -0.125};
    // min value stored as the evaluated objective at the minimizer
    p.with_gradient(f1_grad_raw)
        .with_hess_vec(f1_hess_vec_raw)
        .with_prox(f1_prox)
        .with_lipschitz_grad(4.5)
        .with_min_value(f1_value_raw(xstar))
        .with_min_norm_solution(xstar)
        .with_domain_lower(Vec{-1.0, -1.0});
    return p;
}

ObjectiveProblem f2() {
    auto value = [](const Vec& x) {
        const double s = x[0] + x[1] - 1.0;
        return 0.5 * s * s;
    };
    auto grad = [](const Vec& x) -> Vec {
        const double s = x[0] + x[1] - 1.0;
        return {s, s};
    };
    auto hess_vec = [](const Vec&, const Vec& v) -> Vec {
        const double s = v[0] + v[1];
        return {s, s};
    };
    auto prox = [](double lambda, const Vec& x) -> Vec {
        const double s = (x[0] + x[1] + 2.0 * lambda) / (1.0 + 2.0 * lambda);
        const double shift = lambda * (s - 1.0);
        return {x[0] - shift, x[1] - shift};
    };
    ObjectiveProblem p("f2", 2, value);
    p.with_gradient(grad)
        .with_hess_vec(hess_vec)
        .with_prox(prox)
        .with_lipschitz_grad(2.0)
        .with_min_value(0.0)
        .with_min_norm_solution(Vec{0.5, 0.5});
    return p;
}

ObjectiveProblem quadratic(const Vec& a_diag, const Vec& b) {
    const int n = static_cast<int>(a_diag.size());
    if (n == 0 || b.size() != a_diag.size())
        throw validation_error("quadratic: A_diag and b must share a positive dimension");
    for (int i = 0; i < n; ++i) {
        if (a_diag[i] < 0.0) throw validation_error("quadratic: A must be positive semidefinite");
        if (a_diag[i] == 0.0 && b[i] != 0.0)
            throw validation_error("quadratic: unbounded below (a_i = 0 with b_i != 0)");
    }
    auto value = [a_diag, b](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += 0.5 * a_diag[i] * x[i] * x[i] - b[i] * x[i];
        return s;
    };
    auto grad = [a_diag, b](const Vec& x) -> Vec {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = a_diag[i] * x[i] - b[i];
        return g;
    };
    auto hess_vec = [a_diag](const Vec&, const Vec& v) -> Vec {
        Vec h(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) h[i] = a_diag[i] * v[i];
        return h;
    };
    auto prox = [a_diag, b](double lambda, const Vec& x) -> Vec {
        Vec u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            u[i] = (x[i] + lambda * b[i]) / (1.0 + lambda * a_diag[i]);
        return u;
    };
    Vec xstar(a_diag.size());
    for (int i = 0; i < n; ++i) xstar[i] = a_diag[i] > 0.0 ? b[i] / a_diag[i] : 0.0;

    ObjectiveProblem p("quadratic", n, value);
    p.with_gradient(grad)
        .with_hess_vec(hess_vec)
        .with_prox(prox)
        .with_lipschitz_grad(std::max(*std::max_element(a_diag.begin(), a_diag.end()), 0.0))
        .with_min_value(value(xstar))
        .with_min_norm_solution(xstar);
    return p;
}

ObjectiveProblem abs_affine(const Vec& a, double c) {
    const int n = static_cast<int>(a.size());
    const double na2 = dot(a, a);
    if (n == 0 || !(na2 > 0.0)) throw validation_error("abs_affine: a must be nonzero");
    auto value = [a, c](const Vec& x) { return std::abs(dot(a, x) - c); };
    auto prox = [a, c, na2](double lambda, const Vec& x) -> Vec {
        const double z = dot(a, x) - c;
        const double thr = lambda * na2;
        const double st = z > thr ? z - thr : (z < -thr ? z + thr : 0.0);
        Vec u = x;
        axpy(u, -(z - st) / na2, a);
        return u;
    };
    ObjectiveProblem p("abs_affine", n, value);
    p.with_prox(prox).with_min_value(0.0).with_min_norm_solution((c / na2) * a);
    return p;
}

}  // namespace problems

}  // namespace tikflow
