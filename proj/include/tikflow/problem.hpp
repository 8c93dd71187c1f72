#pragma once

#include <functional>
#include <optional>
#include <string>

#include "tikflow/vec.hpp"

namespace tikflow {

/// Oracle bundle for a convex objective. Smooth problems expose value and
/// gradient (plus Hessian-vector products); nonsmooth problems expose value
/// and prox. All oracles are pure and safe to call concurrently.
class ObjectiveProblem {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;
    using ProxFn = std::function<Vec(double, const Vec&)>;
    using HessVecFn = std::function<Vec(const Vec&, const Vec&)>;

    ObjectiveProblem(std::string name, int dim, ValueFn value);

    ObjectiveProblem& with_gradient(GradFn g);
    ObjectiveProblem& with_prox(ProxFn p);
    ObjectiveProblem& with_hess_vec(HessVecFn h);
    ObjectiveProblem& with_lipschitz_grad(double l);
    ObjectiveProblem& with_min_value(double m);
    ObjectiveProblem& with_min_norm_solution(Vec x);
    ObjectiveProblem& with_domain_lower(Vec lower);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    /// argmin_u f(u) + ||u - x||^2 / (2 lambda)
    Vec prox(double lambda, const Vec& x) const;
    Vec hess_vec(const Vec& x, const Vec& dir) const;

    bool has_gradient() const { return static_cast<bool>(grad_); }
    bool has_prox() const { return static_cast<bool>(prox_); }
    bool has_hess_vec() const { return static_cast<bool>(hess_vec_); }

    std::optional<double> lipschitz_grad() const { return lipschitz_; }
    std::optional<double> min_value() const { return min_value_; }
    const std::optional<Vec>& min_norm_solution() const { return min_norm_; }
    const std::optional<Vec>& domain_lower() const { return domain_lower_; }

    /// Componentwise x_i > lower_i + 1e-9 where an open lower bound exists.
    bool in_domain(const Vec& x) const;
    void check_domain(const Vec& x) const;  // throws std::domain_error

private:
    std::string name_;
    int dim_;
    ValueFn value_;
    GradFn grad_;
    ProxFn prox_;
    HessVecFn hess_vec_;
    std::optional<double> lipschitz_;
    std::optional<double> min_value_;
    std::optional<Vec> min_norm_;
    std::optional<Vec> domain_lower_;
};

namespace problems {

/// f1(x,y) = ln(1 + e^{-(x+y)}) + (x-y)^2 + y on (-1, inf)^2.
/// Strictly convex; unique minimizer (1/8, -1/8). Prox is iterative
/// (damped Newton on the strongly convex subproblem).
ObjectiveProblem f1();

/// f2(x) = (x1 + x2 - 1)^2 / 2. Degenerate argmin line x1 + x2 = 1;
/// minimum norm solution (1/2, 1/2). Closed-form prox.
ObjectiveProblem f2();

/// f(x) = <Ax,x>/2 - <b,x> with diagonal positive-semidefinite A.
/// Requires b_i = 0 wherever a_i = 0, so that argmin is nonempty.
ObjectiveProblem quadratic(const Vec& a_diag, const Vec& b);

/// f(x) = |<a,x> - c|; nonsmooth, value + prox only.
/// Minimum norm solution is the projection of the origin on <a,x> = c.
ObjectiveProblem abs_affine(const Vec& a, double c);

}  // namespace problems

}  // namespace tikflow
