#pragma once

#include <cmath>
#include <vector>

#include "tikflow/errors.hpp"
#include "tikflow/vec.hpp"

namespace tikflow {

/// Small dense symmetric matrix in row-major storage.
class SymMatrix {
public:
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::size_t size() const { return n_; }

    void add_diagonal(double s) {
        for (std::size_t i = 0; i < n_; ++i) a_[i * n_ + i] += s;
    }

private:
    std::size_t n_;
    std::vector<double> a_;
};

/// Solves A x = b for SPD A by Cholesky factorization. A is modified in place.
inline Vec cholesky_solve(SymMatrix a, Vec b) {
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0)) throw numerical_error("Cholesky failed: matrix not positive definite");
        const double l = std::sqrt(d);
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / l;
        }
    }
    // forward substitution L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
        b[i] = s / a(i, i);
    }
    // back substitution L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * b[k];
        b[ii] = s / a(ii, ii);
    }
    return b;
}

}  // namespace tikflow
