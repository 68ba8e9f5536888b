#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shotlab {

/// Polynomial in the mapped variable u = (x - center) / half_range, which puts
/// the fitted abscissae on [-1, 1]. coefficients[k] multiplies u^k.
struct Polynomial {
    std::vector<double> coefficients;
    double center = 0.0;
    double half_range = 1.0;

    double map(double x) const { return (x - center) / half_range; }
    double operator()(double x) const;
    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

/// Least-squares polynomial of the given degree through (xs, ys), solved via
/// the normal equations of the Vandermonde system on the mapped abscissae.
/// Throws RankDeficient when the normal matrix is numerically singular.
Polynomial fit_polynomial_least_squares(std::span<const double> xs, std::span<const double> ys, int degree);

/// Sum of squared residuals of `p` on the points.
double residual_sum_squares(const Polynomial& p, std::span<const double> xs, std::span<const double> ys);

/// Solves the symmetric positive definite system gram * x = rhs (gram is n x n,
/// row-major) by Cholesky factorisation. A pivot that falls below 1e-10 of its
/// original diagonal entry means the column is a linear combination of the
/// earlier ones and RankDeficient is thrown.
std::vector<double> solve_normal_equations(std::vector<double> gram, std::vector<double> rhs, std::size_t n);

inline constexpr double kRankTolerance = 1e-10;

} // namespace shotlab
