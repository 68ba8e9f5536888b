#include "shotlab/lsq.hpp"

#include "shotlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace shotlab {

double Polynomial::operator()(double x) const
{
    const double u = map(x);
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        acc = acc * u + *it;
    return acc;
}

double residual_sum_squares(const Polynomial& p, std::span<const double> xs, std::span<const double> ys)
{
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - p(xs[i]);
        rss += r * r;
    }
    return rss;
}

std::vector<double> solve_normal_equations(std::vector<double> gram, std::vector<double> rhs, std::size_t n)
{
    if (gram.size() != n * n || rhs.size() != n)
        throw Error(ErrorKind::LengthMismatch);

    // In-place lower Cholesky factor.
    for (std::size_t j = 0; j < n; ++j) {
        const double diag = gram[j * n + j];
        double d = diag;
        for (std::size_t k = 0; k < j; ++k)
            d -= gram[j * n + k] * gram[j * n + k];
        if (!(diag > 0.0) || !(d > kRankTolerance * diag))
            throw Error(ErrorKind::RankDeficient, "column " + std::to_string(j));
        const double ljj = std::sqrt(d);
        gram[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = gram[i * n + j];
            for (std::size_t k = 0; k < j; ++k)
                s -= gram[i * n + k] * gram[j * n + k];
            gram[i * n + j] = s / ljj;
        }
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= gram[i * n + k] * y[k];
        y[i] = s / gram[i * n + i];
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k)
            s -= gram[k * n + ii] * x[k];
        x[ii] = s / gram[ii * n + ii];
    }
    return x;
}

Polynomial fit_polynomial_least_squares(std::span<const double> xs, std::span<const double> ys, int degree)
{
    if (xs.size() != ys.size())
        throw Error(ErrorKind::LengthMismatch);
    if (degree < 0)
        throw Error(ErrorKind::InvalidParams, "degree");
    const auto terms = static_cast<std::size_t>(degree) + 1;
    if (xs.size() < terms)
        throw Error(ErrorKind::RankDeficient, "fewer points than coefficients");

    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    Polynomial p;
    p.center = 0.5 * (*lo + *hi);
    p.half_range = 0.5 * (*hi - *lo);
    if (p.half_range == 0.0) {
        if (degree > 0)
            throw Error(ErrorKind::RankDeficient, "all abscissae identical");
        p.half_range = 1.0;
    }

    std::vector<double> gram(terms * terms, 0.0);
    std::vector<double> rhs(terms, 0.0);
    std::vector<double> powers(2 * terms - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double u = p.map(xs[i]);
        powers[0] = 1.0;
        for (std::size_t k = 1; k < powers.size(); ++k)
            powers[k] = powers[k - 1] * u;
        for (std::size_t r = 0; r < terms; ++r) {
            rhs[r] += powers[r] * ys[i];
            for (std::size_t c = 0; c < terms; ++c)
                gram[r * terms + c] += powers[r + c];
        }
    }

    p.coefficients = solve_normal_equations(std::move(gram), std::move(rhs), terms);
    return p;
}

} // namespace shotlab
