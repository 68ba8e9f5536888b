#include "support.hpp"

#include "shotlab/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace shotlab;
using shotlab::test::error_kind_of;

namespace {

// Independent route: explicit Vandermonde matrix on the mapped abscissae,
// normal equations formed as V^T V, solved by Gauss-Jordan elimination with
// partial pivoting in long double.
std::vector<double> oracle_coefficients(const std::vector<double>& xs, const std::vector<double>& ys, int degree)
{
    const auto m = xs.size();
    const auto n = static_cast<std::size_t>(degree) + 1;
    const long double lo = *std::min_element(xs.begin(), xs.end());
    const long double hi = *std::max_element(xs.begin(), xs.end());
    const long double c = (lo + hi) / 2, h = (hi - lo) / 2;

    std::vector<std::vector<long double>> v(m, std::vector<long double>(n));
    for (std::size_t i = 0; i < m; ++i) {
        const long double u = (xs[i] - c) / h;
        for (std::size_t k = 0; k < n; ++k)
            v[i][k] = std::pow(u, static_cast<long double>(k));
    }
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t col = 0; col < n; ++col)
            for (std::size_t i = 0; i < m; ++i)
                a[r][col] += v[i][r] * v[i][col];
        for (std::size_t i = 0; i < m; ++i)
            a[r][n] += v[i][r] * ys[i];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col)
                continue;
            const long double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k <= n; ++k)
                a[r][k] -= f * a[col][k];
        }
    }
    std::vector<double> out(n);
    for (std::size_t r = 0; r < n; ++r)
        out[r] = static_cast<double>(a[r][n] / a[r][r]);
    return out;
}

double rel_error(const std::vector<double>& got, const std::vector<double>& want)
{
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        scale = std::max(scale, std::abs(want[i]));
        diff = std::max(diff, std::abs(got[i] - want[i]));
    }
    return diff / std::max(scale, 1e-300);
}

} // namespace

TEST_CASE("exact line")
{
    const std::vector<double> xs{0, 1, 2}, ys{0, 1, 2};
    const auto p = fit_polynomial_least_squares(xs, ys, 1);
    CHECK(p(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p(5.0) == doctest::Approx(5.0));
    // Slope 1 in x is slope half_range in the mapped variable.
    CHECK(p.coefficients[1] / p.half_range == doctest::Approx(1.0));
    CHECK(residual_sum_squares(p, xs, ys) < 1e-24);
}

TEST_CASE("constant data gives a constant polynomial")
{
    const std::vector<double> xs{-3, 0.5, 1, 2, 7, 9, 11}, ys(7, 5.0);
    for (int d = 0; d <= 5; ++d) {
        const auto p = fit_polynomial_least_squares(xs, ys, d);
        CHECK(p.coefficients[0] == doctest::Approx(5.0).epsilon(1e-12));
        for (int k = 1; k <= d; ++k)
            CHECK(std::abs(p.coefficients[static_cast<std::size_t>(k)]) <= 1e-9);
    }
}

TEST_CASE("10 random points, degree 3, against the normal-equation oracle")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> x(-4.0, 9.0), y(-10.0, 10.0);
    std::vector<double> xs(10), ys(10);
    for (std::size_t i = 0; i < 10; ++i) {
        xs[i] = x(rng);
        ys[i] = y(rng);
    }
    const auto p = fit_polynomial_least_squares(xs, ys, 3);
    CHECK(rel_error(p.coefficients, oracle_coefficients(xs, ys, 3)) <= 1e-8);
}

TEST_CASE("least-squares optimality against random perturbations")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(0.0, 48.0), y(-30.0, 30.0), eps(-1e-3, 1e-3);
    std::vector<double> xs(40), ys(40);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = x(rng);
        ys[i] = y(rng);
    }
    const auto best = fit_polynomial_least_squares(xs, ys, 5);
    const double rss = residual_sum_squares(best, xs, ys);
    for (int trial = 0; trial < 1000; ++trial) {
        auto q = best;
        for (auto& c : q.coefficients)
            c += eps(rng);
        CHECK(rss <= residual_sum_squares(q, xs, ys));
    }
}

TEST_CASE("rank deficiency")
{
    const std::vector<double> same{2, 2, 2, 2}, ys{1, 2, 3, 4};
    CHECK(error_kind_of([&] { fit_polynomial_least_squares(same, ys, 1); }) == ErrorKind::RankDeficient);
    CHECK(fit_polynomial_least_squares(same, ys, 0).coefficients[0] == doctest::Approx(2.5));

    const std::vector<double> two{0, 1, 0, 1};
    CHECK(error_kind_of([&] { fit_polynomial_least_squares(two, ys, 2); }) == ErrorKind::RankDeficient);
    CHECK(error_kind_of([&] { fit_polynomial_least_squares(two, ys, 5); }) == ErrorKind::RankDeficient);

    CHECK(error_kind_of([] { solve_normal_equations({1, 1, 1, 1}, {1, 1}, 2); }) == ErrorKind::RankDeficient);
    CHECK(error_kind_of([] { solve_normal_equations({0, 0, 0, 1}, {1, 1}, 2); }) == ErrorKind::RankDeficient);
}

TEST_CASE("normal-equation solver on a known SPD system")
{
    // [[4, 2], [2, 3]] x = [2, 1]  ->  x = [0.5, 0]
    const auto x = solve_normal_equations({4, 2, 2, 3}, {2, 1}, 2);
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(std::abs(x[1]) < 1e-15);
}
