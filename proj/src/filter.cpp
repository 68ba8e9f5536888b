#include "shotlab/filter.hpp"

#include "shotlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shotlab {

double accel_angle_deg(double acc_y, double acc_z)
{
    return std::atan2(acc_y, acc_z) * 180.0 / std::numbers::pi;
}

AngleSeries complementary_filter(std::span<const double> acc_x, std::span<const double> acc_y,
                                 std::span<const double> acc_z, std::span<const double> gyro_z,
                                 double dt_s, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(ErrorKind::AlphaOutOfRange);
    const auto n = gyro_z.size();
    if (acc_x.size() != n || acc_y.size() != n || acc_z.size() != n)
        throw Error(ErrorKind::LengthMismatch);
    if (!(dt_s > 0.0))
        throw Error(ErrorKind::InvalidParams, "dt_s");

    AngleSeries out{std::vector<double>(n), alpha};
    if (n == 0)
        return out;

    out.values[0] = accel_angle_deg(acc_y[0], acc_z[0]);
    for (std::size_t t = 1; t < n; ++t) {
        const double predicted = out.values[t - 1] + gyro_z[t] * dt_s;
        out.values[t] = alpha * predicted + (1.0 - alpha) * accel_angle_deg(acc_y[t], acc_z[t]);
    }
    return out;
}

std::vector<double> moving_average(std::span<const double> series, int half_width)
{
    if (half_width < 0)
        throw Error(ErrorKind::InvalidParams, "half_width");
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    std::vector<double> out(series.begin(), series.end());
    if (half_width == 0)
        return out;

    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto lo = std::max<std::ptrdiff_t>(0, i - half_width);
        const auto hi = std::min<std::ptrdiff_t>(n - 1, i + half_width);
        double sum = 0.0;
        double lo_v = series[static_cast<std::size_t>(lo)];
        double hi_v = lo_v;
        for (auto k = lo; k <= hi; ++k) {
            const double v = series[static_cast<std::size_t>(k)];
            sum += v;
            lo_v = std::min(lo_v, v);
            hi_v = std::max(hi_v, v);
        }
        // Rounding in the sum may push the mean just outside the window range.
        out[static_cast<std::size_t>(i)] = std::clamp(sum / static_cast<double>(hi - lo + 1), lo_v, hi_v);
    }
    return out;
}

} // namespace shotlab
