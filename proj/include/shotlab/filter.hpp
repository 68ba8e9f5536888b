#pragma once

#include <span>
#include <vector>

namespace shotlab {

struct AngleSeries {
    std::vector<double> values; // degrees about the leg-deviation axis
    double alpha_used = 0.0;
};

/// First-order complementary filter:
///   theta_0 = theta_acc_0
///   theta_t = alpha * (theta_{t-1} + gyro_z_t * dt) + (1 - alpha) * theta_acc_t
/// with theta_acc = atan2(acc_y, acc_z) in degrees. acc_x is accepted for shape
/// symmetry with the other channels and does not enter the angle.
AngleSeries complementary_filter(std::span<const double> acc_x, std::span<const double> acc_y,
                                 std::span<const double> acc_z, std::span<const double> gyro_z,
                                 double dt_s, double alpha);

/// Accelerometer tilt angle, degrees.
double accel_angle_deg(double acc_y, double acc_z);

/// Centered moving mean; windows are clipped at the series edges.
std::vector<double> moving_average(std::span<const double> series, int half_width);

} // namespace shotlab
