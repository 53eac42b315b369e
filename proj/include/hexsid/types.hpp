#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace hexsid {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6cd = Eigen::Matrix<std::complex<double>, 6, 1>;
using Matrix6cd = Eigen::Matrix<std::complex<double>, 6, 6>;
using Matrix3x6d = Eigen::Matrix<double, 3, 6>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kGravity = 9.80665;  // m/s^2
inline constexpr int kNumLegs = 6;
inline constexpr int kNumDofs = 6;

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Six-DOF platform pose: translation in meters, roll/pitch/yaw Euler
/// angles in radians. The rotation sequence is roll, then pitch, then yaw
/// (intrinsic x-y-z applied as R = Rz(psi) * Ry(phi) * Rx(theta)).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double theta = 0.0;  // roll
    double phi = 0.0;    // pitch
    double psi = 0.0;    // yaw

    Pose() = default;
    Pose(double x_, double y_, double z_, double th, double ph, double ps)
        : x(x_), y(y_), z(z_), theta(wrap_angle(th)), phi(wrap_angle(ph)), psi(wrap_angle(ps)) {}

    static Pose from_vector(const Vector6d& v) {
        return Pose(v[0], v[1], v[2], v[3], v[4], v[5]);
    }
    Vector6d to_vector() const {
        Vector6d v;
        v << x, y, z, theta, phi, psi;
        return v;
    }
    Eigen::Vector3d translation() const { return {x, y, z}; }

    bool finite() const { return to_vector().allFinite(); }
};

inline const std::array<std::string, 6> kDofNames = {"x", "y", "z", "theta", "phi", "psi"};

}  // namespace hexsid
