#include "hexsid/dynamics.hpp"

#include <Eigen/SVD>

#include "hexsid/errors.hpp"

namespace hexsid::dynamics {

namespace {
constexpr double kConditionLimit = 1e12;
}

Matrix6d load_transform_matrix(const Pose& pose, const HexapodGeometry& geom,
                               const Eigen::Vector3d& datum) {
    const auto sol = kinematics::inverse_kinematics(pose, geom);
    const Eigen::Matrix3d r = kinematics::rotation_matrix(pose);
    const Eigen::Vector3d datum_world =
        kinematics::platform_origin(pose, geom) + r * datum;

    Matrix6d t;
    for (int i = 0; i < kNumLegs; ++i) {
        const Eigen::Vector3d l_hat = sol.unit_dirs.col(i);
        const Eigen::Vector3d arm = sol.platform_points_world.col(i) - datum_world;
        t.block<3, 1>(0, i) = l_hat;
        t.block<3, 1>(3, i) = arm.cross(l_hat);
    }
    return t;
}

Vector6d actuator_forces(const Wrench& wrench, const Pose& pose, const HexapodGeometry& geom) {
    const Matrix6d t = load_transform_matrix(pose, geom, wrench.datum);
    const Eigen::JacobiSVD<Matrix6d> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(5) <= 0.0 || sv(0) / sv(5) > kConditionLimit)
        throw SingularPoseError("load transform is singular at this pose (condition number > 1e12)");
    return svd.solve(wrench.to_vector());
}

Wrench translate_wrench(const Wrench& w, const Eigen::Vector3d& new_datum, const Pose& pose) {
    const Eigen::Matrix3d r = kinematics::rotation_matrix(pose);
    const Eigen::Vector3d arm = r * (w.datum - new_datum);
    Wrench out;
    out.force = w.force;
    out.moment = w.moment + arm.cross(w.force);
    out.datum = new_datum;
    return out;
}

namespace {

Eigen::Vector3d unskew(const Eigen::Matrix3d& m) {
    return {m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
}

}  // namespace

LimitReport check_limits(const std::vector<Pose>& trajectory, double dt, const Payload& payload,
                         const HexapodGeometry& geom) {
    LimitReport report;
    const int n = static_cast<int>(trajectory.size());
    if (n == 0) return report;
    if (dt <= 0.0) throw Error("check_limits: dt must be positive");

    std::vector<Vector6d> lengths(n);
    std::vector<Eigen::Vector3d> datum_pos(n);
    std::vector<Eigen::Matrix3d> rot(n);
    for (int k = 0; k < n; ++k) {
        lengths[k] = kinematics::inverse_kinematics(trajectory[k], geom).lengths;
        rot[k] = kinematics::rotation_matrix(trajectory[k]);
        datum_pos[k] = trajectory[k].translation();
    }

    auto record = [&](int sample, int leg, const char* what, double value, double limit) {
        if (std::abs(value) > limit)
            report.violations.push_back({sample, leg, what, std::abs(value), limit});
    };

    const Eigen::Vector3d gravity(0.0, 0.0, -kGravity);
    for (int k = 0; k < n; ++k) {
        const int km = std::max(k - 1, 0);
        const int kp = std::min(k + 1, n - 1);
        const double span = (kp - km) * dt;

        // Leg speed / acceleration by finite differences.
        if (span > 0.0) {
            const Vector6d speed = (lengths[kp] - lengths[km]) / span;
            for (int leg = 0; leg < kNumLegs; ++leg) {
                report.worst[leg].speed = std::max(report.worst[leg].speed, std::abs(speed[leg]));
                record(k, leg, "speed", speed[leg], geom.speed_limit);
            }
        }
        if (k > 0 && k + 1 < n) {
            const Vector6d acc = (lengths[k + 1] - 2.0 * lengths[k] + lengths[k - 1]) / (dt * dt);
            for (int leg = 0; leg < kNumLegs; ++leg) {
                report.worst[leg].accel = std::max(report.worst[leg].accel, std::abs(acc[leg]));
                record(k, leg, "accel", acc[leg], geom.accel_limit);
            }
        }

        // Quasi-static actuator forces: payload weight plus Newton-Euler
        // inertia about its own centre (the motion datum).
        if (payload.mass > 0.0 || payload.inertia.norm() > 0.0) {
            Eigen::Vector3d a_lin = Eigen::Vector3d::Zero();
            Eigen::Vector3d omega = Eigen::Vector3d::Zero();
            Eigen::Vector3d omega_dot = Eigen::Vector3d::Zero();
            if (k > 0 && k + 1 < n) {
                a_lin = (datum_pos[k + 1] - 2.0 * datum_pos[k] + datum_pos[k - 1]) / (dt * dt);
                omega = unskew((rot[k + 1] - rot[k - 1]) / (2.0 * dt) * rot[k].transpose()) * 0.5;
                const Eigen::Vector3d omega_p =
                    unskew((rot[k + 1] - rot[k]) / dt * rot[k].transpose()) * 0.5;
                const Eigen::Vector3d omega_m =
                    unskew((rot[k] - rot[k - 1]) / dt * rot[k].transpose()) * 0.5;
                omega_dot = (omega_p - omega_m) / dt;
            }

            const Eigen::Matrix3d inertia_world =
                rot[k] * payload.inertia * rot[k].transpose();
            Wrench w;
            w.datum = geom.motion_datum_offset;
            w.force = payload.mass * (a_lin - gravity);
            w.moment = inertia_world * omega_dot + omega.cross(inertia_world * omega);

            Vector6d f;
            try {
                f = actuator_forces(w, trajectory[k], geom);
            } catch (const SingularPoseError&) {
                report.violations.push_back({k, -1, "singular", 0.0, 0.0});
                continue;
            }
            for (int leg = 0; leg < kNumLegs; ++leg) {
                report.worst[leg].force = std::max(report.worst[leg].force, std::abs(f[leg]));
                record(k, leg, "force", f[leg], geom.thrust_limit);
            }
        }
    }
    return report;
}

}  // namespace hexsid::dynamics
