#pragma once

#include <vector>

#include "hexsid/geometry.hpp"
#include "hexsid/kinematics.hpp"
#include "hexsid/types.hpp"

namespace hexsid::dynamics {

/// Force and moment about a stated datum. Force and moment components are in
/// the base frame; the datum rides with the platform and is given in the
/// platform frame.
struct Wrench {
    Eigen::Vector3d force = Eigen::Vector3d::Zero();    // N
    Eigen::Vector3d moment = Eigen::Vector3d::Zero();   // N m
    Eigen::Vector3d datum = Eigen::Vector3d::Zero();    // platform frame, m

    Vector6d to_vector() const {
        Vector6d v;
        v << force, moment;
        return v;
    }
};

/// 6x6 map from actuator axial tensions to the wrench they exert about
/// `datum` (platform frame): column i is [l_i ; (a_i - d) x l_i] with a_i the
/// platform attachment point and d the datum, both in the base frame.
Matrix6d load_transform_matrix(const Pose& pose, const HexapodGeometry& geom,
                               const Eigen::Vector3d& datum);

/// Axial forces (positive tension) realizing the wrench at the given pose.
/// Throws SingularPoseError when the pose is at a kinematic singularity
/// (condition number above ~1e12).
Vector6d actuator_forces(const Wrench& wrench, const Pose& pose, const HexapodGeometry& geom);

/// Shift the wrench datum: force unchanged, moment picks up
/// (old - new) x force with the arm evaluated in the base frame at `pose`.
Wrench translate_wrench(const Wrench& w, const Eigen::Vector3d& new_datum, const Pose& pose);

/// Rigid payload lumped at the motion datum.
struct Payload {
    double mass = 0.0;                                      // kg
    Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();      // about the datum, platform frame
};

struct LegExtremes {
    double force = 0.0;   // N, max |axial force|
    double speed = 0.0;   // m/s, max |dl/dt|
    double accel = 0.0;   // m/s^2, max |d2l/dt2|
};

struct LimitViolation {
    int sample = 0;
    int leg = 0;
    std::string quantity;  // "force" | "speed" | "accel"
    double value = 0.0;
    double limit = 0.0;
};

struct LimitReport {
    std::array<LegExtremes, kNumLegs> worst{};
    std::vector<LimitViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// Check a uniformly sampled pose trajectory against the actuator ratings:
/// leg speeds/accelerations by numeric differentiation of the lengths, and
/// quasi-static axial forces carrying the payload's weight plus its
/// rigid-body inertia wrench.
LimitReport check_limits(const std::vector<Pose>& trajectory, double dt, const Payload& payload,
                         const HexapodGeometry& geom);

}  // namespace hexsid::dynamics
