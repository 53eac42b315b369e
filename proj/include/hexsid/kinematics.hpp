#pragma once

#include <array>
#include <functional>
#include <optional>

#include "hexsid/geometry.hpp"
#include "hexsid/types.hpp"

namespace hexsid::kinematics {

/// Rotation matrix taking platform-frame vectors to the base frame for the
/// roll -> pitch -> yaw Euler sequence, R = Rz(psi) * Ry(phi) * Rx(theta).
Eigen::Matrix3d rotation_matrix(const Pose& pose);

/// Position of the platform origin in the base frame for a pose commanded
/// at the geometry's motion datum.
Eigen::Vector3d platform_origin(const Pose& pose, const HexapodGeometry& geom);

/// Inverse kinematics result: per-leg link vectors (base attachment to
/// platform attachment, base frame), their lengths and unit directions, and
/// stroke flags against [l_min, l_max].
struct IkSolution {
    Vector6d lengths;
    Matrix3x6d links;
    Matrix3x6d unit_dirs;
    Matrix3x6d platform_points_world;
    std::array<bool, kNumLegs> within_stroke{};

    bool all_within_stroke() const {
        for (bool b : within_stroke)
            if (!b) return false;
        return true;
    }
};

/// Closed-form inverse kinematics. Never throws on stroke violations; the
/// per-leg flags report them so simulation-only queries can keep going.
IkSolution inverse_kinematics(const Pose& pose, const HexapodGeometry& geom);

/// Strict variant: throws OutOfStrokeError naming the offending legs.
Vector6d leg_lengths_checked(const Pose& pose, const HexapodGeometry& geom);

struct ForwardKinematicsOptions {
    int max_iterations = 100;
    double tolerance = 1e-11;       // infinity norm on the length residual, m
    double damping = 1e-8;          // Tikhonov term on the normal equations
    double fd_step = 1e-7;          // numeric Jacobian step
};

/// Newton solve of the pose realizing the given leg lengths, started from
/// `guess`. Throws NoConvergenceError when the iteration cap is hit, which
/// usually means the lengths are inconsistent or the guess was outside the
/// basin.
Pose forward_kinematics(const Vector6d& lengths, const Pose& guess, const HexapodGeometry& geom,
                        const ForwardKinematicsOptions& opts = {});

enum class BindingConstraint { Actuator, Joint, Cap };

const char* binding_name(BindingConstraint b);

struct SweepLimit {
    double excursion = 0.0;
    BindingConstraint bound = BindingConstraint::Cap;
};

struct SweepResult {
    SweepLimit negative;
    SweepLimit positive;
};

struct SweepOptions {
    double translation_cap = 1.5;          // m
    double rotation_cap = deg2rad(120.0);  // rad
    // Extra admissibility test, typically the U-joint angle/clearance check.
    // Absent predicate means only the actuator stroke binds.
    std::function<bool(const Pose&)> joint_ok;
};

/// March one DOF from home in both directions until the actuator stroke, the
/// joint predicate, or the hard cap binds, recording which.
SweepResult sweep_range_of_motion(const HexapodGeometry& geom, int dof, double step,
                                  const SweepOptions& opts = {});

}  // namespace hexsid::kinematics
