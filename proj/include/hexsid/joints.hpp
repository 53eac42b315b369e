#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "hexsid/geometry.hpp"
#include "hexsid/kinematics.hpp"
#include "hexsid/types.hpp"

namespace hexsid::joints {

/// One U-joint's axes at a given pose, everything in the base frame.
/// u is the fixed first revolute axis, v the articulated second axis,
/// c = u x v completes the triad and l is the actuator direction. alpha and
/// beta are the rotations about the first and second axes away from the rest
/// direction.
struct JointFrame {
    Eigen::Vector3d u_hat;
    Eigen::Vector3d v_hat;
    Eigen::Vector3d c_hat;
    Eigen::Vector3d l_hat;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Axes of both U-joints of one leg: AB at the base, CD at the platform.
struct LegJointState {
    JointFrame ab;
    JointFrame cd;

    double max_angle() const {
        return std::max(std::max(std::abs(ab.alpha), std::abs(ab.beta)),
                        std::max(std::abs(cd.alpha), std::abs(cd.beta)));
    }
};

/// Compute the joint axes and rotation angles of leg `leg` (0-based) at a
/// pose. Throws GimbalDegenerateError when the actuator lines up with the
/// first yoke axis.
LegJointState joint_axes(const Pose& pose, const HexapodGeometry& geom, int leg);

/// Yoke-pair minimum distance on a regular (alpha, beta) grid over
/// [0, 90] degrees. Distances are stored in millimeters, clamped at zero
/// where the capsules interpenetrate.
struct ClearanceTable {
    double step_rad = deg2rad(0.1);
    Eigen::MatrixXd min_distance_mm;  // (n x n), node (i, j) = (i*step, j*step)
    YokeCapsule yoke;

    int nodes() const { return static_cast<int>(min_distance_mm.rows()); }
    double max_angle() const { return step_rad * (nodes() - 1); }
};

/// Distance between the two yoke capsules of a U-joint articulated by
/// (alpha, beta), meters. Exposed for the table builder and its oracle.
double yoke_pair_distance(const YokeCapsule& yoke, double alpha, double beta);

/// Build the clearance lookup table at the given angular resolution.
ClearanceTable build_clearance_table(const YokeCapsule& yoke, double step_rad = deg2rad(0.1));

/// Load the table from `cache_file` when it matches (same yoke, same step),
/// else build and store it.
ClearanceTable cached_clearance_table(const YokeCapsule& yoke, const std::filesystem::path& cache_file,
                                      double step_rad = deg2rad(0.1));

void save_clearance_table(const ClearanceTable& table, const std::filesystem::path& file);
std::optional<ClearanceTable> try_load_clearance_table(const std::filesystem::path& file);

/// Bilinear interpolation of the table at |alpha|, |beta|. Throws
/// AngleOutOfTableError past the table's 90 degree edge.
double clearance_at_angles(const ClearanceTable& table, double alpha, double beta);

/// Minimum clearance per leg at a pose (over that leg's AB and CD joints),
/// millimeters.
Vector6d clearance_at(const Pose& pose, const HexapodGeometry& geom, const ClearanceTable& table);

/// True when every joint angle is within the geometry's bend limit and every
/// yoke clearance stays at or above `threshold_mm`.
bool pose_joints_ok(const Pose& pose, const HexapodGeometry& geom, const ClearanceTable& table,
                    double threshold_mm);

inline constexpr double kDefaultClearanceThresholdMm = 2.0;

/// Scan a sampled trajectory; returns the first sample whose clearance drops
/// below the threshold (or whose joint angles leave the table), or nullopt
/// when the whole trajectory passes.
std::optional<int> assert_no_collision(const std::vector<Pose>& trajectory, const HexapodGeometry& geom,
                                       const ClearanceTable& table, double threshold_mm);

}  // namespace hexsid::joints
