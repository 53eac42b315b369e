#pragma once

#include <filesystem>
#include <string>

#include "hexsid/types.hpp"

namespace hexsid {

/// Capsule (cylinder with hemispherical caps) standing in for one U-joint
/// yoke when evaluating yoke-to-yoke clearance. Dimensions in meters.
struct YokeCapsule {
    double radius = 0.030;
    double half_length = 0.050;
    double offset = 0.042;  // capsule centre offset from the cross centre

    bool operator==(const YokeCapsule&) const = default;
};

/// Full kinematic description of a CSSP hexapod.
///
/// Frames: the base frame origin coincides with the platform frame origin at
/// the home pose, axes aligned. Platform attachment points are expressed in
/// the platform frame, base attachment points in the base frame with the
/// U-joint yoke-axis height already folded in (their z is the negative home
/// height of the platform plane).
struct HexapodGeometry {
    Matrix3x6d platform_points;  // platform frame, m
    Matrix3x6d base_points;      // base frame, m

    // Motion datum (e.g. an attached body's centre of gravity) relative to
    // the platform origin, in the platform frame. Poses prescribe the motion
    // of this point.
    Eigen::Vector3d motion_datum_offset = Eigen::Vector3d::Zero();

    double l_min = 0.0;  // usable actuator length limits, m
    double l_max = 0.0;

    // U-joint frames. u axes are the fixed first revolute axes; rest
    // directions are the actuator directions at home (pointing platform-ward
    // for base joints, base-ward for platform joints), each expressed in the
    // frame its joint is mounted on.
    Matrix3x6d base_yoke_axes;       // base frame
    Matrix3x6d platform_yoke_axes;   // platform frame
    Matrix3x6d base_rest_dirs;       // base frame
    Matrix3x6d platform_rest_dirs;   // platform frame

    double yoke_base_angle = deg2rad(20.0);  // first-yoke angle to the edge tangent
    double max_joint_angle = deg2rad(60.0);  // U-joint bend limit, rad

    YokeCapsule yoke;

    // Actuator ratings.
    double thrust_limit = 2200.0;  // N
    double speed_limit = 0.82;     // m/s
    double accel_limit = 8.9;      // m/s^2

    double stroke() const { return l_max - l_min; }
};

/// Parameters for the default CSSP construction: attachment rings with the
/// alternating 100/20 degree circumferential pattern, legs spanning +/-60
/// degrees of azimuth between the rings.
struct CsspParams {
    double base_radius = 0.8;      // m
    double platform_radius = 0.4;  // m
    double home_height = 0.7846;   // platform plane above base yoke plane, m
    double retract_margin = 0.1716;  // home length - l_min, m
    double extend_margin = 0.2237;   // l_max - home length, m
    double yoke_angle_deg = 20.0;
    double max_joint_angle_deg = 60.0;
    YokeCapsule yoke{};
};

/// Build a hexapod geometry from the CSSP pattern parameters.
HexapodGeometry make_cssp_geometry(const CsspParams& params);

/// Default geometry: desk-scale model of a 0.8 m platform / 1.6 m base
/// hexapod with 475 mm actuators run between inset limit switches.
HexapodGeometry default_geometry();

/// Recompute the joint frames (yoke axes and rest directions) for a
/// geometry whose attachment points changed. Axes are placed at
/// `yoke_base_angle` to the ring tangent and perpendicularised against the
/// home leg directions.
void derive_joint_frames(HexapodGeometry& geom);

/// JSON (de)serialization. The schema is documented in FORMATS.md.
HexapodGeometry load_geometry(const std::filesystem::path& file);
void save_geometry(const HexapodGeometry& geom, const std::filesystem::path& file);
HexapodGeometry geometry_from_json_text(const std::string& text);
std::string geometry_to_json_text(const HexapodGeometry& geom);

}  // namespace hexsid
