#include "hexsid/geometry.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "hexsid/errors.hpp"
#include "hexsid/kinematics.hpp"

namespace hexsid {

namespace {

using ordered_json = nlohmann::ordered_json;

// Leg azimuths in degrees. Base and platform rings both follow the
// alternating 100/20 pattern; leg i runs from base ring slot i to the
// platform slot offset by +/-60 degrees, alternating, which wires the usual
// zig-zag truss.
constexpr std::array<double, 6> kBaseAzimuthDeg = {50.0, 70.0, 170.0, 190.0, 290.0, 310.0};
constexpr std::array<double, 6> kPlatformAzimuthDeg = {110.0, 10.0, 230.0, 130.0, 350.0, 250.0};

Eigen::Vector3d ring_point(double radius, double azimuth_deg) {
    const double a = deg2rad(azimuth_deg);
    return {radius * std::cos(a), radius * std::sin(a), 0.0};
}

Matrix3x6d to_points(const ordered_json& j, const char* what) {
    if (j.size() != 6) throw FileFormatError(std::string(what) + ": expected 6 points");
    Matrix3x6d m;
    for (int i = 0; i < 6; ++i)
        for (int r = 0; r < 3; ++r) m(r, i) = j.at(i).at(r).get<double>();
    return m;
}

ordered_json points_json(const Matrix3x6d& m) {
    ordered_json j = ordered_json::array();
    for (int i = 0; i < 6; ++i) j.push_back({m(0, i), m(1, i), m(2, i)});
    return j;
}

}  // namespace

void derive_joint_frames(HexapodGeometry& geom) {
    // Home leg directions, base pointing up toward the platform.
    const auto home = kinematics::inverse_kinematics(Pose{}, geom);
    for (int i = 0; i < kNumLegs; ++i) {
        const Eigen::Vector3d l_hat = home.unit_dirs.col(i);

        auto yoke_axis = [&](const Eigen::Vector3d& attach, const Eigen::Vector3d& rest_dir) {
            // First yoke axis: ring tangent rotated by the yoke angle toward
            // the radial direction, then perpendicularised against the rest
            // actuator direction so the home joint angles are exactly zero.
            const Eigen::Vector3d radial = Eigen::Vector3d(attach.x(), attach.y(), 0.0).normalized();
            const Eigen::Vector3d tangent = Eigen::Vector3d::UnitZ().cross(radial);
            Eigen::Vector3d u = std::cos(geom.yoke_base_angle) * tangent + std::sin(geom.yoke_base_angle) * radial;
            u -= u.dot(rest_dir) * rest_dir;
            return u.normalized().eval();
        };

        geom.base_rest_dirs.col(i) = l_hat;
        geom.base_yoke_axes.col(i) = yoke_axis(geom.base_points.col(i), l_hat);
        // Platform joints are expressed in the platform frame, which is
        // aligned with the base frame at home. Their rest direction points
        // from the platform attachment back down the leg.
        geom.platform_rest_dirs.col(i) = -l_hat;
        geom.platform_yoke_axes.col(i) = yoke_axis(geom.platform_points.col(i), -l_hat);
    }
}

HexapodGeometry make_cssp_geometry(const CsspParams& p) {
    HexapodGeometry geom;
    for (int i = 0; i < kNumLegs; ++i) {
        geom.platform_points.col(i) = ring_point(p.platform_radius, kPlatformAzimuthDeg[i]);
        Eigen::Vector3d b = ring_point(p.base_radius, kBaseAzimuthDeg[i]);
        b.z() = -p.home_height;
        geom.base_points.col(i) = b;
    }
    geom.yoke_base_angle = deg2rad(p.yoke_angle_deg);
    geom.max_joint_angle = deg2rad(p.max_joint_angle_deg);
    geom.yoke = p.yoke;

    const double home_len =
        (geom.platform_points.col(0) - geom.base_points.col(0)).norm();
    geom.l_min = home_len - p.retract_margin;
    geom.l_max = home_len + p.extend_margin;

    derive_joint_frames(geom);
    return geom;
}

HexapodGeometry default_geometry() { return make_cssp_geometry(CsspParams{}); }

HexapodGeometry geometry_from_json_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    HexapodGeometry g;
    g.platform_points = to_points(j.at("platform_points_m"), "platform_points_m");
    g.base_points = to_points(j.at("base_points_m"), "base_points_m");
    if (j.contains("motion_datum_offset_m")) {
        const auto& o = j["motion_datum_offset_m"];
        g.motion_datum_offset = {o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>()};
    }
    g.l_min = j.at("l_min_m").get<double>();
    g.l_max = j.at("l_max_m").get<double>();
    if (g.l_min <= 0.0 || g.l_max <= g.l_min)
        throw FileFormatError("geometry: need 0 < l_min_m < l_max_m");
    g.yoke_base_angle = deg2rad(j.value("yoke_base_angle_deg", 20.0));
    g.max_joint_angle = deg2rad(j.value("max_joint_angle_deg", 60.0));
    if (j.contains("yoke_capsule")) {
        const auto& y = j["yoke_capsule"];
        g.yoke.radius = y.value("radius_m", g.yoke.radius);
        g.yoke.half_length = y.value("half_length_m", g.yoke.half_length);
        g.yoke.offset = y.value("offset_m", g.yoke.offset);
    }
    if (j.contains("limits")) {
        const auto& l = j["limits"];
        g.thrust_limit = l.value("thrust_n", g.thrust_limit);
        g.speed_limit = l.value("speed_mps", g.speed_limit);
        g.accel_limit = l.value("accel_mps2", g.accel_limit);
    }

    if (j.contains("base_yoke_axes")) {
        g.base_yoke_axes = to_points(j.at("base_yoke_axes"), "base_yoke_axes");
        g.platform_yoke_axes = to_points(j.at("platform_yoke_axes"), "platform_yoke_axes");
        g.base_rest_dirs = to_points(j.at("base_rest_dirs"), "base_rest_dirs");
        g.platform_rest_dirs = to_points(j.at("platform_rest_dirs"), "platform_rest_dirs");
    } else {
        derive_joint_frames(g);
    }
    return g;
}

std::string geometry_to_json_text(const HexapodGeometry& g) {
    ordered_json j;
    j["schema"] = "hexsid-geometry-v1";
    j["platform_points_m"] = points_json(g.platform_points);
    j["base_points_m"] = points_json(g.base_points);
    j["motion_datum_offset_m"] = {g.motion_datum_offset.x(), g.motion_datum_offset.y(),
                                  g.motion_datum_offset.z()};
    j["l_min_m"] = g.l_min;
    j["l_max_m"] = g.l_max;
    j["yoke_base_angle_deg"] = rad2deg(g.yoke_base_angle);
    j["max_joint_angle_deg"] = rad2deg(g.max_joint_angle);
    j["yoke_capsule"] = {{"radius_m", g.yoke.radius},
                         {"half_length_m", g.yoke.half_length},
                         {"offset_m", g.yoke.offset}};
    j["limits"] = {{"thrust_n", g.thrust_limit},
                   {"speed_mps", g.speed_limit},
                   {"accel_mps2", g.accel_limit}};
    j["base_yoke_axes"] = points_json(g.base_yoke_axes);
    j["platform_yoke_axes"] = points_json(g.platform_yoke_axes);
    j["base_rest_dirs"] = points_json(g.base_rest_dirs);
    j["platform_rest_dirs"] = points_json(g.platform_rest_dirs);
    return j.dump(2) + "\n";
}

HexapodGeometry load_geometry(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw FileFormatError("cannot open geometry file: " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return geometry_from_json_text(text);
}

void save_geometry(const HexapodGeometry& geom, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw FileFormatError("cannot write geometry file: " + file.string());
    out << geometry_to_json_text(geom);
}

}  // namespace hexsid
