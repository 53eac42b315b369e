#include "hexsid/joints.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "hexsid/errors.hpp"

namespace hexsid::joints {

namespace {

constexpr double kGimbalTol = 1e-9;

JointFrame make_frame(const Eigen::Vector3d& u_fixed, const Eigen::Vector3d& rest_dir,
                      const Eigen::Vector3d& l_hat, int leg, const char* side) {
    const Eigen::Vector3d cross = u_fixed.cross(l_hat);
    if (cross.norm() < kGimbalTol)
        throw GimbalDegenerateError("leg " + std::to_string(leg + 1) + " " + side +
                                    " joint: actuator parallel to the first yoke axis");

    JointFrame f;
    f.u_hat = u_fixed;
    f.l_hat = l_hat;
    f.v_hat = cross.normalized();
    f.c_hat = f.u_hat.cross(f.v_hat);

    // Decompose l = R_u(alpha) R_m(beta') n with n the rest direction and
    // m = n x u. Components: l.u = sin(beta), l.n = cos(beta) cos(alpha),
    // l.m = -cos(beta) sin(alpha).
    const Eigen::Vector3d n = rest_dir;
    const Eigen::Vector3d m = n.cross(u_fixed);
    f.beta = std::asin(std::clamp(l_hat.dot(u_fixed), -1.0, 1.0));
    f.alpha = std::atan2(-l_hat.dot(m), l_hat.dot(n));
    return f;
}

}  // namespace

LegJointState joint_axes(const Pose& pose, const HexapodGeometry& geom, int leg) {
    if (leg < 0 || leg >= kNumLegs) throw Error("joint_axes: leg index out of range");
    const auto sol = kinematics::inverse_kinematics(pose, geom);
    const Eigen::Vector3d l_hat = sol.unit_dirs.col(leg);

    LegJointState state;
    state.ab = make_frame(geom.base_yoke_axes.col(leg), geom.base_rest_dirs.col(leg), l_hat, leg, "AB");

    // The CD yoke is fixed to the platform; rotate its axis and rest
    // direction into the base frame before decomposing against the leg.
    const Eigen::Matrix3d r = kinematics::rotation_matrix(pose);
    state.cd = make_frame(r * geom.platform_yoke_axes.col(leg), r * geom.platform_rest_dirs.col(leg),
                          -l_hat, leg, "CD");
    return state;
}

namespace {

// Closest-distance between two segments a0..a1 and b0..b1 (Ericson-style
// clamped quadratic).
double segment_segment_distance(const Eigen::Vector3d& a0, const Eigen::Vector3d& a1,
                                const Eigen::Vector3d& b0, const Eigen::Vector3d& b1) {
    const Eigen::Vector3d d1 = a1 - a0;
    const Eigen::Vector3d d2 = b1 - b0;
    const Eigen::Vector3d r = a0 - b0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a <= 1e-30 && e <= 1e-30) {
        return r.norm();
    }
    if (a <= 1e-30) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 1e-30) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            if (denom > 1e-30) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    const Eigen::Vector3d c1 = a0 + s * d1;
    const Eigen::Vector3d c2 = b0 + t * d2;
    return (c1 - c2).norm();
}

}  // namespace

double yoke_pair_distance(const YokeCapsule& yoke, double alpha, double beta) {
    // Joint-local frame: u = x, m = y, n = z (rest actuator direction).
    const Eigen::Vector3d u(1, 0, 0), m(0, 1, 0), n(0, 0, 1);

    // Articulated actuator direction and second pin axis.
    const double sa = std::sin(alpha), ca = std::cos(alpha);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const Eigen::Vector3d l = sb * u + cb * (ca * n - sa * m);
    const Eigen::Vector3d v = ca * m + sa * n;

    // Bracket yoke: capsule along the first pin, offset to the mount side.
    const Eigen::Vector3d ca0 = -yoke.offset * n - yoke.half_length * u;
    const Eigen::Vector3d ca1 = -yoke.offset * n + yoke.half_length * u;
    // Actuator yoke: capsule along the second pin, offset along the leg.
    const Eigen::Vector3d cb0 = yoke.offset * l - yoke.half_length * v;
    const Eigen::Vector3d cb1 = yoke.offset * l + yoke.half_length * v;

    const double d = segment_segment_distance(ca0, ca1, cb0, cb1) - 2.0 * yoke.radius;
    return std::max(d, 0.0);
}

ClearanceTable build_clearance_table(const YokeCapsule& yoke, double step_rad) {
    if (yoke.radius <= 0.0 || yoke.half_length <= 0.0 || yoke.offset <= 0.0)
        throw Error("clearance table: yoke dimensions must be positive");
    if (step_rad <= 0.0) throw Error("clearance table: step must be positive");

    const int n = static_cast<int>(std::round(deg2rad(90.0) / step_rad)) + 1;
    ClearanceTable table;
    table.step_rad = step_rad;
    table.yoke = yoke;
    table.min_distance_mm.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const double alpha = i * step_rad;
        for (int j = 0; j < n; ++j)
            table.min_distance_mm(i, j) = 1000.0 * yoke_pair_distance(yoke, alpha, j * step_rad);
    }
    return table;
}

double clearance_at_angles(const ClearanceTable& table, double alpha, double beta) {
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    const double maxa = table.max_angle();
    if (a > maxa + 1e-12 || b > maxa + 1e-12)
        throw AngleOutOfTableError("joint angle beyond the clearance table range");

    const double fi = std::min(a, maxa) / table.step_rad;
    const double fj = std::min(b, maxa) / table.step_rad;
    const int i = std::min(static_cast<int>(fi), table.nodes() - 2);
    const int j = std::min(static_cast<int>(fj), table.nodes() - 2);
    const double di = fi - i;
    const double dj = fj - j;
    const auto& t = table.min_distance_mm;
    return (1 - di) * (1 - dj) * t(i, j) + di * (1 - dj) * t(i + 1, j) + (1 - di) * dj * t(i, j + 1) +
           di * dj * t(i + 1, j + 1);
}

Vector6d clearance_at(const Pose& pose, const HexapodGeometry& geom, const ClearanceTable& table) {
    Vector6d out;
    for (int leg = 0; leg < kNumLegs; ++leg) {
        const LegJointState st = joint_axes(pose, geom, leg);
        const double ab = clearance_at_angles(table, st.ab.alpha, st.ab.beta);
        const double cd = clearance_at_angles(table, st.cd.alpha, st.cd.beta);
        out[leg] = std::min(ab, cd);
    }
    return out;
}

bool pose_joints_ok(const Pose& pose, const HexapodGeometry& geom, const ClearanceTable& table,
                    double threshold_mm) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
        LegJointState st;
        try {
            st = joint_axes(pose, geom, leg);
        } catch (const GimbalDegenerateError&) {
            return false;
        }
        if (st.max_angle() > geom.max_joint_angle) return false;
        try {
            const double ab = clearance_at_angles(table, st.ab.alpha, st.ab.beta);
            const double cd = clearance_at_angles(table, st.cd.alpha, st.cd.beta);
            if (std::min(ab, cd) < threshold_mm) return false;
        } catch (const AngleOutOfTableError&) {
            return false;
        }
    }
    return true;
}

std::optional<int> assert_no_collision(const std::vector<Pose>& trajectory, const HexapodGeometry& geom,
                                       const ClearanceTable& table, double threshold_mm) {
    for (size_t i = 0; i < trajectory.size(); ++i) {
        bool ok = true;
        try {
            const Vector6d c = clearance_at(trajectory[i], geom, table);
            ok = (c.minCoeff() >= threshold_mm);
        } catch (const Error&) {
            ok = false;  // out-of-table angles or a degenerate joint count as violations
        }
        if (!ok) return static_cast<int>(i);
    }
    return std::nullopt;
}

namespace {

uint64_t table_checksum(const Eigen::MatrixXd& m) {
    // FNV-1a over the raw doubles.
    uint64_t h = 1469598103934665603ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
    const size_t len = sizeof(double) * static_cast<size_t>(m.size());
    for (size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

void save_clearance_table(const ClearanceTable& table, const std::filesystem::path& file) {
    nlohmann::ordered_json header;
    header["schema"] = "hexsid-clearance-v1";
    header["step_rad"] = table.step_rad;
    header["nodes"] = table.nodes();
    header["yoke"] = {{"radius_m", table.yoke.radius},
                      {"half_length_m", table.yoke.half_length},
                      {"offset_m", table.yoke.offset}};
    header["checksum_fnv1a"] = table_checksum(table.min_distance_mm);
    const std::string htext = header.dump();

    std::ofstream out(file, std::ios::binary);
    if (!out) throw FileFormatError("cannot write clearance table: " + file.string());
    const uint32_t hlen = static_cast<uint32_t>(htext.size());
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), hlen);
    out.write(reinterpret_cast<const char*>(table.min_distance_mm.data()),
              sizeof(double) * table.min_distance_mm.size());
}

std::optional<ClearanceTable> try_load_clearance_table(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    uint32_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (!in || hlen == 0 || hlen > (1u << 20)) return std::nullopt;
    std::string htext(hlen, '\0');
    in.read(htext.data(), hlen);
    if (!in) return std::nullopt;

    nlohmann::json header = nlohmann::json::parse(htext, nullptr, false);
    if (header.is_discarded() || header.value("schema", "") != "hexsid-clearance-v1") return std::nullopt;

    ClearanceTable table;
    table.step_rad = header.at("step_rad").get<double>();
    const int n = header.at("nodes").get<int>();
    table.yoke.radius = header.at("yoke").at("radius_m").get<double>();
    table.yoke.half_length = header.at("yoke").at("half_length_m").get<double>();
    table.yoke.offset = header.at("yoke").at("offset_m").get<double>();
    table.min_distance_mm.resize(n, n);
    in.read(reinterpret_cast<char*>(table.min_distance_mm.data()),
            sizeof(double) * table.min_distance_mm.size());
    if (!in) return std::nullopt;
    if (table_checksum(table.min_distance_mm) != header.at("checksum_fnv1a").get<uint64_t>())
        return std::nullopt;
    return table;
}

ClearanceTable cached_clearance_table(const YokeCapsule& yoke, const std::filesystem::path& cache_file,
                                      double step_rad) {
    if (auto cached = try_load_clearance_table(cache_file)) {
        if (cached->yoke == yoke && std::abs(cached->step_rad - step_rad) < 1e-15) return *cached;
    }
    ClearanceTable table = build_clearance_table(yoke, step_rad);
    std::error_code ec;
    std::filesystem::create_directories(cache_file.parent_path(), ec);
    save_clearance_table(table, cache_file);
    return table;
}

}  // namespace hexsid::joints
