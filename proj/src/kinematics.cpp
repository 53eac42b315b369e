#include "hexsid/kinematics.hpp"

#include <cmath>
#include <sstream>

#include "hexsid/errors.hpp"

namespace hexsid::kinematics {

Eigen::Matrix3d rotation_matrix(const Pose& pose) {
    const double st = std::sin(pose.theta), ct = std::cos(pose.theta);
    const double sp = std::sin(pose.phi), cp = std::cos(pose.phi);
    const double ss = std::sin(pose.psi), cs = std::cos(pose.psi);
    Eigen::Matrix3d r;
    r << cs * cp, cs * st * sp - ss * ct, ct * cs * sp + ss * st,
         ss * cp, ss * st * sp + cs * ct, ss * sp * ct - cs * st,
         -sp,     cp * st,                ct * cp;
    return r;
}

Eigen::Vector3d platform_origin(const Pose& pose, const HexapodGeometry& geom) {
    // The commanded pose moves the motion datum; the platform origin trails
    // it by the rotated datum offset.
    const Eigen::Vector3d d = geom.motion_datum_offset;
    return pose.translation() + d - rotation_matrix(pose) * d;
}

IkSolution inverse_kinematics(const Pose& pose, const HexapodGeometry& geom) {
    const Eigen::Matrix3d r = rotation_matrix(pose);
    const Eigen::Vector3d p_cm = platform_origin(pose, geom);

    IkSolution sol;
    for (int i = 0; i < kNumLegs; ++i) {
        const Eigen::Vector3d p_world = p_cm + r * geom.platform_points.col(i);
        const Eigen::Vector3d link = p_world - geom.base_points.col(i);
        const double len = link.norm();
        sol.platform_points_world.col(i) = p_world;
        sol.links.col(i) = link;
        sol.lengths[i] = len;
        sol.unit_dirs.col(i) = link / len;
        sol.within_stroke[i] = (len >= geom.l_min && len <= geom.l_max);
    }
    return sol;
}

Vector6d leg_lengths_checked(const Pose& pose, const HexapodGeometry& geom) {
    const IkSolution sol = inverse_kinematics(pose, geom);
    if (!sol.all_within_stroke()) {
        std::ostringstream msg;
        msg << "actuator length outside [" << geom.l_min << ", " << geom.l_max << "] m for legs";
        for (int i = 0; i < kNumLegs; ++i)
            if (!sol.within_stroke[i]) msg << ' ' << (i + 1) << " (" << sol.lengths[i] << " m)";
        throw OutOfStrokeError(msg.str());
    }
    return sol.lengths;
}

Pose forward_kinematics(const Vector6d& target, const Pose& guess, const HexapodGeometry& geom,
                        const ForwardKinematicsOptions& opts) {
    Vector6d p = guess.to_vector();

    auto residual = [&](const Vector6d& v) -> Vector6d {
        return inverse_kinematics(Pose::from_vector(v), geom).lengths - target;
    };

    Vector6d r = residual(p);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (r.cwiseAbs().maxCoeff() < opts.tolerance) return Pose::from_vector(p);

        Matrix6d jac;
        for (int c = 0; c < 6; ++c) {
            Vector6d hi = p, lo = p;
            hi[c] += opts.fd_step;
            lo[c] -= opts.fd_step;
            jac.col(c) = (residual(hi) - residual(lo)) / (2.0 * opts.fd_step);
        }

        const Matrix6d normal = jac.transpose() * jac + opts.damping * Matrix6d::Identity();
        const Vector6d step = normal.ldlt().solve(-jac.transpose() * r);

        // Backtrack until the residual improves; a dead line search means the
        // target is out of reach from here.
        double scale = 1.0;
        bool improved = false;
        for (int k = 0; k < 12; ++k) {
            const Vector6d trial = p + scale * step;
            const Vector6d rt = residual(trial);
            if (rt.norm() < r.norm()) {
                p = trial;
                r = rt;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;
    }
    if (r.cwiseAbs().maxCoeff() < opts.tolerance) return Pose::from_vector(p);
    throw NoConvergenceError("forward kinematics did not converge; lengths may be infeasible or the "
                             "guess outside the basin");
}

const char* binding_name(BindingConstraint b) {
    switch (b) {
        case BindingConstraint::Actuator: return "actuator";
        case BindingConstraint::Joint: return "joint";
        case BindingConstraint::Cap: return "cap";
    }
    return "?";
}

namespace {

SweepLimit sweep_direction(const HexapodGeometry& geom, int dof, double step, double sign,
                           const SweepOptions& opts) {
    const double cap = dof < 3 ? opts.translation_cap : opts.rotation_cap;
    SweepLimit limit;
    limit.bound = BindingConstraint::Cap;
    double prev = 0.0;
    for (double q = step; q <= cap + 0.5 * step; q += step) {
        Vector6d v = Vector6d::Zero();
        v[dof] = sign * q;
        const Pose pose = Pose::from_vector(v);
        const IkSolution sol = inverse_kinematics(pose, geom);
        if (!sol.all_within_stroke()) {
            limit.bound = BindingConstraint::Actuator;
            break;
        }
        if (opts.joint_ok && !opts.joint_ok(pose)) {
            limit.bound = BindingConstraint::Joint;
            break;
        }
        prev = q;
    }
    limit.excursion = sign * prev;
    return limit;
}

}  // namespace

SweepResult sweep_range_of_motion(const HexapodGeometry& geom, int dof, double step,
                                  const SweepOptions& opts) {
    if (step <= 0.0) throw Error("sweep step must be positive");
    SweepResult res;
    res.positive = sweep_direction(geom, dof, step, +1.0, opts);
    res.negative = sweep_direction(geom, dof, step, -1.0, opts);
    return res;
}

}  // namespace hexsid::kinematics
