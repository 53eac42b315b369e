#include "hexsid/excitation.hpp"

#include <algorithm>
#include <random>

#include "hexsid/errors.hpp"
#include "hexsid/kinematics.hpp"

namespace hexsid::excitation {

void MultisineDesign::validate() const {
    if (t0 <= 0.0 || fs <= 0.0) throw Error("design: t0 and fs must be positive");
    const double ns = fs * t0;
    if (std::abs(ns - std::lround(ns)) > 1e-9) throw Error("design: fs * t0 must be an integer");
    if (harmonics.empty()) throw Error("design: no excited harmonics");
    for (size_t i = 0; i < harmonics.size(); ++i) {
        if (harmonics[i] <= 0) throw Error("design: harmonic indices must be positive");
        if (i > 0 && harmonics[i] <= harmonics[i - 1])
            throw Error("design: harmonics must be strictly increasing");
    }
    if (harmonics.back() >= samples_per_period() / 2)
        throw Error("design: highest harmonic exceeds the Nyquist bin");
    if (dofs.empty()) throw Error("design: no excited DOFs");
    for (int d : dofs)
        if (d < 0 || d >= kNumDofs) throw Error("design: DOF index out of range");
    if (amplitudes.rows() != n_inputs() || amplitudes.cols() != n_harmonics())
        throw Error("design: amplitude table must be n_inputs x n_harmonics");
    if (realizations < 2) throw Error("design: at least 2 realizations are required");
    if (periods < 1) throw Error("design: at least one period is required");
    if (ramp_s < 0.0) throw Error("design: ramp duration must be non-negative");
    if (!phases.empty()) {
        if (static_cast<int>(phases.size()) != realizations)
            throw Error("design: phase sets must cover every realization");
        for (const auto& experiments : phases) {
            if (static_cast<int>(experiments.size()) != n_experiments())
                throw Error("design: each realization needs n_inputs experiments");
            for (const auto& m : experiments)
                if (m.rows() != n_inputs() || m.cols() != n_harmonics())
                    throw Error("design: phase matrices must be n_inputs x n_harmonics");
        }
    }
}

Eigen::ArrayXd multisine_series(const std::vector<int>& harmonics, double t0,
                                const Eigen::Ref<const Eigen::RowVectorXd>& amplitudes,
                                const Eigen::Ref<const Eigen::RowVectorXd>& phases,
                                const Eigen::Ref<const Eigen::ArrayXd>& t, int derivative) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(t.size());
    for (size_t k = 0; k < harmonics.size(); ++k) {
        const double w = 2.0 * kPi * harmonics[k] / t0;
        const double gain = amplitudes[static_cast<int>(k)] * std::pow(w, derivative);
        const double ph = phases[static_cast<int>(k)] + derivative * kPi / 2.0;
        out += gain * (w * t + ph).cos();
    }
    return out;
}

namespace {

const Eigen::MatrixXd& phase_matrix(const MultisineDesign& d, int realization, int experiment) {
    if (realization < 0 || realization >= static_cast<int>(d.phases.size()))
        throw Error("design: realization has no phases yet");
    return d.phases[realization][experiment];
}

}  // namespace

Eigen::ArrayXd synthesize_multisine(const MultisineDesign& design, int input, int experiment,
                                    int realization, int derivative) {
    const int n = design.samples_per_period();
    const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0.0, (n - 1.0)) / design.fs;
    return multisine_series(design.harmonics, design.t0, design.amplitudes.row(input),
                            phase_matrix(design, realization, experiment).row(input), t, derivative);
}

double crest_factor(const Eigen::Ref<const Eigen::ArrayXd>& signal) {
    const double rms = std::sqrt(signal.square().mean());
    if (!(rms > 0.0)) throw ZeroSignalError("crest factor of an all-zero signal");
    return signal.abs().maxCoeff() / rms;
}

double analytic_rms(const MultisineDesign& design, int input, int derivative) {
    double acc = 0.0;
    for (int k = 0; k < design.n_harmonics(); ++k) {
        const double a = design.amplitudes(input, k) * std::pow(design.omega(k), derivative);
        acc += a * a;
    }
    return std::sqrt(acc / 2.0);
}

double design_crest_factor(const MultisineDesign& design, int input, int experiment, int realization,
                           int derivative) {
    const double rms = analytic_rms(design, input, derivative);
    if (!(rms > 0.0)) throw ZeroSignalError("crest factor of an all-zero design signal");

    const auto& phases = phase_matrix(design, realization, experiment);
    const Eigen::RowVectorXd amp = design.amplitudes.row(input);
    const Eigen::RowVectorXd ph = phases.row(input);

    // 16x-oversampled scan of one period, then Newton polish of the extremum.
    const int n = std::max(4096, 32 * design.harmonics.back());
    const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0.0, (n - 1.0)) * (design.t0 / n);
    const Eigen::ArrayXd u = multisine_series(design.harmonics, design.t0, amp, ph, t, derivative);

    int imax = 0;
    u.abs().maxCoeff(&imax);
    double tstar = t[imax];
    auto eval = [&](double tt, int extra) {
        Eigen::ArrayXd one(1);
        one[0] = tt;
        return multisine_series(design.harmonics, design.t0, amp, ph, one, derivative + extra)[0];
    };
    for (int it = 0; it < 6; ++it) {
        const double d1 = eval(tstar, 1);
        const double d2 = eval(tstar, 2);
        if (std::abs(d2) < 1e-30) break;
        const double step = d1 / d2;
        if (std::abs(step) > design.t0 / n) break;  // polish only within the cell
        tstar -= step;
    }
    const double peak = std::max(std::abs(eval(tstar, 0)), u.abs().maxCoeff());
    return peak / rms;
}

std::vector<Eigen::MatrixXd> orthogonal_set(const Eigen::MatrixXd& base_phases) {
    const int n_u = static_cast<int>(base_phases.rows());
    std::vector<Eigen::MatrixXd> experiments(n_u);
    for (int m = 0; m < n_u; ++m) {
        experiments[m] = base_phases;
        for (int j = 0; j < n_u; ++j)
            experiments[m].row(j).array() -= 2.0 * kPi * m * j / n_u;
    }
    return experiments;
}

Eigen::MatrixXcd input_line_matrix(const MultisineDesign& design, int realization, int harmonic_index) {
    const int n_u = design.n_inputs();
    Eigen::MatrixXcd u(n_u, n_u);  // rows: experiments, cols: inputs
    for (int m = 0; m < n_u; ++m) {
        const auto& ph = phase_matrix(design, realization, m);
        for (int j = 0; j < n_u; ++j) {
            const double a = design.amplitudes(j, harmonic_index);
            u(m, j) = std::polar(a, ph(j, harmonic_index));
        }
    }
    return u;
}

namespace {

// Shared evaluation machinery for the l_2p objective: one cos/sin basis over
// the period grid serves every input; amplitudes fold into K-vectors.
struct ObjectiveWorkspace {
    Eigen::MatrixXd cos_basis;  // n_eval x K
    Eigen::MatrixXd sin_basis;
    Eigen::VectorXd omega_sq;   // (2 pi k / T0)^2
    std::vector<double> rms_disp;   // per input
    std::vector<double> rms_accel;

    ObjectiveWorkspace(const MultisineDesign& d, int n_eval) {
        const int k = d.n_harmonics();
        cos_basis.resize(n_eval, k);
        sin_basis.resize(n_eval, k);
        omega_sq.resize(k);
        for (int h = 0; h < k; ++h) {
            const double w = d.omega(h);
            omega_sq[h] = w * w;
            // theta_{n,h} = 2 pi harmonic * n / n_eval over one period
            for (int n = 0; n < n_eval; ++n) {
                const double th = 2.0 * kPi * d.harmonics[h] * n / n_eval;
                cos_basis(n, h) = std::cos(th);
                sin_basis(n, h) = std::sin(th);
            }
        }
        for (int j = 0; j < d.n_inputs(); ++j) {
            rms_disp.push_back(analytic_rms(d, j, 0));
            rms_accel.push_back(analytic_rms(d, j, 2));
        }
    }
};

// Objective and gradient of sum_{m,j} l_2p(u_mj, uddot_mj) over the base
// phases. Experiment offsets are constant angles, so d/d(base) carries over.
double objective_and_gradient(const MultisineDesign& d, const ObjectiveWorkspace& ws,
                              const Eigen::MatrixXd& base, int p, Eigen::MatrixXd* grad) {
    const int n_u = d.n_inputs();
    const int k = d.n_harmonics();
    const int n_eval = static_cast<int>(ws.cos_basis.rows());
    if (grad) grad->setZero(n_u, k);

    double total = 0.0;
    for (int m = 0; m < n_u; ++m) {
        for (int j = 0; j < n_u; ++j) {
            const double offset = -2.0 * kPi * m * j / n_u;
            Eigen::ArrayXd cphi(k), sphi(k);
            for (int h = 0; h < k; ++h) {
                cphi[h] = std::cos(base(j, h) + offset);
                sphi[h] = std::sin(base(j, h) + offset);
            }
            const Eigen::VectorXd a = d.amplitudes.row(j).transpose();
            const Eigen::VectorXd ac = a.array() * cphi;
            const Eigen::VectorXd as = a.array() * sphi;
            const Eigen::VectorXd bc = ws.omega_sq.array() * ac.array();
            const Eigen::VectorXd bs = ws.omega_sq.array() * as.array();

            const Eigen::ArrayXd u = (ws.cos_basis * ac - ws.sin_basis * as).array() / ws.rms_disp[j];
            const Eigen::ArrayXd acc =
                -(ws.cos_basis * bc - ws.sin_basis * bs).array() / ws.rms_accel[j];

            const Eigen::ArrayXd u2p = u.square().pow(p);
            const Eigen::ArrayXd a2p = acc.square().pow(p);
            const double s = (u2p + a2p).mean();
            const double j_sig = std::pow(s, 1.0 / (2.0 * p));
            total += j_sig;

            if (grad) {
                // u^{2p-1} = u2p / u, safe since u2p vanishes faster than u
                Eigen::ArrayXd gu = Eigen::ArrayXd::Zero(n_eval), ga = Eigen::ArrayXd::Zero(n_eval);
                for (int n = 0; n < n_eval; ++n) {
                    gu[n] = u[n] == 0.0 ? 0.0 : u2p[n] / u[n];
                    ga[n] = acc[n] == 0.0 ? 0.0 : a2p[n] / acc[n];
                }
                const Eigen::VectorXd wu_s = ws.sin_basis.transpose() * gu.matrix();
                const Eigen::VectorXd wu_c = ws.cos_basis.transpose() * gu.matrix();
                const Eigen::VectorXd wa_s = ws.sin_basis.transpose() * ga.matrix();
                const Eigen::VectorXd wa_c = ws.cos_basis.transpose() * ga.matrix();
                const double j_scale = j_sig / s / (2.0 * p) * (2.0 * p) / n_eval;
                for (int h = 0; h < k; ++h) {
                    // d u(t)/dphi_h = -(A/rms) sin(theta + phi), and the
                    // acceleration picks up the opposite sign from its
                    // leading minus.
                    const double du = -(cphi[h] * wu_s[h] + sphi[h] * wu_c[h]) * a[h] / ws.rms_disp[j];
                    const double da =
                        (cphi[h] * wa_s[h] + sphi[h] * wa_c[h]) * a[h] * ws.omega_sq[h] / ws.rms_accel[j];
                    (*grad)(j, h) += j_scale * (du + da);
                }
            }
        }
    }
    return total;
}

}  // namespace

CubicSegment cubic_segment(double p0, double v0, double p1, double v1, double duration) {
    if (duration <= 0.0) throw Error("cubic segment: duration must be positive");
    const double dp = p1 - p0 - v0 * duration;
    const double dv = v1 - v0;
    CubicSegment seg;
    seg.p0 = p0;
    seg.v0 = v0;
    seg.duration = duration;
    seg.c3 = (dv * duration - 2.0 * dp) / (duration * duration * duration);
    seg.c2 = (3.0 * dp - dv * duration) / (duration * duration);
    return seg;
}

CubicSegment ramp_segment(double target_position, double target_velocity, double duration) {
    return cubic_segment(0.0, 0.0, target_position, target_velocity, duration);
}

OptimizeReport optimize_phases(MultisineDesign& design, int realization, const OptimizeOptions& opts) {
    design.validate();
    if (realization < 0 || realization >= static_cast<int>(design.phases.size()))
        throw Error("optimize_phases: realization has no phases");

    OptimizeReport report;
    Eigen::MatrixXd base = design.phases[realization][0];

    auto worst_cfs = [&](double* cf_u, double* cf_a) {
        *cf_u = 0.0;
        *cf_a = 0.0;
        for (int m = 0; m < design.n_experiments(); ++m)
            for (int j = 0; j < design.n_inputs(); ++j) {
                *cf_u = std::max(*cf_u, design_crest_factor(design, j, m, realization, 0));
                *cf_a = std::max(*cf_a, design_crest_factor(design, j, m, realization, 2));
            }
    };

    if (opts.effort == OptimizeEffort::None) {
        const ObjectiveWorkspace ws(design, 1024);
        report.initial_objective = report.final_objective =
            objective_and_gradient(design, ws, base, 1, nullptr);
        worst_cfs(&report.worst_cf_displacement, &report.worst_cf_acceleration);
        return report;
    }

    std::vector<int> schedule = opts.p_schedule;
    int max_iter = opts.max_iterations_per_stage;
    if (opts.effort == OptimizeEffort::Fast) {
        schedule = {2, 8};
        max_iter = std::min(max_iter, 60);
    }

    const int k_max = design.harmonics.back();
    const int p_max = *std::max_element(schedule.begin(), schedule.end());
    const int n_eval = std::clamp(2 * p_max * k_max + 1, 1024, 8192);
    const ObjectiveWorkspace ws(design, n_eval);

    report.initial_objective = objective_and_gradient(design, ws, base, schedule.front(), nullptr);

    bool any_accepted = false;
    double grad_norm0 = 0.0;
    for (int p : schedule) {
        double fval = objective_and_gradient(design, ws, base, p, nullptr);
        report.accepted_objectives.push_back(fval);
        double step = 0.1;
        for (int iter = 0; iter < max_iter; ++iter) {
            Eigen::MatrixXd grad;
            objective_and_gradient(design, ws, base, p, &grad);
            const double gn = grad.norm();
            if (p == schedule.front() && iter == 0) grad_norm0 = gn;
            if (gn < 1e-12) break;

            bool improved = false;
            for (int bt = 0; bt < 20; ++bt) {
                const Eigen::MatrixXd trial = base - (step / gn) * grad;
                const double ftrial = objective_and_gradient(design, ws, trial, p, nullptr);
                if (ftrial < fval - opts.stall_tolerance) {
                    base = trial;
                    fval = ftrial;
                    report.accepted_objectives.push_back(fval);
                    improved = true;
                    any_accepted = true;
                    step *= 1.6;
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        // Each stage only ever moves to iterates that improve its own norm,
        // so installing the running base keeps the returned design at least
        // as good as the draw it started from.
    }

    const int p_last = schedule.back();
    const double before =
        objective_and_gradient(design, ws, design.phases[realization][0], p_last, nullptr);
    const double after = objective_and_gradient(design, ws, base, p_last, nullptr);
    if (after <= before) design.phases[realization] = orthogonal_set(base);
    report.final_objective = std::min(before, after);
    report.stalled = !any_accepted && grad_norm0 > 1e-6;

    worst_cfs(&report.worst_cf_displacement, &report.worst_cf_acceleration);
    return report;
}

std::vector<OptimizeReport> randomize_and_optimize(MultisineDesign& design, std::uint64_t seed,
                                                   const OptimizeOptions& opts) {
    design.phases.assign(design.realizations, {});
    for (int r = 0; r < design.realizations; ++r) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (r + 1));
        std::uniform_real_distribution<double> uni(-kPi, kPi);
        Eigen::MatrixXd base(design.n_inputs(), design.n_harmonics());
        for (int j = 0; j < base.rows(); ++j)
            for (int h = 0; h < base.cols(); ++h) base(j, h) = uni(rng);
        design.phases[r] = orthogonal_set(base);
    }
    std::vector<OptimizeReport> reports;
    for (int r = 0; r < design.realizations; ++r) reports.push_back(optimize_phases(design, r, opts));
    return reports;
}

std::vector<Pose> Trajectory::poses() const {
    std::vector<Pose> out(samples());
    for (int i = 0; i < samples(); ++i) out[i] = Pose::from_vector(pose_dofs.col(i));
    return out;
}

Trajectory build_trajectory(const MultisineDesign& design, int experiment, int realization,
                            const HexapodGeometry* geom) {
    design.validate();
    Trajectory traj;
    traj.fs = design.fs;
    traj.period_samples = design.samples_per_period();
    traj.periods = design.periods;
    traj.ramp_samples = static_cast<int>(std::lround(design.fs * design.ramp_s));

    const int n_steady = traj.periods * traj.period_samples;
    const int n_total = 2 * traj.ramp_samples + n_steady;
    traj.pose_dofs.setZero(6, n_total);
    traj.accel.setZero(6, n_total);

    const double dt = traj.dt();
    for (int j = 0; j < design.n_inputs(); ++j) {
        const int dof = design.dofs[j];
        const Eigen::ArrayXd u = synthesize_multisine(design, j, experiment, realization, 0);
        const Eigen::ArrayXd udd = synthesize_multisine(design, j, experiment, realization, 2);

        Eigen::ArrayXd one(1);
        one[0] = 0.0;
        const double u0 = u[0];
        const double v0 = multisine_series(design.harmonics, design.t0, design.amplitudes.row(j),
                                           design.phases[realization][experiment].row(j), one, 1)[0];

        for (int pidx = 0; pidx < traj.periods; ++pidx) {
            const int off = traj.ramp_samples + pidx * traj.period_samples;
            traj.pose_dofs.row(dof).segment(off, traj.period_samples) = u.matrix().transpose();
            traj.accel.row(dof).segment(off, traj.period_samples) = udd.matrix().transpose();
        }

        if (traj.ramp_samples > 0) {
            const CubicSegment in = ramp_segment(u0, v0, design.ramp_s);
            const CubicSegment out = cubic_segment(u0, v0, 0.0, 0.0, design.ramp_s);
            for (int i = 0; i < traj.ramp_samples; ++i) {
                const double tau_in = i * dt;
                traj.pose_dofs(dof, i) = in.position(tau_in);
                traj.accel(dof, i) = in.acceleration(tau_in);
                const int iout = traj.ramp_samples + n_steady + i;
                traj.pose_dofs(dof, iout) = out.position(tau_in);
                traj.accel(dof, iout) = out.acceleration(tau_in);
            }
        }
    }

    if (geom) {
        for (int i = 0; i < n_total; ++i) {
            const auto sol = kinematics::inverse_kinematics(Pose::from_vector(traj.pose_dofs.col(i)), *geom);
            if (!sol.all_within_stroke())
                throw WorkspaceViolationError("trajectory sample " + std::to_string(i) +
                                              " leaves the actuator stroke");
        }
    }
    return traj;
}

}  // namespace hexsid::excitation
