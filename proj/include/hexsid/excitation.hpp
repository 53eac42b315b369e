#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexsid/geometry.hpp"
#include "hexsid/types.hpp"

namespace hexsid::excitation {

/// Full random orthogonal multisine design. Excited frequencies are exact
/// integer multiples k/T0, so every signal is exactly periodic on the fs
/// grid (fs*T0 must be an integer number of samples).
struct MultisineDesign {
    std::string id;
    std::vector<int> harmonics;  // excited harmonic indices k; f_k = k / T0
    double t0 = 20.0;            // fundamental period, s
    double fs = 200.0;           // sample rate, Hz
    std::vector<int> dofs;       // excited pose DOFs (0..5), one input each
    Eigen::MatrixXd amplitudes;  // n_inputs x n_harmonics, m or rad

    // phases[realization][experiment] is an n_inputs x n_harmonics matrix of
    // radians; experiments carry the orthogonal per-input phase offsets.
    std::vector<std::vector<Eigen::MatrixXd>> phases;

    int periods = 10;       // repetitions P per realization
    int realizations = 2;   // M
    double ramp_s = 1.0;

    int n_inputs() const { return static_cast<int>(dofs.size()); }
    int n_harmonics() const { return static_cast<int>(harmonics.size()); }
    int n_experiments() const { return n_inputs(); }
    int samples_per_period() const { return static_cast<int>(std::lround(fs * t0)); }
    double frequency_hz(int h) const { return harmonics[h] / t0; }
    double omega(int h) const { return 2.0 * kPi * harmonics[h] / t0; }

    /// Validate the type invariants; throws on violation.
    void validate() const;
};

/// Evaluate the d-th derivative of the multisine with the given amplitude and
/// phase rows on an arbitrary time grid:
/// u^(d)(t) = sum_k A_k (2 pi k/T0)^d cos(2 pi k t/T0 + phi_k + d pi/2).
Eigen::ArrayXd multisine_series(const std::vector<int>& harmonics, double t0,
                                const Eigen::Ref<const Eigen::RowVectorXd>& amplitudes,
                                const Eigen::Ref<const Eigen::RowVectorXd>& phases,
                                const Eigen::Ref<const Eigen::ArrayXd>& t, int derivative = 0);

/// One period of input `input` of experiment `experiment` on the design's fs
/// grid (samples_per_period() points starting at t = 0).
Eigen::ArrayXd synthesize_multisine(const MultisineDesign& design, int input, int experiment,
                                    int realization, int derivative = 0);

/// Peak-over-rms of a sampled series covering an integer number of periods.
/// Throws ZeroSignalError on zero rms.
double crest_factor(const Eigen::Ref<const Eigen::ArrayXd>& signal);

/// Crest factor of a design signal evaluated analytically: rms from the
/// amplitude schedule, peak located on a 16x-oversampled grid and polished by
/// Newton steps on the derivative.
double design_crest_factor(const MultisineDesign& design, int input, int experiment, int realization,
                           int derivative = 0);

/// Analytic rms of the d-th derivative, sqrt(sum (A_k w_k^d)^2 / 2).
double analytic_rms(const MultisineDesign& design, int input, int derivative);

enum class OptimizeEffort { None, Fast, Full };

struct OptimizeReport {
    double initial_objective = 0.0;
    double final_objective = 0.0;
    std::vector<double> accepted_objectives;  // non-increasing
    double worst_cf_displacement = 0.0;       // over inputs x experiments
    double worst_cf_acceleration = 0.0;
    bool stalled = false;
};

struct OptimizeOptions {
    OptimizeEffort effort = OptimizeEffort::Full;
    std::vector<int> p_schedule = {1, 2, 4, 8, 16, 32};
    int max_iterations_per_stage = 200;
    double stall_tolerance = 1e-12;
};

/// Crest-factor phase optimization of one realization: minimizes the summed
/// l_2p norm of each signal's displacement/acceleration pair (both rms
/// normalized) over the base phases, with a progressive-p schedule. The
/// orthogonal experiment offsets are preserved. The accepted-objective
/// sequence is non-increasing by construction.
OptimizeReport optimize_phases(MultisineDesign& design, int realization,
                               const OptimizeOptions& opts = {});

/// Populate design.phases for every realization: seeded random base phases
/// expanded into the orthogonal experiment set, then optimized at the given
/// effort.
std::vector<OptimizeReport> randomize_and_optimize(MultisineDesign& design, std::uint64_t seed,
                                                   const OptimizeOptions& opts = {});

/// Expand per-input base phases into the n_u experiments of the orthogonal
/// set: experiment m shifts input j by the angle of row m of the n_u-point
/// DFT matrix, so the per-frequency input matrix U(k) satisfies
/// U^H(k) U(k) = c(k) I when the amplitude schedule is input-uniform.
std::vector<Eigen::MatrixXd> orthogonal_set(const Eigen::MatrixXd& base_phases);

/// Per-frequency input matrix U(k) (rows = experiments, cols = inputs) of
/// complex displacement line amplitudes.
Eigen::MatrixXcd input_line_matrix(const MultisineDesign& design, int realization, int harmonic_index);

/// Cubic segment with prescribed endpoint positions and velocities.
struct CubicSegment {
    double p0, v0, c2, c3, duration;
    double position(double tau) const { return p0 + tau * (v0 + tau * (c2 + tau * c3)); }
    double velocity(double tau) const { return v0 + tau * (2.0 * c2 + 3.0 * tau * c3); }
    double acceleration(double tau) const { return 2.0 * c2 + 6.0 * c3 * tau; }
};

CubicSegment cubic_segment(double p0, double v0, double p1, double v1, double duration);

/// Ramp from rest to the target position/velocity over `duration`.
CubicSegment ramp_segment(double target_position, double target_velocity, double duration = 1.0);

enum class Segment { RampIn, Steady, RampOut };

/// Executable trajectory: ramp-in, P bit-identical periods, ramp-out, on the
/// uniform fs grid. Pose rows follow the pose vector order.
struct Trajectory {
    double fs = 0.0;
    int ramp_samples = 0;
    int period_samples = 0;
    int periods = 0;
    Eigen::MatrixXd pose_dofs;  // 6 x N
    Eigen::MatrixXd accel;      // 6 x N, analytic second derivative

    int samples() const { return static_cast<int>(pose_dofs.cols()); }
    double dt() const { return 1.0 / fs; }
    double duration() const { return samples() / fs; }
    Segment segment(int i) const {
        if (i < ramp_samples) return Segment::RampIn;
        if (i < ramp_samples + periods * period_samples) return Segment::Steady;
        return Segment::RampOut;
    }
    int steady_begin() const { return ramp_samples; }
    int steady_samples() const { return periods * period_samples; }
    std::vector<Pose> poses() const;
};

/// Assemble the full trajectory of one experiment. When `geom` is given,
/// every sample is checked for reachability and WorkspaceViolationError is
/// thrown on the first failure.
Trajectory build_trajectory(const MultisineDesign& design, int experiment, int realization,
                            const HexapodGeometry* geom = nullptr);

}  // namespace hexsid::excitation
