#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hexsid/excitation.hpp"
#include "hexsid/types.hpp"

namespace hexsid::plant {

/// Lumped solid + fluid model of the suspended body: constant solid
/// mass/inertia, frequency-tabulated added mass and damping, optional total
/// stiffness, optional per-DOF quadratic drag as a residual-force hook.
struct HydroModel {
    std::string name;
    Matrix6d solid_mass = Matrix6d::Zero();

    std::vector<double> table_freqs_hz;    // strictly increasing; may be empty
    std::vector<Matrix6d> added_mass;      // per tabulated frequency
    std::vector<Matrix6d> added_damping;   // per tabulated frequency

    Matrix6d stiffness = Matrix6d::Zero();
    Vector6d quad_drag = Vector6d::Zero();  // F_j = -c_j |v_j| v_j

    bool has_tables() const { return !table_freqs_hz.empty(); }
    void validate() const;
};

/// Interpolated added mass/damping at angular frequency omega.
void added_terms_at(const HydroModel& model, double omega, Matrix6d* m_fl, Matrix6d* c_fl);

/// Acceleration-to-force response at omega:
/// (M_s + M_FL(w)) - (i/w) C_FL(w) - (1/w^2) K.
/// Throws FrequencyOutOfTableError outside the tabulated band.
Matrix6cd plant_frf(const HydroModel& model, double omega);

/// Imperfect load cell: per-channel white noise, a trigger delay applied as
/// a circular shift of the periodic steady segment, and a gauge-fault gain
/// on the x/y force channels that may vary affinely with the z-axis load.
struct LoadCellModel {
    Vector6d noise_std = Vector6d::Zero();      // N / N m per channel
    double trigger_delay_s = 0.0;
    double fault_gain = 1.0;                    // multiplier on Fx, Fy
    double fault_gain_per_newton = 0.0;         // extra gain per N of Fz
    Eigen::Vector3d datum_offset = Eigen::Vector3d::Zero();  // cell origin
                                                             // relative to the motion datum,
                                                             // platform frame, m
    bool identity() const {
        return noise_std.isZero() && trigger_delay_s == 0.0 && fault_gain == 1.0 &&
               fault_gain_per_newton == 0.0;
    }
};

/// Time-aligned commanded accelerations (motion datum) and measured wrenches
/// (load-cell datum) of one experiment run.
struct MeasurementRecord {
    double fs = 0.0;
    Eigen::MatrixXd accel_cmd;    // 6 x N, m/s^2 and rad/s^2
    Eigen::MatrixXd wrench_meas;  // 6 x N, N and N m

    int ramp_samples = 0;
    int period_samples = 0;
    int periods = 0;

    std::string design_id;
    int experiment = 0;
    int realization = 0;
    std::uint64_t seed = 0;
    Eigen::Vector3d cell_datum_offset = Eigen::Vector3d::Zero();

    int samples() const { return static_cast<int>(wrench_meas.cols()); }
    int steady_begin() const { return ramp_samples; }
    int steady_samples() const { return periods * period_samples; }
};

/// Apply the load-cell imperfections to an ideal wrench series (6 x N laid
/// out like MeasurementRecord::wrench_meas): fault gain, then the trigger
/// delay (circular on the steady block), then additive noise.
Eigen::MatrixXd apply_load_cell(const Eigen::MatrixXd& ideal, const LoadCellModel& cell, double fs,
                                int steady_begin, int steady_samples, std::uint64_t noise_seed);

/// Run one virtual experiment: steady-state force synthesis per excited
/// line through plant_frf, optional quadratic-drag residual in the time
/// domain, translation to the load-cell datum, then apply_load_cell. Ramp
/// windows carry the periodic extension of the steady-state response and
/// are excluded from identification downstream.
MeasurementRecord simulate_experiment(const excitation::MultisineDesign& design, int experiment,
                                      int realization, const HydroModel& model,
                                      const LoadCellModel& cell, std::uint64_t seed);

/// Fixture I/O (JSON; schema in FORMATS.md).
HydroModel load_hydro_model(const std::filesystem::path& file);
void save_hydro_model(const HydroModel& model, const std::filesystem::path& file);

/// Bare test body: diagonal solid mass with uniform-cylinder inertias and no
/// fluid terms.
HydroModel dry_cylinder_model(double mass_kg = 16.67);

/// Submerged test body: the dry cylinder plus smooth frequency-dependent
/// added mass/damping tables spanning [f_lo, f_hi] on a resolution_hz grid.
HydroModel wet_cylinder_model(double f_lo_hz = 0.3, double f_hi_hz = 2.5, double resolution_hz = 0.05);

/// Fully populated symmetric coupled model for MIMO checks, smooth in
/// frequency with every entry bounded away from zero.
HydroModel coupled_model(double f_lo_hz = 0.3, double f_hi_hz = 2.5, double resolution_hz = 0.05);

}  // namespace hexsid::plant
