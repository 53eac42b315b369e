#include "hexsid/plant.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "hexsid/errors.hpp"
#include "hexsid/kinematics.hpp"
#include "hexsid/signal.hpp"

namespace hexsid::plant {

void HydroModel::validate() const {
    if (!solid_mass.allFinite()) throw Error("hydro model: solid mass not finite");
    const Eigen::SelfAdjointEigenSolver<Matrix6d> es(0.5 * (solid_mass + solid_mass.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw Error("hydro model: solid mass matrix must be positive definite");
    if (added_mass.size() != table_freqs_hz.size() || added_damping.size() != table_freqs_hz.size())
        throw Error("hydro model: table sizes disagree");
    for (size_t i = 1; i < table_freqs_hz.size(); ++i)
        if (table_freqs_hz[i] <= table_freqs_hz[i - 1])
            throw Error("hydro model: table frequencies must be strictly increasing");
    for (const auto& m : added_mass)
        if (!m.allFinite()) throw Error("hydro model: added mass not finite");
    for (const auto& c : added_damping)
        if (!c.allFinite()) throw Error("hydro model: added damping not finite");
}

void added_terms_at(const HydroModel& model, double omega, Matrix6d* m_fl, Matrix6d* c_fl) {
    m_fl->setZero();
    c_fl->setZero();
    if (!model.has_tables()) return;

    const double f = omega / (2.0 * kPi);
    const auto& fr = model.table_freqs_hz;
    if (f < fr.front() - 1e-9 || f > fr.back() + 1e-9)
        throw FrequencyOutOfTableError("frequency " + std::to_string(f) + " Hz outside table [" +
                                       std::to_string(fr.front()) + ", " + std::to_string(fr.back()) +
                                       "] Hz");
    if (fr.size() == 1) {
        *m_fl = model.added_mass[0];
        *c_fl = model.added_damping[0];
        return;
    }
    const auto hi_it = std::lower_bound(fr.begin(), fr.end(), f);
    const size_t hi = std::min<size_t>(std::max<std::ptrdiff_t>(hi_it - fr.begin(), 1), fr.size() - 1);
    const size_t lo = hi - 1;
    const double w = std::clamp((f - fr[lo]) / (fr[hi] - fr[lo]), 0.0, 1.0);
    *m_fl = (1.0 - w) * model.added_mass[lo] + w * model.added_mass[hi];
    *c_fl = (1.0 - w) * model.added_damping[lo] + w * model.added_damping[hi];
}

Matrix6cd plant_frf(const HydroModel& model, double omega) {
    if (!(omega > 0.0)) throw Error("plant_frf: omega must be positive");
    Matrix6d m_fl, c_fl;
    added_terms_at(model, omega, &m_fl, &c_fl);
    const std::complex<double> i_unit(0.0, 1.0);
    Matrix6cd out = (model.solid_mass + m_fl).cast<std::complex<double>>();
    out -= (i_unit / omega) * c_fl.cast<std::complex<double>>();
    out -= (1.0 / (omega * omega)) * model.stiffness.cast<std::complex<double>>();
    return out;
}

Eigen::MatrixXd apply_load_cell(const Eigen::MatrixXd& ideal, const LoadCellModel& cell, double fs,
                                int steady_begin, int steady_samples, std::uint64_t noise_seed) {
    Eigen::MatrixXd out = ideal;

    if (cell.fault_gain != 1.0 || cell.fault_gain_per_newton != 0.0) {
        for (int n = 0; n < out.cols(); ++n) {
            const double gain = cell.fault_gain + cell.fault_gain_per_newton * ideal(2, n);
            out(0, n) *= gain;
            out(1, n) *= gain;
        }
    }

    if (cell.trigger_delay_s != 0.0 && steady_samples > 0) {
        // Exact fractional circular shift of the periodic steady block; the
        // ramp windows stay as synthesized (they are flagged transient).
        const double delay_samples = cell.trigger_delay_s * fs;
        for (int ch = 0; ch < 6; ++ch) {
            const Eigen::ArrayXd block = out.row(ch).segment(steady_begin, steady_samples).array();
            out.row(ch).segment(steady_begin, steady_samples) =
                signal::circular_delay(block, delay_samples).matrix().transpose();
        }
    }

    if (!cell.noise_std.isZero()) {
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int ch = 0; ch < 6; ++ch) {
            if (cell.noise_std[ch] <= 0.0) continue;
            for (int n = 0; n < out.cols(); ++n) out(ch, n) += cell.noise_std[ch] * gauss(rng);
        }
    }
    return out;
}

MeasurementRecord simulate_experiment(const excitation::MultisineDesign& design, int experiment,
                                      int realization, const HydroModel& model,
                                      const LoadCellModel& cell, std::uint64_t seed) {
    design.validate();
    model.validate();

    const auto traj = excitation::build_trajectory(design, experiment, realization);
    const int n_total = traj.samples();
    const int n_ramp = traj.ramp_samples;
    const int n0 = traj.period_samples;

    // Per-line complex acceleration vectors and their force responses.
    const int n_lines = design.n_harmonics();
    std::vector<Vector6cd> force_lines(n_lines, Vector6cd::Zero());
    for (int h = 0; h < n_lines; ++h) {
        const double w = design.omega(h);
        Vector6cd accel_line = Vector6cd::Zero();
        for (int j = 0; j < design.n_inputs(); ++j) {
            const double a = design.amplitudes(j, h);
            const double ph = design.phases[realization][experiment](j, h);
            accel_line[design.dofs[j]] = -w * w * std::polar(a, ph);
        }
        force_lines[h] = plant_frf(model, w) * accel_line;
    }

    // Time series over the whole record; t is measured from the steady-block
    // start so ramps carry the periodic extension of the steady response.
    Eigen::MatrixXd wrench = Eigen::MatrixXd::Zero(6, n_total);
    {
        Eigen::ArrayXd t(n_total);
        for (int n = 0; n < n_total; ++n) t[n] = (n - n_ramp) / design.fs;
        for (int h = 0; h < n_lines; ++h) {
            const double w = design.omega(h);
            const Eigen::ArrayXd c = (w * t).cos();
            const Eigen::ArrayXd s = (w * t).sin();
            for (int ch = 0; ch < 6; ++ch) {
                const std::complex<double> f = force_lines[h][ch];
                wrench.row(ch).array() += f.real() * c.transpose() - f.imag() * s.transpose();
            }
        }
    }

    // Residual hook: quadratic drag from the commanded datum velocities.
    if (!model.quad_drag.isZero()) {
        Eigen::MatrixXd vel = Eigen::MatrixXd::Zero(6, n_total);
        for (int j = 0; j < design.n_inputs(); ++j) {
            const int dof = design.dofs[j];
            Eigen::ArrayXd t(n_total);
            for (int n = 0; n < n_total; ++n) t[n] = (n - n_ramp) / design.fs;
            vel.row(dof) = excitation::multisine_series(
                               design.harmonics, design.t0, design.amplitudes.row(j),
                               design.phases[realization][experiment].row(j), t, 1)
                               .matrix()
                               .transpose();
        }
        for (int ch = 0; ch < 6; ++ch) {
            if (model.quad_drag[ch] == 0.0) continue;
            wrench.row(ch).array() -=
                model.quad_drag[ch] * vel.row(ch).array().abs() * vel.row(ch).array();
        }
    }

    // Translate the wrench from the motion datum to the load-cell datum:
    // M_cell = M_datum + (R(t) * (datum - cell)) x F.
    if (!cell.datum_offset.isZero()) {
        for (int n = 0; n < n_total; ++n) {
            const Pose pose = Pose::from_vector(traj.pose_dofs.col(n));
            const Eigen::Vector3d arm = kinematics::rotation_matrix(pose) * (-cell.datum_offset);
            const Eigen::Vector3d f = wrench.block<3, 1>(0, n);
            wrench.block<3, 1>(3, n) += arm.cross(f);
        }
    }

    MeasurementRecord rec;
    rec.fs = design.fs;
    rec.accel_cmd = traj.accel;
    rec.wrench_meas = apply_load_cell(wrench, cell, design.fs, n_ramp, traj.periods * n0,
                                      seed ^ 0xd1b54a32d192ed03ull);
    rec.ramp_samples = n_ramp;
    rec.period_samples = n0;
    rec.periods = traj.periods;
    rec.design_id = design.id;
    rec.experiment = experiment;
    rec.realization = realization;
    rec.seed = seed;
    rec.cell_datum_offset = cell.datum_offset;
    return rec;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json matrix_json(const Matrix6d& m) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < 6; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < 6; ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Matrix6d matrix_from_json(const ordered_json& j) {
    Matrix6d m;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

}  // namespace

HydroModel load_hydro_model(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw FileFormatError("cannot open hydro model: " + file.string());
    ordered_json j = ordered_json::parse(in);

    HydroModel model;
    model.name = j.value("name", file.stem().string());
    model.solid_mass = matrix_from_json(j.at("solid_mass"));
    if (j.contains("table_freqs_hz")) {
        model.table_freqs_hz = j["table_freqs_hz"].get<std::vector<double>>();
        for (const auto& m : j.at("added_mass")) model.added_mass.push_back(matrix_from_json(m));
        for (const auto& c : j.at("added_damping")) model.added_damping.push_back(matrix_from_json(c));
    }
    if (j.contains("stiffness")) model.stiffness = matrix_from_json(j["stiffness"]);
    if (j.contains("quad_drag"))
        for (int i = 0; i < 6; ++i) model.quad_drag[i] = j["quad_drag"].at(i).get<double>();
    model.validate();
    return model;
}

void save_hydro_model(const HydroModel& model, const std::filesystem::path& file) {
    ordered_json j;
    j["schema"] = "hexsid-hydro-v1";
    j["name"] = model.name;
    j["solid_mass"] = matrix_json(model.solid_mass);
    if (model.has_tables()) {
        j["table_freqs_hz"] = model.table_freqs_hz;
        ordered_json am = ordered_json::array(), ad = ordered_json::array();
        for (const auto& m : model.added_mass) am.push_back(matrix_json(m));
        for (const auto& c : model.added_damping) ad.push_back(matrix_json(c));
        j["added_mass"] = am;
        j["added_damping"] = ad;
    }
    if (!model.stiffness.isZero()) j["stiffness"] = matrix_json(model.stiffness);
    if (!model.quad_drag.isZero())
        j["quad_drag"] = {model.quad_drag[0], model.quad_drag[1], model.quad_drag[2],
                          model.quad_drag[3], model.quad_drag[4], model.quad_drag[5]};
    std::ofstream out(file);
    if (!out) throw FileFormatError("cannot write hydro model: " + file.string());
    out << j.dump(2) << "\n";
}

HydroModel dry_cylinder_model(double mass_kg) {
    // Uniform cylinder, 21.59 cm diameter x 60.96 cm length, inertia about
    // its own centre.
    const double radius = 0.2159 / 2.0;
    const double length = 0.6096;
    const double i_transverse = mass_kg * (3.0 * radius * radius + length * length) / 12.0;
    const double i_axial = mass_kg * radius * radius / 2.0;

    HydroModel model;
    model.name = "dry_cylinder";
    Vector6d diag;
    diag << mass_kg, mass_kg, mass_kg, i_transverse, i_transverse, i_axial;
    model.solid_mass = diag.asDiagonal();
    return model;
}

namespace {

std::vector<double> frequency_grid(double f_lo, double f_hi, double df) {
    std::vector<double> freqs;
    for (int k = static_cast<int>(std::lround(f_lo / df)); k <= std::lround(f_hi / df); ++k)
        freqs.push_back(k * df);
    return freqs;
}

}  // namespace

HydroModel wet_cylinder_model(double f_lo_hz, double f_hi_hz, double resolution_hz) {
    HydroModel model = dry_cylinder_model();
    model.name = "wet_cylinder";
    model.table_freqs_hz = frequency_grid(f_lo_hz, f_hi_hz, resolution_hz);

    // Smooth invented curves standing in for panel-code output: translational
    // added mass decaying with frequency, damping humps from wave radiation.
    for (double f : model.table_freqs_hz) {
        Vector6d am, ad;
        const double g1 = std::exp(-0.5 * std::pow((f - 0.8) / 0.9, 2));
        am << 6.5 + 2.0 * g1, 6.5 + 2.0 * g1, 9.0 + 3.0 * std::exp(-0.8 * f), 0.45 + 0.12 * g1,
            0.45 + 0.12 * g1, 0.08 + 0.02 * g1;
        const double hump = std::exp(-0.5 * std::pow((f - 1.1) / 0.6, 2));
        ad << 14.0 * hump + 2.0, 14.0 * hump + 2.0, 18.0 * hump + 3.0, 0.9 * hump + 0.2,
            0.9 * hump + 0.2, 0.15 * hump + 0.05;
        model.added_mass.push_back(am.asDiagonal());
        model.added_damping.push_back(ad.asDiagonal());
    }
    return model;
}

HydroModel coupled_model(double f_lo_hz, double f_hi_hz, double resolution_hz) {
    HydroModel model = dry_cylinder_model();
    model.name = "coupled_body";
    // Lift the rotational solid inertias so that every channel carries the
    // same order of magnitude; keeps the 6x6 inversions well conditioned.
    Vector6d diag;
    diag << 16.67, 16.67, 16.67, 8.0, 8.0, 6.0;
    model.solid_mass = diag.asDiagonal();
    model.table_freqs_hz = frequency_grid(f_lo_hz, f_hi_hz, resolution_hz);

    for (double f : model.table_freqs_hz) {
        Matrix6d am, ad;
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) {
                const double sym = 0.6 + 0.08 * (r + c);
                am(r, c) = sym * (1.0 + 0.25 * std::sin(0.9 * f + 0.3 * (r + c)));
                ad(r, c) = 0.8 * sym * (1.0 + 0.25 * std::cos(0.7 * f + 0.4 * (r + c)));
            }
        }
        // Symmetrize and make diagonally dominant so the truth stays physical.
        am = (0.5 * (am + am.transpose())).eval();
        ad = (0.5 * (ad + ad.transpose())).eval();
        am.diagonal().array() += 6.0;
        ad.diagonal().array() += 5.0;
        model.added_mass.push_back(am);
        model.added_damping.push_back(ad);
    }
    return model;
}

}  // namespace hexsid::plant
