#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stirap/dynamics.hpp"
#include "stirap/experiments.hpp"

namespace stirap {

enum class ExperimentKind {
    duration_sweep,
    npass_series,
    rabi_landscape,
    suppression_curve,
    fit_only,
};

std::string to_string(ExperimentKind kind);

/// Fully resolved run configuration. Config files use experimentalist units
/// (Hz/kHz for frequencies, us/ns for times); everything here is already
/// converted to internal angular/SI units except where the field name says
/// otherwise. See README for the config grammar and the key list.
struct RunConfig {
    ExperimentKind experiment = ExperimentKind::duration_sweep;
    std::string output_dir = "out";

    // physics (internal units)
    double omega_p_max_rad_s = 0.0;
    double omega_s_max_rad_s = 0.0;
    double delta_one_photon_rad_s = 0.0;
    double delta_two_photon_rad_s = 0.0;
    double gamma_rad_s = 0.0;
    double pulse_duration_s = 0.0;
    int n_passes = 1;

    // noise sources
    std::string pump_spectrum_path;    // empty = no laser phase noise
    std::string stokes_spectrum_path;
    double tone_cutoff_hz = kCavityLinewidthHz;
    bool ff_enabled = false;
    double ff_gain = 1.0;
    double ff_delay_s = 0.0;
    std::string ff_gain_table_path;    // optional freq_hz,gain CSV
    double magnetic_rms_hz = 30e3;
    double magnetic_f_min_hz = 10.0;
    double magnetic_f_max_hz = kCavityLinewidthHz;
    int magnetic_n_tones = 32;
    double linewidth_sigma_hz = 346.0;

    // ensemble
    int n_realizations = 200;
    std::uint64_t master_seed = 1;

    // sweep axes
    std::vector<double> t_values_s;
    std::vector<int> npass_values;
    std::vector<double> omega_bar_values_rad_s;
    TSearchSpec t_search;

    // suppression_curve
    double gain_min = 0.5;
    double gain_max = 1.5;
    int gain_points = 101;
    double suppression_delay_s = 0.0;
    double suppression_freq_hz = 1e6;

    // fit_only
    std::string fit_kind;  // eta | loglinear | rabi
    std::string fit_data_path;
    int fit_n_passes = 10;

    StirapParams make_params() const;
    EnsembleSpec make_ensemble() const;  // loads the spectrum files
};

/// Parses and fully validates a config file; throws std::runtime_error with
/// the offending line/field named.
RunConfig load_config(const std::string& path);

/// Writes the fully resolved key set in config grammar; the output is itself
/// a loadable config that reproduces the run together with the seed it
/// contains.
void write_resolved_config(const RunConfig& config, const std::string& path);

/// Executes the configured experiment; writes results.csv, resolved_config.txt
/// and metadata.json into output_dir. Returns a process exit code.
int run_experiment(const RunConfig& config);

}  // namespace stirap
