#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stirap/dynamics.hpp"
#include "stirap/spectrum.hpp"

namespace stirap {

/// Noise configuration shared by every realization of an ensemble.
/// Realization k of pass p draws its tone phases and detuning offsets from
/// sub-seeds derived as splitmix64-chain(master_seed, realization, pass,
/// source id), so runs are reproducible and passes are independent.
struct EnsembleSpec {
    int n_realizations = 200;
    std::uint64_t master_seed = 1;

    std::optional<BeatNoteSpectrum> pump_spectrum;
    std::optional<BeatNoteSpectrum> stokes_spectrum;
    double tone_cutoff_hz = kCavityLinewidthHz;
    FeedforwardSettings pump_ff;
    FeedforwardSettings stokes_ff;
    std::vector<DetuningNoiseModel> detuning_models;
};

struct EnsembleStats {
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(n)
};

struct SweepPoint {
    double axis = 0.0;              // T (s), N, or omega_bar (rad/s)
    double mean = 0.0;              // recovery, or error rate for the landscape
    double std_error = 0.0;
    double pulse_duration_s = 0.0;  // T used at this point
    std::uint64_t seed = 0;
    int n_realizations = 0;
    bool boundary_warning = false;  // optimum pinned at the T-search boundary
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

/// Noise for one (realization, pass) on the propagation half-step grid.
PassNoise make_pass_noise(const EnsembleSpec& ensemble, std::uint64_t master_seed,
                          std::uint64_t realization, int pass_index, double step_s,
                          std::size_t n_samples);

/// Highest tone frequency of the configured spectra (0 if none); feeds the
/// integration-step rule.
double spectra_max_frequency_hz(const EnsembleSpec& ensemble);

/// Mean multi-pass recovery over the ensemble (n_realizations = 0 uses the
/// full ensemble). Deterministic for a given spec regardless of worker count.
EnsembleStats ensemble_recovery(const StirapParams& params, const EnsembleSpec& ensemble,
                                int n_realizations = 0);

/// Recovery vs pulse duration (fig. 3a style); feeds fit_eta_curve.
SweepResult run_duration_sweep(const std::vector<double>& t_values_s,
                               StirapParams params, const EnsembleSpec& ensemble);

/// Recovery vs number of one-way passes (fig. 3b style); N must be even
/// (odd N leaves the molecule in the ground state, not detectable).
/// Feeds fit_loglinear.
SweepResult run_npass_series(const std::vector<int>& n_values, StirapParams params,
                             const EnsembleSpec& ensemble);

/// Pulse-duration optimization window for the error-rate landscape.
struct TSearchSpec {
    double t_min_s = 1e-6;
    double t_max_s = 1e-3;
    int points_per_decade = 25;
    double refine_rel_tol = 0.005;  // golden-section width / T
    /// Reduced ensemble used during the grid and golden-section stages;
    /// the winning T is re-evaluated with the full ensemble. 0 = full.
    int search_realizations = 64;
};

/// Minimal error rate 1 - eta vs average peak Rabi frequency
/// omega_bar = (omega_p + omega_s)/2, holding the pump/Stokes ratio of the
/// template. The pulse duration is optimized per point (log grid + golden
/// section); rows where the optimum sits at the window edge carry a warning.
SweepResult run_rabi_landscape(const std::vector<double>& omega_bar_values_rad_s,
                               StirapParams params_template, const EnsembleSpec& ensemble,
                               const TSearchSpec& search);

}  // namespace stirap
