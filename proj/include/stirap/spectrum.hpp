#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stirap {

/// Cavity linewidth; phase noise above this frequency belongs to the laser
/// path and is the default low cutoff when turning spectra into tones.
inline constexpr double kCavityLinewidthHz = 25e3;

struct SpectrumBin {
    double freq_hz = 0.0;
    double power_dbc = 0.0;
};

/// Beat-note noise spectrum: noise power per bin relative to the carrier.
/// Bins must have strictly increasing positive frequencies and power <= 0 dBc.
class BeatNoteSpectrum {
public:
    BeatNoteSpectrum(std::vector<SpectrumBin> bins,
                     double resolution_bandwidth_hz = 0.0,
                     double carrier_frequency_hz = 0.0);

    /// Loads `freq_hz,power_dbc` CSV (one bin per row, '.' decimals).
    static BeatNoteSpectrum from_csv(const std::string& path);

    const std::vector<SpectrumBin>& bins() const { return bins_; }
    double resolution_bandwidth_hz() const { return resolution_bandwidth_hz_; }
    double carrier_frequency_hz() const { return carrier_frequency_hz_; }

private:
    std::vector<SpectrumBin> bins_;
    double resolution_bandwidth_hz_ = 0.0;  // metadata only
    double carrier_frequency_hz_ = 0.0;     // metadata only
};

struct PhaseTone {
    double freq_hz = 0.0;
    double amplitude_rad = 0.0;
    double phase_rad = 0.0;
};

/// Sum-of-sinusoids phase noise model: phi(t) = sum_i a_i sin(2 pi f_i t + psi_i).
class PhaseToneSet {
public:
    PhaseToneSet() = default;
    explicit PhaseToneSet(std::vector<PhaseTone> tones);

    const std::vector<PhaseTone>& tones() const { return tones_; }
    bool empty() const { return tones_.empty(); }
    std::size_t size() const { return tones_.size(); }

    /// sqrt(sum a_i^2 / 2): total RMS phase of the model.
    double rms_phase_rad() const;
    double max_frequency_hz() const;  // 0 for an empty set

private:
    std::vector<PhaseTone> tones_;
};

/// Sampled phase noise realization on a uniform grid. phi_dot holds the
/// analytic derivative of the tone sum, not a finite difference.
struct PhaseTrajectory {
    double t0_s = 0.0;
    double dt_s = 0.0;
    std::vector<double> phi_rad;
    std::vector<double> phi_dot_rad_per_s;

    std::size_t size() const { return phi_rad.size(); }
    double time_at(std::size_t k) const { return t0_s + dt_s * static_cast<double>(k); }
};

enum class DetuningNoiseKind { one_over_f, shot_to_shot_gaussian };

/// Low-frequency detuning noise entering below the laser-tone cutoff:
/// magnetic-field noise as a 1/f tone comb, laser linewidth as a shot-to-shot
/// Gaussian offset.
struct DetuningNoiseModel {
    DetuningNoiseKind kind = DetuningNoiseKind::one_over_f;
    double rms_hz = 0.0;     // one_over_f: total RMS of the comb
    double f_min_hz = 10.0;  // one_over_f band
    double f_max_hz = kCavityLinewidthHz;
    int n_tones = 32;        // one_over_f: log-spaced tone count
    double sigma_hz = 0.0;   // shot_to_shot_gaussian
};

/// Feedforward cancellation model. The corrected tone keeps a residual
/// complex factor 1 - g(f) exp(-i 2 pi f tau) where tau is the delay
/// mismatch between light and correction signal.
struct FeedforwardSettings {
    bool enabled = false;
    double gain = 1.0;
    double delay_mismatch_s = 0.0;
    /// Optional (freq_hz, relative gain) table, linearly interpolated and
    /// clamped at the ends; scales `gain`.
    std::vector<std::pair<double, double>> gain_vs_frequency;
};

/// One tone per spectrum bin at or above the cutoff, converted with the
/// narrowband phase-modulation identity a = 2 * 10^(dBc/20). Tone phases are
/// drawn uniformly in [0, 2 pi) from `seed`.
PhaseToneSet tones_from_spectrum(const BeatNoteSpectrum& spectrum,
                                 double f_cutoff_low_hz, std::uint64_t seed);

PhaseToneSet apply_feedforward(const PhaseToneSet& tones, const FeedforwardSettings& ff);

/// -20 log10 |1 - g exp(-i 2 pi f tau)|, clamped to ceiling_db.
double suppression_db(double gain, double delay_mismatch_s, double freq_hz,
                      double ceiling_db = 120.0);

/// Evaluates the tone sum and its analytic derivative on a uniform grid.
/// Requires sample rate 1/dt >= 10x the highest tone frequency.
PhaseTrajectory synthesize_phase(const PhaseToneSet& tones, double t0_s, double dt_s,
                                 std::size_t n_samples);

/// Detuning noise contribution in Hz on the given grid.
std::vector<double> sample_detuning(const DetuningNoiseModel& model, double t0_s,
                                    double dt_s, std::size_t n_samples,
                                    std::uint64_t seed);

}  // namespace stirap
