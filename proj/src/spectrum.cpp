#include "stirap/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "stirap/csv.hpp"
#include "stirap/rng.hpp"

namespace stirap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_tone_ordering(const std::vector<PhaseTone>& tones) {
    double prev = 0.0;
    for (const auto& tone : tones) {
        if (!(tone.freq_hz > prev)) {
            throw std::invalid_argument("tone frequencies must be positive and strictly increasing");
        }
        if (!(tone.amplitude_rad >= 0.0) || !std::isfinite(tone.amplitude_rad)) {
            throw std::invalid_argument("tone amplitudes must be finite and >= 0");
        }
        prev = tone.freq_hz;
    }
}

/// Complex residual of subtracting a delayed, scaled copy of a sinusoid.
std::complex<double> feedforward_residual(double gain, double delay_s, double freq_hz) {
    const double phase = kTwoPi * freq_hz * delay_s;
    return 1.0 - gain * std::exp(std::complex<double>(0.0, -phase));
}

double interpolate_gain_table(const std::vector<std::pair<double, double>>& table,
                              double freq_hz) {
    if (table.empty()) return 1.0;
    if (freq_hz <= table.front().first) return table.front().second;
    if (freq_hz >= table.back().first) return table.back().second;
    auto hi = std::upper_bound(table.begin(), table.end(), freq_hz,
                               [](double f, const auto& p) { return f < p.first; });
    auto lo = hi - 1;
    const double w = (freq_hz - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

// Streams sum_i a_i sin(w_i t + psi_i) and optionally its analytic derivative
// sum_i a_i w_i cos(w_i t + psi_i) onto a uniform grid. Each tone advances by
// a fixed complex rotation per sample; oscillators are re-seeded from
// sin/cos every kResyncInterval samples so rounding drift stays at the
// 1e-13 level even on long grids.
constexpr std::size_t kResyncInterval = 256;

void accumulate_tones(const std::vector<PhaseTone>& tones, double t0, double dt,
                      std::size_t n, double* value_out, double* deriv_out) {
    const std::size_t n_tones = tones.size();
    if (n_tones == 0 || n == 0) return;

    std::vector<double> zr(n_tones), zi(n_tones), rot_r(n_tones), rot_i(n_tones);
    std::vector<double> amp(n_tones), amp_w(n_tones), omega(n_tones), psi(n_tones);
    for (std::size_t i = 0; i < n_tones; ++i) {
        omega[i] = kTwoPi * tones[i].freq_hz;
        psi[i] = tones[i].phase_rad;
        amp[i] = tones[i].amplitude_rad;
        amp_w[i] = tones[i].amplitude_rad * omega[i];
        rot_r[i] = std::cos(omega[i] * dt);
        rot_i[i] = std::sin(omega[i] * dt);
    }

    auto resync = [&](std::size_t k) {
        const double t = t0 + dt * static_cast<double>(k);
        for (std::size_t i = 0; i < n_tones; ++i) {
            const double arg = omega[i] * t + psi[i];
            zr[i] = std::cos(arg);
            zi[i] = std::sin(arg);
        }
    };

    for (std::size_t k = 0; k < n; ++k) {
        if (k % kResyncInterval == 0) {
            resync(k);
        } else {
            for (std::size_t i = 0; i < n_tones; ++i) {
                const double re = zr[i] * rot_r[i] - zi[i] * rot_i[i];
                const double im = zr[i] * rot_i[i] + zi[i] * rot_r[i];
                zr[i] = re;
                zi[i] = im;
            }
        }
        double value = 0.0;
        double deriv = 0.0;
        for (std::size_t i = 0; i < n_tones; ++i) {
            value += amp[i] * zi[i];
            deriv += amp_w[i] * zr[i];
        }
        value_out[k] += value;
        if (deriv_out) deriv_out[k] += deriv;
    }
}

}  // namespace

BeatNoteSpectrum::BeatNoteSpectrum(std::vector<SpectrumBin> bins,
                                   double resolution_bandwidth_hz,
                                   double carrier_frequency_hz)
    : bins_(std::move(bins)),
      resolution_bandwidth_hz_(resolution_bandwidth_hz),
      carrier_frequency_hz_(carrier_frequency_hz) {
    if (bins_.size() < 2) throw std::invalid_argument("spectrum needs at least 2 bins");
    double prev = 0.0;
    for (const auto& bin : bins_) {
        if (!(bin.freq_hz > prev)) {
            throw std::invalid_argument("spectrum frequencies must be positive and strictly increasing");
        }
        if (!(bin.power_dbc <= 0.0)) {
            throw std::invalid_argument("spectrum power must be <= 0 dBc (noise below carrier)");
        }
        prev = bin.freq_hz;
    }
}

BeatNoteSpectrum BeatNoteSpectrum::from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int freq_col = table.column("freq_hz");
    const int power_col = table.column("power_dbc");
    if (freq_col < 0 || power_col < 0) {
        throw std::runtime_error(path + ": expected header 'freq_hz,power_dbc'");
    }
    std::vector<SpectrumBin> bins;
    bins.reserve(table.rows.size());
    double min_spacing = 0.0;
    for (const auto& row : table.rows) {
        bins.push_back({row[static_cast<std::size_t>(freq_col)],
                        row[static_cast<std::size_t>(power_col)]});
        if (bins.size() >= 2) {
            const double spacing = bins[bins.size() - 1].freq_hz - bins[bins.size() - 2].freq_hz;
            min_spacing = (min_spacing == 0.0) ? spacing : std::min(min_spacing, spacing);
        }
    }
    return BeatNoteSpectrum(std::move(bins), min_spacing, 0.0);
}

PhaseToneSet::PhaseToneSet(std::vector<PhaseTone> tones) : tones_(std::move(tones)) {
    check_tone_ordering(tones_);
}

double PhaseToneSet::rms_phase_rad() const {
    double sum = 0.0;
    for (const auto& tone : tones_) sum += tone.amplitude_rad * tone.amplitude_rad;
    return std::sqrt(0.5 * sum);
}

double PhaseToneSet::max_frequency_hz() const {
    return tones_.empty() ? 0.0 : tones_.back().freq_hz;
}

PhaseToneSet tones_from_spectrum(const BeatNoteSpectrum& spectrum,
                                 double f_cutoff_low_hz, std::uint64_t seed) {
    if (!(f_cutoff_low_hz > 0.0)) throw std::invalid_argument("f_cutoff_low must be > 0");
    Rng rng(seed);
    std::vector<PhaseTone> tones;
    for (const auto& bin : spectrum.bins()) {
        if (bin.freq_hz < f_cutoff_low_hz) continue;
        PhaseTone tone;
        tone.freq_hz = bin.freq_hz;
        // Narrowband PM: a sideband at L dBc corresponds to amplitude
        // beta = 2 * 10^(L/20) (single-sideband-to-carrier ratio beta/2).
        tone.amplitude_rad = 2.0 * std::pow(10.0, bin.power_dbc / 20.0);
        tone.phase_rad = rng.uniform(0.0, kTwoPi);
        tones.push_back(tone);
    }
    if (tones.empty()) throw std::runtime_error("no tones above cutoff");
    return PhaseToneSet(std::move(tones));
}

PhaseToneSet apply_feedforward(const PhaseToneSet& tones, const FeedforwardSettings& ff) {
    if (!(ff.gain >= 0.0)) throw std::invalid_argument("feedforward gain must be >= 0");
    if (!ff.enabled) return tones;

    std::vector<PhaseTone> out;
    out.reserve(tones.size());
    for (const auto& tone : tones.tones()) {
        const double g = ff.gain * interpolate_gain_table(ff.gain_vs_frequency, tone.freq_hz);
        const std::complex<double> residual =
            feedforward_residual(g, ff.delay_mismatch_s, tone.freq_hz);
        PhaseTone corrected = tone;
        corrected.amplitude_rad = tone.amplitude_rad * std::abs(residual);
        corrected.phase_rad = tone.phase_rad + std::arg(residual);
        out.push_back(corrected);
    }
    return PhaseToneSet(std::move(out));
}

double suppression_db(double gain, double delay_mismatch_s, double freq_hz,
                      double ceiling_db) {
    if (!(freq_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
    if (!(gain >= 0.0)) throw std::invalid_argument("gain must be >= 0");
    const double residual = std::abs(feedforward_residual(gain, delay_mismatch_s, freq_hz));
    if (residual <= 0.0) return ceiling_db;
    return std::min(-20.0 * std::log10(residual), ceiling_db);
}

PhaseTrajectory synthesize_phase(const PhaseToneSet& tones, double t0_s, double dt_s,
                                 std::size_t n_samples) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    const double f_max = tones.max_frequency_hz();
    if (f_max > 0.0 && 1.0 / dt_s < 10.0 * f_max) {
        throw std::invalid_argument("sample rate below 10x max tone frequency");
    }
    PhaseTrajectory trajectory;
    trajectory.t0_s = t0_s;
    trajectory.dt_s = dt_s;
    trajectory.phi_rad.assign(n_samples, 0.0);
    trajectory.phi_dot_rad_per_s.assign(n_samples, 0.0);
    accumulate_tones(tones.tones(), t0_s, dt_s, n_samples, trajectory.phi_rad.data(),
                     trajectory.phi_dot_rad_per_s.data());
    return trajectory;
}

std::vector<double> sample_detuning(const DetuningNoiseModel& model, double t0_s,
                                    double dt_s, std::size_t n_samples,
                                    std::uint64_t seed) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    std::vector<double> series(n_samples, 0.0);

    switch (model.kind) {
        case DetuningNoiseKind::shot_to_shot_gaussian: {
            if (!(model.sigma_hz >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
            if (model.sigma_hz == 0.0) return series;
            const double offset = Rng(seed).gaussian(model.sigma_hz);
            std::fill(series.begin(), series.end(), offset);
            return series;
        }
        case DetuningNoiseKind::one_over_f: {
            if (!(model.rms_hz >= 0.0)) throw std::invalid_argument("rms must be >= 0");
            if (!(model.f_min_hz < model.f_max_hz)) {
                throw std::invalid_argument("one_over_f requires f_min < f_max");
            }
            if (model.n_tones < 2) throw std::invalid_argument("one_over_f needs >= 2 tones");
            if (model.rms_hz == 0.0) return series;

            // Log-spaced comb with 1/f amplitudes, normalized so
            // sqrt(sum a_i^2 / 2) equals the requested RMS.
            const int n_tones = model.n_tones;
            std::vector<PhaseTone> tones(static_cast<std::size_t>(n_tones));
            const double log_ratio = std::log(model.f_max_hz / model.f_min_hz);
            double power = 0.0;
            for (int i = 0; i < n_tones; ++i) {
                const double frac = static_cast<double>(i) / (n_tones - 1);
                const double f = model.f_min_hz * std::exp(log_ratio * frac);
                tones[static_cast<std::size_t>(i)].freq_hz = f;
                tones[static_cast<std::size_t>(i)].amplitude_rad = 1.0 / f;
                power += 0.5 / (f * f);
            }
            const double scale = model.rms_hz / std::sqrt(power);
            Rng rng(seed);
            for (auto& tone : tones) {
                tone.amplitude_rad *= scale;
                tone.phase_rad = rng.uniform(0.0, kTwoPi);
            }
            accumulate_tones(tones, t0_s, dt_s, n_samples, series.data(), nullptr);
            return series;
        }
    }
    throw std::logic_error("unknown detuning noise kind");
}

}  // namespace stirap
