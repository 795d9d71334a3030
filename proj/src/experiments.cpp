#include "stirap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stirap/parallel.hpp"
#include "stirap/rng.hpp"

namespace stirap {

namespace {

// Source ids in the sub-seed path (recorded scheme: splitmix64-chain of
// master, realization, pass, source).
constexpr std::uint64_t kStokesTonesStream = 1;
constexpr std::uint64_t kPumpTonesStream = 2;
constexpr std::uint64_t kDetuningStreamBase = 100;

// Kahan-compensated serial reduction keeps ensemble statistics independent
// of how realizations were scheduled across workers.
double compensated_sum(const std::vector<double>& values) {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

EnsembleStats stats_from_slots(const std::vector<double>& values) {
    EnsembleStats stats;
    const auto n = static_cast<double>(values.size());
    stats.mean = compensated_sum(values) / n;
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - stats.mean;
            sq[i] = d * d;
        }
        const double variance = compensated_sum(sq) / (n - 1.0);
        stats.std_error = std::sqrt(variance / n);
    }
    return stats;
}

struct GoldenResult {
    double t_best = 0.0;
    double value_best = 0.0;
};

// Golden-section maximization in log T on [lo, hi].
GoldenResult golden_section_max(const std::function<double(double)>& objective,
                                double t_lo, double t_hi, double rel_tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::log(t_lo);
    double b = std::log(t_hi);
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = objective(std::exp(x1));
    double f2 = objective(std::exp(x2));
    while ((b - a) > rel_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective(std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective(std::exp(x1));
        }
    }
    GoldenResult result;
    if (f1 >= f2) {
        result.t_best = std::exp(x1);
        result.value_best = f1;
    } else {
        result.t_best = std::exp(x2);
        result.value_best = f2;
    }
    return result;
}

}  // namespace

PassNoise make_pass_noise(const EnsembleSpec& ensemble, std::uint64_t master_seed,
                          std::uint64_t realization, int pass_index, double step_s,
                          std::size_t n_samples) {
    PassNoise noise;
    const double dt = 0.5 * step_s;
    const auto pass = static_cast<std::uint64_t>(pass_index);

    if (ensemble.stokes_spectrum) {
        const auto seed = derive_seed(master_seed, {realization, pass, kStokesTonesStream});
        const PhaseToneSet tones = apply_feedforward(
            tones_from_spectrum(*ensemble.stokes_spectrum, ensemble.tone_cutoff_hz, seed),
            ensemble.stokes_ff);
        noise.stokes_phase = synthesize_phase(tones, 0.0, dt, n_samples);
    }
    if (ensemble.pump_spectrum) {
        const auto seed = derive_seed(master_seed, {realization, pass, kPumpTonesStream});
        const PhaseToneSet tones = apply_feedforward(
            tones_from_spectrum(*ensemble.pump_spectrum, ensemble.tone_cutoff_hz, seed),
            ensemble.pump_ff);
        noise.pump_phase = synthesize_phase(tones, 0.0, dt, n_samples);
    }
    if (!ensemble.detuning_models.empty()) {
        noise.detuning_hz.assign(n_samples, 0.0);
        for (std::size_t i = 0; i < ensemble.detuning_models.size(); ++i) {
            const auto seed =
                derive_seed(master_seed, {realization, pass, kDetuningStreamBase + i});
            const std::vector<double> series =
                sample_detuning(ensemble.detuning_models[i], 0.0, dt, n_samples, seed);
            for (std::size_t k = 0; k < n_samples; ++k) noise.detuning_hz[k] += series[k];
        }
    }
    return noise;
}

double spectra_max_frequency_hz(const EnsembleSpec& ensemble) {
    double f_max = 0.0;
    if (ensemble.pump_spectrum) {
        f_max = std::max(f_max, ensemble.pump_spectrum->bins().back().freq_hz);
    }
    if (ensemble.stokes_spectrum) {
        f_max = std::max(f_max, ensemble.stokes_spectrum->bins().back().freq_hz);
    }
    return f_max;
}

EnsembleStats ensemble_recovery(const StirapParams& params, const EnsembleSpec& ensemble,
                                int n_realizations) {
    params.validate();
    if (ensemble.n_realizations < 1) {
        throw std::invalid_argument("ensemble needs n_realizations >= 1");
    }
    int n = n_realizations > 0 ? n_realizations : ensemble.n_realizations;
    n = std::min(n, ensemble.n_realizations);

    const double step = default_step_s(params, spectra_max_frequency_hz(ensemble));
    std::vector<double> recovery(static_cast<std::size_t>(n), 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
        auto factory = [&, k](std::uint64_t seed, int pass, double step_s,
                              std::size_t n_samples) {
            return make_pass_noise(ensemble, seed, static_cast<std::uint64_t>(k), pass,
                                   step_s, n_samples);
        };
        recovery[k] = multi_pass(params, factory, ensemble.master_seed, step).recovery;
    });
    return stats_from_slots(recovery);
}

SweepResult run_duration_sweep(const std::vector<double>& t_values_s,
                               StirapParams params, const EnsembleSpec& ensemble) {
    if (t_values_s.empty()) throw std::invalid_argument("duration sweep needs T values");
    double prev = 0.0;
    for (double t : t_values_s) {
        if (!(t > prev)) {
            throw std::invalid_argument("T values must be positive and increasing");
        }
        prev = t;
    }

    SweepResult result;
    result.points.reserve(t_values_s.size());
    for (double t : t_values_s) {
        params.pulse_duration_s = t;
        const EnsembleStats stats = ensemble_recovery(params, ensemble);
        SweepPoint point;
        point.axis = t;
        point.mean = stats.mean;
        point.std_error = stats.std_error;
        point.pulse_duration_s = t;
        point.seed = ensemble.master_seed;
        point.n_realizations = ensemble.n_realizations;
        result.points.push_back(point);
    }
    return result;
}

SweepResult run_npass_series(const std::vector<int>& n_values, StirapParams params,
                             const EnsembleSpec& ensemble) {
    if (n_values.empty()) throw std::invalid_argument("npass series needs N values");
    for (int n : n_values) {
        if (n < 0 || n % 2 != 0) {
            throw std::invalid_argument(
                "odd N: molecule ends in ground state, not detectable");
        }
    }

    SweepResult result;
    result.points.reserve(n_values.size());
    for (int n : n_values) {
        SweepPoint point;
        point.axis = static_cast<double>(n);
        point.pulse_duration_s = params.pulse_duration_s;
        point.seed = ensemble.master_seed;
        point.n_realizations = ensemble.n_realizations;
        if (n == 0) {
            point.mean = 1.0;  // no transfer applied; prefactor only
            point.std_error = 0.0;
        } else {
            params.n_passes = n;
            const EnsembleStats stats = ensemble_recovery(params, ensemble);
            point.mean = stats.mean;
            point.std_error = stats.std_error;
        }
        result.points.push_back(point);
    }
    return result;
}

SweepResult run_rabi_landscape(const std::vector<double>& omega_bar_values_rad_s,
                               StirapParams params_template, const EnsembleSpec& ensemble,
                               const TSearchSpec& search) {
    if (omega_bar_values_rad_s.empty()) {
        throw std::invalid_argument("rabi landscape needs omega_bar values");
    }
    if (!(search.t_min_s > 0.0) || !(search.t_max_s > search.t_min_s)) {
        throw std::invalid_argument("invalid T search window");
    }
    if (search.points_per_decade < 2) {
        throw std::invalid_argument("T search needs >= 2 points per decade");
    }
    params_template.validate();
    const double ratio = params_template.omega_p_max / params_template.omega_s_max;

    const double decades = std::log10(search.t_max_s / search.t_min_s);
    const int n_grid =
        std::max(2, static_cast<int>(std::ceil(search.points_per_decade * decades)) + 1);

    SweepResult result;
    result.points.reserve(omega_bar_values_rad_s.size());
    for (double omega_bar : omega_bar_values_rad_s) {
        if (!(omega_bar > 0.0)) throw std::invalid_argument("omega_bar must be > 0");
        StirapParams params = params_template;
        params.omega_s_max = 2.0 * omega_bar / (1.0 + ratio);
        params.omega_p_max = ratio * params.omega_s_max;
        params.n_passes = 1;

        auto efficiency_at = [&](double t) {
            params.pulse_duration_s = t;
            return ensemble_recovery(params, ensemble, search.search_realizations).mean;
        };

        // Coarse log grid, then golden-section refinement around the best
        // point. The same sub-seeds are reused at every T (common random
        // numbers), so the objective is a smooth function of T.
        int best_index = 0;
        double best_value = -1.0;
        std::vector<double> t_grid(static_cast<std::size_t>(n_grid));
        for (int i = 0; i < n_grid; ++i) {
            const double frac = static_cast<double>(i) / (n_grid - 1);
            t_grid[static_cast<std::size_t>(i)] =
                search.t_min_s * std::pow(search.t_max_s / search.t_min_s, frac);
            const double value = efficiency_at(t_grid[static_cast<std::size_t>(i)]);
            if (value > best_value) {
                best_value = value;
                best_index = i;
            }
        }
        const bool at_boundary = best_index == 0 || best_index == n_grid - 1;
        double t_best = t_grid[static_cast<std::size_t>(best_index)];
        if (!at_boundary) {
            const GoldenResult refined = golden_section_max(
                efficiency_at, t_grid[static_cast<std::size_t>(best_index - 1)],
                t_grid[static_cast<std::size_t>(best_index + 1)], search.refine_rel_tol);
            if (refined.value_best >= best_value) t_best = refined.t_best;
        }

        params.pulse_duration_s = t_best;
        const EnsembleStats stats = ensemble_recovery(params, ensemble);

        SweepPoint point;
        point.axis = omega_bar;
        point.mean = 1.0 - stats.mean;
        point.std_error = stats.std_error;
        point.pulse_duration_s = t_best;
        point.seed = ensemble.master_seed;
        point.n_realizations = ensemble.n_realizations;
        point.boundary_warning = at_boundary;
        result.points.push_back(point);
    }
    return result;
}

}  // namespace stirap
