#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <json.hpp>

#include "stirap/config.hpp"
#include "stirap/csv.hpp"
#include "stirap/model.hpp"
#include "stirap/parallel.hpp"
#include "stirap/rng.hpp"
#include "stirap/version.hpp"

namespace stirap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CsvTable suppression_table(const RunConfig& config) {
    CsvTable table;
    table.header = {"gain", "suppression_db"};
    for (int i = 0; i < config.gain_points; ++i) {
        const double gain =
            config.gain_min + (config.gain_max - config.gain_min) * i /
                                  static_cast<double>(config.gain_points - 1);
        table.rows.push_back({gain, suppression_db(gain, config.suppression_delay_s,
                                                   config.suppression_freq_hz)});
    }
    return table;
}

CsvTable sweep_table(const SweepResult& sweep, ExperimentKind kind) {
    CsvTable table;
    if (kind == ExperimentKind::duration_sweep) {
        table.header = {"T_us", "mean_recovery", "std_error", "n_realizations", "seed"};
        for (const auto& p : sweep.points) {
            table.rows.push_back({p.axis * 1e6, p.mean, p.std_error,
                                  static_cast<double>(p.n_realizations),
                                  static_cast<double>(p.seed)});
        }
    } else if (kind == ExperimentKind::npass_series) {
        table.header = {"n_passes", "mean_recovery", "std_error", "n_realizations", "seed"};
        for (const auto& p : sweep.points) {
            table.rows.push_back({p.axis, p.mean, p.std_error,
                                  static_cast<double>(p.n_realizations),
                                  static_cast<double>(p.seed)});
        }
    } else {
        table.header = {"omega_bar_khz", "error_rate", "std_error", "optimal_T_us",
                        "n_realizations", "seed", "boundary_warning"};
        for (const auto& p : sweep.points) {
            table.rows.push_back({p.axis / (kTwoPi * 1e3), p.mean, p.std_error,
                                  p.pulse_duration_s * 1e6,
                                  static_cast<double>(p.n_realizations),
                                  static_cast<double>(p.seed),
                                  p.boundary_warning ? 1.0 : 0.0});
        }
    }
    return table;
}

double pick_column(const CsvTable& table, const std::vector<std::string>& names,
                   const std::vector<double>& row, bool required,
                   const std::string& path) {
    for (const auto& name : names) {
        const int c = table.column(name);
        if (c >= 0) return row[static_cast<std::size_t>(c)];
    }
    if (required) {
        throw std::runtime_error(path + ": missing column (tried '" + names.front() + "')");
    }
    return 0.0;
}

bool has_any_column(const CsvTable& table, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        if (table.column(name) >= 0) return true;
    }
    return false;
}

CsvTable fit_table(const RunConfig& config) {
    const CsvTable data = read_csv(config.fit_data_path);
    const std::vector<std::string> sigma_names = {"sigma", "std_error"};
    const bool has_sigma = has_any_column(data, sigma_names);

    CsvTable table;
    if (config.fit_kind == "eta") {
        std::vector<RecoveryPoint> points;
        for (const auto& row : data.rows) {
            RecoveryPoint p;
            p.pulse_duration_s =
                1e-6 * pick_column(data, {"T_us"}, row, true, config.fit_data_path);
            p.recovery = pick_column(data, {"recovery", "mean_recovery"}, row, true,
                                     config.fit_data_path);
            p.sigma = has_sigma
                          ? pick_column(data, sigma_names, row, false, config.fit_data_path)
                          : 0.0;
            points.push_back(p);
        }
        const EfficiencyModelFit fit = fit_eta_curve(points, config.fit_n_passes);
        table.header = {"tau_adi_us", "tau_adi_sigma_us", "tau_deph_ms",
                        "tau_deph_sigma_ms", "amplitude", "amplitude_sigma"};
        table.rows.push_back({fit.tau_adi_s * 1e6, std::sqrt(fit.covariance(0, 0)) * 1e6,
                              fit.tau_deph_s * 1e3, std::sqrt(fit.covariance(1, 1)) * 1e3,
                              fit.amplitude, std::sqrt(fit.covariance(2, 2))});
    } else if (config.fit_kind == "loglinear") {
        std::vector<NPassPoint> points;
        for (const auto& row : data.rows) {
            NPassPoint p;
            p.n_passes = static_cast<int>(
                pick_column(data, {"n_passes", "N"}, row, true, config.fit_data_path));
            p.recovery = pick_column(data, {"recovery", "mean_recovery"}, row, true,
                                     config.fit_data_path);
            p.sigma = has_sigma
                          ? pick_column(data, sigma_names, row, false, config.fit_data_path)
                          : 0.0;
            points.push_back(p);
        }
        const LogLinearFit fit = fit_loglinear(points);
        table.header = {"eta", "eta_sigma", "p0", "p0_sigma", "error_rate"};
        table.rows.push_back({fit.eta, fit.eta_sigma, fit.p0, fit.p0_sigma, 1.0 - fit.eta});
    } else {
        std::vector<RabiPoint> points;
        for (const auto& row : data.rows) {
            RabiPoint p;
            p.pulse_length_s =
                1e-6 * pick_column(data, {"tau_us"}, row, true, config.fit_data_path);
            p.population =
                pick_column(data, {"population"}, row, true, config.fit_data_path);
            p.sigma = has_sigma
                          ? pick_column(data, sigma_names, row, false, config.fit_data_path)
                          : 0.0;
            points.push_back(p);
        }
        const RabiFlopFit fit = fit_rabi_flop(points);
        table.header = {"omega_khz", "omega_sigma_khz", "decay_us", "amplitude", "offset",
                        "omega_identifiable"};
        table.rows.push_back({fit.omega_rad_s / (kTwoPi * 1e3),
                              std::sqrt(fit.covariance(0, 0)) / (kTwoPi * 1e3),
                              fit.decay_time_s * 1e6, fit.amplitude, fit.offset,
                              fit.omega_identifiable ? 1.0 : 0.0});
    }
    return table;
}

}  // namespace

int run_experiment(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    try {
        std::filesystem::create_directories(config.output_dir);
        const std::string results_path = config.output_dir + "/results.csv";

        CsvTable results;
        switch (config.experiment) {
            case ExperimentKind::suppression_curve:
                results = suppression_table(config);
                break;
            case ExperimentKind::fit_only:
                results = fit_table(config);
                break;
            case ExperimentKind::duration_sweep: {
                const SweepResult sweep = run_duration_sweep(
                    config.t_values_s, config.make_params(), config.make_ensemble());
                results = sweep_table(sweep, config.experiment);
                break;
            }
            case ExperimentKind::npass_series: {
                const SweepResult sweep = run_npass_series(
                    config.npass_values, config.make_params(), config.make_ensemble());
                results = sweep_table(sweep, config.experiment);
                break;
            }
            case ExperimentKind::rabi_landscape: {
                const SweepResult sweep =
                    run_rabi_landscape(config.omega_bar_values_rad_s, config.make_params(),
                                       config.make_ensemble(), config.t_search);
                results = sweep_table(sweep, config.experiment);
                break;
            }
        }

        write_csv(results_path, results);
        write_resolved_config(config, config.output_dir + "/resolved_config.txt");

        const double wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        nlohmann::json metadata;
        metadata["version"] = kVersion;
        metadata["prng"] = kPrngAlgorithm;
        metadata["experiment"] = to_string(config.experiment);
        metadata["master_seed"] = config.master_seed;
        metadata["n_realizations"] = config.n_realizations;
        metadata["threads"] = max_worker_threads();
        metadata["wall_time_s"] = wall_s;
        std::ofstream meta(config.output_dir + "/metadata.json", std::ios::binary);
        meta << metadata.dump(2) << '\n';

        std::cout << "wrote " << results_path << " (" << results.rows.size() << " rows)\n";
        return 0;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
}

}  // namespace stirap
