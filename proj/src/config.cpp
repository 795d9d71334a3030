#include "stirap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "stirap/csv.hpp"

namespace stirap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ConfigEntry {
    std::string value;
    std::size_t line = 0;
};

using ConfigMap = std::map<std::string, ConfigEntry>;

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

ConfigMap parse_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ConfigMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(path, line_no, "expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(path, line_no, "empty key");
        if (map.count(key)) fail(path, line_no, "duplicate key '" + key + "'");
        map[key] = {value, line_no};
    }
    return map;
}

class ConfigReader {
public:
    ConfigReader(std::string path, ConfigMap map)
        : path_(std::move(path)), map_(std::move(map)) {}

    bool has(const std::string& key) {
        used_.insert(key);
        return map_.count(key) > 0;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        const auto it = map_.find(key);
        return it == map_.end() ? fallback : it->second.value;
    }

    double get_double(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        return parse_double(it->second);
    }

    long long get_int(const std::string& key, long long fallback) {
        used_.insert(key);
        const auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        const double v = parse_double(it->second);
        if (v != std::floor(v)) fail(path_, it->second.line, key + " must be an integer");
        return static_cast<long long>(v);
    }

    bool get_bool(const std::string& key, bool fallback) {
        used_.insert(key);
        const auto it = map_.find(key);
        if (it == map_.end()) return fallback;
        if (it->second.value == "true") return true;
        if (it->second.value == "false") return false;
        fail(path_, it->second.line, key + " must be 'true' or 'false'");
    }

    std::vector<double> get_double_list(const std::string& key) {
        used_.insert(key);
        const auto it = map_.find(key);
        std::vector<double> values;
        if (it == map_.end()) return values;
        std::stringstream stream(it->second.value);
        std::string item;
        while (std::getline(stream, item, ',')) {
            values.push_back(parse_double({item, it->second.line}));
        }
        return values;
    }

    void reject_unknown() const {
        for (const auto& [key, entry] : map_) {
            if (!used_.count(key)) fail(path_, entry.line, "unknown key '" + key + "'");
        }
    }

    const std::string& path() const { return path_; }

private:
    double parse_double(const ConfigEntry& entry) {
        char* end = nullptr;
        const std::string text = [&] {
            auto s = entry.value;
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        }();
        const double v = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0') {
            fail(path_, entry.line, "not a number: '" + text + "'");
        }
        return v;
    }

    std::string path_;
    ConfigMap map_;
    std::set<std::string> used_;
};

[[noreturn]] void invalid_field(const std::string& field, const std::string& why) {
    throw std::runtime_error("invalid config: " + field + " " + why);
}

void validate(const RunConfig& config) {
    if (!(config.omega_p_max_rad_s > 0.0)) invalid_field("omega_p_max_khz", "must be > 0");
    if (!(config.omega_s_max_rad_s > 0.0)) invalid_field("omega_s_max_khz", "must be > 0");
    if (!(config.gamma_rad_s >= 0.0)) invalid_field("gamma_khz", "must be >= 0");
    if (!(config.pulse_duration_s > 0.0)) invalid_field("pulse_duration_us", "must be > 0");
    if (config.n_passes < 1) invalid_field("n_passes", "must be >= 1");
    if (!(config.tone_cutoff_hz > 0.0)) invalid_field("tone_cutoff_khz", "must be > 0");
    if (!(config.ff_gain >= 0.0)) invalid_field("ff_gain", "must be >= 0");
    if (!(config.magnetic_rms_hz >= 0.0)) invalid_field("magnetic_rms_khz", "must be >= 0");
    if (config.magnetic_rms_hz > 0.0 && !(config.magnetic_f_min_hz < config.magnetic_f_max_hz)) {
        invalid_field("magnetic_f_min_hz", "must be < magnetic_f_max_khz");
    }
    if (config.magnetic_n_tones < 2) invalid_field("magnetic_n_tones", "must be >= 2");
    if (!(config.linewidth_sigma_hz >= 0.0)) invalid_field("linewidth_sigma_hz", "must be >= 0");
    if (config.n_realizations < 1) invalid_field("n_realizations", "must be >= 1");

    switch (config.experiment) {
        case ExperimentKind::duration_sweep:
            if (config.t_values_s.empty()) invalid_field("t_values_us", "required for duration_sweep");
            break;
        case ExperimentKind::npass_series:
            if (config.npass_values.empty()) invalid_field("npass_values", "required for npass_series");
            for (int n : config.npass_values) {
                if (n < 0 || n % 2 != 0) {
                    invalid_field("npass_values", "must be even (odd N ends undetectable)");
                }
            }
            break;
        case ExperimentKind::rabi_landscape:
            if (config.omega_bar_values_rad_s.empty()) {
                invalid_field("omega_bar_values_khz", "required for rabi_landscape");
            }
            if (!(config.t_search.t_min_s > 0.0) ||
                !(config.t_search.t_max_s > config.t_search.t_min_s)) {
                invalid_field("t_search_min_us", "window must satisfy 0 < min < max");
            }
            break;
        case ExperimentKind::suppression_curve:
            if (!(config.gain_max > config.gain_min)) invalid_field("gain_max", "must be > gain_min");
            if (config.gain_points < 2) invalid_field("gain_points", "must be >= 2");
            if (!(config.suppression_freq_hz > 0.0)) invalid_field("suppression_freq_mhz", "must be > 0");
            break;
        case ExperimentKind::fit_only:
            if (config.fit_kind != "eta" && config.fit_kind != "loglinear" &&
                config.fit_kind != "rabi") {
                invalid_field("fit_kind", "must be eta, loglinear or rabi");
            }
            if (config.fit_data_path.empty()) invalid_field("fit_data", "required for fit_only");
            break;
    }
}

std::vector<std::pair<double, double>> load_gain_table(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int f = table.column("freq_hz");
    const int g = table.column("gain");
    if (f < 0 || g < 0) throw std::runtime_error(path + ": expected header 'freq_hz,gain'");
    std::vector<std::pair<double, double>> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.emplace_back(row[static_cast<std::size_t>(f)], row[static_cast<std::size_t>(g)]);
    }
    return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::duration_sweep: return "duration_sweep";
        case ExperimentKind::npass_series: return "npass_series";
        case ExperimentKind::rabi_landscape: return "rabi_landscape";
        case ExperimentKind::suppression_curve: return "suppression_curve";
        case ExperimentKind::fit_only: return "fit_only";
    }
    return "unknown";
}

StirapParams RunConfig::make_params() const {
    StirapParams params;
    params.omega_p_max = omega_p_max_rad_s;
    params.omega_s_max = omega_s_max_rad_s;
    params.delta_one_photon = delta_one_photon_rad_s;
    params.delta_two_photon_static = delta_two_photon_rad_s;
    params.gamma = gamma_rad_s;
    params.pulse_duration_s = pulse_duration_s;
    params.n_passes = n_passes;
    return params;
}

EnsembleSpec RunConfig::make_ensemble() const {
    EnsembleSpec ensemble;
    ensemble.n_realizations = n_realizations;
    ensemble.master_seed = master_seed;
    ensemble.tone_cutoff_hz = tone_cutoff_hz;
    if (!pump_spectrum_path.empty()) {
        ensemble.pump_spectrum = BeatNoteSpectrum::from_csv(pump_spectrum_path);
    }
    if (!stokes_spectrum_path.empty()) {
        ensemble.stokes_spectrum = BeatNoteSpectrum::from_csv(stokes_spectrum_path);
    }
    FeedforwardSettings ff;
    ff.enabled = ff_enabled;
    ff.gain = ff_gain;
    ff.delay_mismatch_s = ff_delay_s;
    if (!ff_gain_table_path.empty()) ff.gain_vs_frequency = load_gain_table(ff_gain_table_path);
    ensemble.pump_ff = ff;
    ensemble.stokes_ff = ff;

    if (magnetic_rms_hz > 0.0) {
        DetuningNoiseModel magnetic;
        magnetic.kind = DetuningNoiseKind::one_over_f;
        magnetic.rms_hz = magnetic_rms_hz;
        magnetic.f_min_hz = magnetic_f_min_hz;
        magnetic.f_max_hz = magnetic_f_max_hz;
        magnetic.n_tones = magnetic_n_tones;
        ensemble.detuning_models.push_back(magnetic);
    }
    if (linewidth_sigma_hz > 0.0) {
        DetuningNoiseModel linewidth;
        linewidth.kind = DetuningNoiseKind::shot_to_shot_gaussian;
        linewidth.sigma_hz = linewidth_sigma_hz;
        ensemble.detuning_models.push_back(linewidth);
    }
    return ensemble;
}

RunConfig load_config(const std::string& path) {
    ConfigReader reader(path, parse_key_values(path));
    RunConfig config;

    const std::string kind = reader.get_string("experiment", "");
    if (kind == "duration_sweep") config.experiment = ExperimentKind::duration_sweep;
    else if (kind == "npass_series") config.experiment = ExperimentKind::npass_series;
    else if (kind == "rabi_landscape") config.experiment = ExperimentKind::rabi_landscape;
    else if (kind == "suppression_curve") config.experiment = ExperimentKind::suppression_curve;
    else if (kind == "fit_only") config.experiment = ExperimentKind::fit_only;
    else if (kind.empty()) throw std::runtime_error(path + ": missing required key 'experiment'");
    else throw std::runtime_error(path + ": unknown experiment kind '" + kind + "'");

    config.output_dir = reader.get_string("output_dir", "out");

    // Boundary units: linear kHz for Rabi frequencies and gamma, Hz for
    // detunings, us/ns for times.
    config.omega_p_max_rad_s = kTwoPi * 1e3 * reader.get_double("omega_p_max_khz", 1170.0);
    config.omega_s_max_rad_s = kTwoPi * 1e3 * reader.get_double("omega_s_max_khz", 1190.0);
    config.delta_one_photon_rad_s = kTwoPi * reader.get_double("delta_one_photon_hz", 0.0);
    config.delta_two_photon_rad_s = kTwoPi * reader.get_double("delta_two_photon_hz", 0.0);
    config.gamma_rad_s = kTwoPi * 1e3 * reader.get_double("gamma_khz", 35.0);
    config.pulse_duration_s = 1e-6 * reader.get_double("pulse_duration_us", 23.85);
    config.n_passes = static_cast<int>(reader.get_int("n_passes", 1));

    config.pump_spectrum_path = reader.get_string("pump_spectrum", "");
    config.stokes_spectrum_path = reader.get_string("stokes_spectrum", "");
    config.tone_cutoff_hz = 1e3 * reader.get_double("tone_cutoff_khz", 25.0);
    config.ff_enabled = reader.get_bool("ff_enabled", false);
    config.ff_gain = reader.get_double("ff_gain", 1.0);
    config.ff_delay_s = 1e-9 * reader.get_double("ff_delay_ns", 0.0);
    config.ff_gain_table_path = reader.get_string("ff_gain_table", "");
    config.magnetic_rms_hz = 1e3 * reader.get_double("magnetic_rms_khz", 30.0);
    config.magnetic_f_min_hz = reader.get_double("magnetic_f_min_hz", 10.0);
    config.magnetic_f_max_hz = 1e3 * reader.get_double("magnetic_f_max_khz", 25.0);
    config.magnetic_n_tones = static_cast<int>(reader.get_int("magnetic_n_tones", 32));
    config.linewidth_sigma_hz = reader.get_double("linewidth_sigma_hz", 346.0);

    config.n_realizations = static_cast<int>(reader.get_int("n_realizations", 200));
    config.master_seed = static_cast<std::uint64_t>(reader.get_int("master_seed", 1));

    for (double t : reader.get_double_list("t_values_us")) {
        config.t_values_s.push_back(1e-6 * t);
    }
    for (double n : reader.get_double_list("npass_values")) {
        config.npass_values.push_back(static_cast<int>(n));
    }
    for (double w : reader.get_double_list("omega_bar_values_khz")) {
        config.omega_bar_values_rad_s.push_back(kTwoPi * 1e3 * w);
    }
    config.t_search.t_min_s = 1e-6 * reader.get_double("t_search_min_us", 1.0);
    config.t_search.t_max_s = 1e-6 * reader.get_double("t_search_max_us", 1000.0);
    config.t_search.points_per_decade =
        static_cast<int>(reader.get_int("t_search_points_per_decade", 25));
    config.t_search.refine_rel_tol = reader.get_double("t_search_refine_rel", 0.005);
    config.t_search.search_realizations =
        static_cast<int>(reader.get_int("t_search_realizations", 64));

    config.gain_min = reader.get_double("gain_min", 0.5);
    config.gain_max = reader.get_double("gain_max", 1.5);
    config.gain_points = static_cast<int>(reader.get_int("gain_points", 101));
    config.suppression_delay_s = 1e-9 * reader.get_double("suppression_delay_ns", 0.0);
    config.suppression_freq_hz = 1e6 * reader.get_double("suppression_freq_mhz", 1.0);

    config.fit_kind = reader.get_string("fit_kind", "");
    config.fit_data_path = reader.get_string("fit_data", "");
    config.fit_n_passes = static_cast<int>(reader.get_int("fit_n_passes", 10));

    reader.reject_unknown();
    validate(config);
    return config;
}

void write_resolved_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write resolved config: " + path);
    auto emit = [&](const std::string& key, const std::string& value) {
        out << key << " = " << value << '\n';
    };
    auto num = [](double v) { return format_double(v); };

    emit("experiment", to_string(config.experiment));
    emit("output_dir", config.output_dir);
    emit("omega_p_max_khz", num(config.omega_p_max_rad_s / (kTwoPi * 1e3)));
    emit("omega_s_max_khz", num(config.omega_s_max_rad_s / (kTwoPi * 1e3)));
    emit("delta_one_photon_hz", num(config.delta_one_photon_rad_s / kTwoPi));
    emit("delta_two_photon_hz", num(config.delta_two_photon_rad_s / kTwoPi));
    emit("gamma_khz", num(config.gamma_rad_s / (kTwoPi * 1e3)));
    emit("pulse_duration_us", num(config.pulse_duration_s * 1e6));
    emit("n_passes", std::to_string(config.n_passes));
    emit("pump_spectrum", config.pump_spectrum_path);
    emit("stokes_spectrum", config.stokes_spectrum_path);
    emit("tone_cutoff_khz", num(config.tone_cutoff_hz / 1e3));
    emit("ff_enabled", config.ff_enabled ? "true" : "false");
    emit("ff_gain", num(config.ff_gain));
    emit("ff_delay_ns", num(config.ff_delay_s * 1e9));
    emit("ff_gain_table", config.ff_gain_table_path);
    emit("magnetic_rms_khz", num(config.magnetic_rms_hz / 1e3));
    emit("magnetic_f_min_hz", num(config.magnetic_f_min_hz));
    emit("magnetic_f_max_khz", num(config.magnetic_f_max_hz / 1e3));
    emit("magnetic_n_tones", std::to_string(config.magnetic_n_tones));
    emit("linewidth_sigma_hz", num(config.linewidth_sigma_hz));
    emit("n_realizations", std::to_string(config.n_realizations));
    emit("master_seed", std::to_string(config.master_seed));

    std::string t_list;
    for (double t : config.t_values_s) {
        if (!t_list.empty()) t_list += ',';
        t_list += num(t * 1e6);
    }
    emit("t_values_us", t_list);
    std::string n_list;
    for (int n : config.npass_values) {
        if (!n_list.empty()) n_list += ',';
        n_list += std::to_string(n);
    }
    emit("npass_values", n_list);
    std::string w_list;
    for (double w : config.omega_bar_values_rad_s) {
        if (!w_list.empty()) w_list += ',';
        w_list += num(w / (kTwoPi * 1e3));
    }
    emit("omega_bar_values_khz", w_list);
    emit("t_search_min_us", num(config.t_search.t_min_s * 1e6));
    emit("t_search_max_us", num(config.t_search.t_max_s * 1e6));
    emit("t_search_points_per_decade", std::to_string(config.t_search.points_per_decade));
    emit("t_search_refine_rel", num(config.t_search.refine_rel_tol));
    emit("t_search_realizations", std::to_string(config.t_search.search_realizations));
    emit("gain_min", num(config.gain_min));
    emit("gain_max", num(config.gain_max));
    emit("gain_points", std::to_string(config.gain_points));
    emit("suppression_delay_ns", num(config.suppression_delay_s * 1e9));
    emit("suppression_freq_mhz", num(config.suppression_freq_hz / 1e6));
    emit("fit_kind", config.fit_kind);
    emit("fit_data", config.fit_data_path);
    emit("fit_n_passes", std::to_string(config.fit_n_passes));
}

}  // namespace stirap
