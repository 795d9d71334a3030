#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "stirap/config.hpp"
#include "stirap/csv.hpp"

using namespace stirap;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const std::string kDataDir = STIRAP_DATA_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("stirap_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path.string();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("minimal config picks up the documented defaults") {
    TempDir dir;
    const std::string path = write_file(dir.path / "run.cfg",
                                        "experiment = duration_sweep\n"
                                        "stokes_spectrum = " + kDataDir + "/stokes_ff_off.csv\n"
                                        "pump_spectrum = " + kDataDir + "/stokes_ff_off.csv\n"
                                        "t_values_us = 10,20\n");
    const RunConfig config = load_config(path);

    CHECK(config.gamma_rad_s == doctest::Approx(kTwoPi * 35e3).epsilon(1e-12));
    CHECK(config.linewidth_sigma_hz == 346.0);
    CHECK(config.magnetic_rms_hz == 30e3);
    CHECK(config.tone_cutoff_hz == 25e3);
    CHECK(config.omega_p_max_rad_s == doctest::Approx(kTwoPi * 1.17e6).epsilon(1e-12));
    CHECK(config.omega_s_max_rad_s == doctest::Approx(kTwoPi * 1.19e6).epsilon(1e-12));
    CHECK(config.n_realizations == 200);
    CHECK(config.master_seed == 1);
    REQUIRE(config.t_values_s.size() == 2);
    CHECK(config.t_values_s[0] == doctest::Approx(10e-6).epsilon(1e-12));

    // The derived ensemble carries both detuning models and the spectra.
    const EnsembleSpec ensemble = config.make_ensemble();
    CHECK(ensemble.detuning_models.size() == 2);
    CHECK(ensemble.pump_spectrum.has_value());
    CHECK(ensemble.stokes_spectrum.has_value());
}

TEST_CASE("config validation errors name the field") {
    TempDir dir;

    SUBCASE("negative pulse duration") {
        const std::string path = write_file(dir.path / "bad.cfg",
                                            "experiment = duration_sweep\n"
                                            "t_values_us = 10\n"
                                            "pulse_duration_us = -5\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_config(path)),
                             doctest::Contains("pulse_duration_us"), std::runtime_error);
    }
    SUBCASE("unknown key is rejected with its name and line") {
        const std::string path = write_file(dir.path / "bad.cfg",
                                            "experiment = duration_sweep\n"
                                            "t_values_us = 10\n"
                                            "omega_typo = 3\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_config(path)),
                             doctest::Contains("omega_typo"), std::runtime_error);
        try {
            static_cast<void>(load_config(path));
        } catch (const std::exception& error) {
            CHECK(std::string(error.what()).find(":3:") != std::string::npos);
        }
    }
    SUBCASE("zero realizations rejected before any compute") {
        const std::string path = write_file(dir.path / "bad.cfg",
                                            "experiment = duration_sweep\n"
                                            "t_values_us = 10\n"
                                            "n_realizations = 0\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_config(path)),
                             doctest::Contains("n_realizations"), std::runtime_error);
    }
    SUBCASE("missing experiment kind") {
        const std::string path = write_file(dir.path / "bad.cfg", "t_values_us = 10\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_config(path)),
                             doctest::Contains("experiment"), std::runtime_error);
    }
    SUBCASE("odd npass values") {
        const std::string path = write_file(dir.path / "bad.cfg",
                                            "experiment = npass_series\n"
                                            "npass_values = 2,3\n");
        CHECK_THROWS(static_cast<void>(load_config(path)));
    }
    SUBCASE("parse error carries the line number") {
        const std::string path = write_file(dir.path / "bad.cfg",
                                            "experiment = duration_sweep\n"
                                            "this line has no equals sign\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_config(path)),
                             doctest::Contains(":2:"), std::runtime_error);
    }
    SUBCASE("duplicate key") {
        const std::string path = write_file(dir.path / "bad.cfg",
                                            "experiment = duration_sweep\n"
                                            "t_values_us = 10\n"
                                            "t_values_us = 20\n");
        CHECK_THROWS_WITH_AS(static_cast<void>(load_config(path)),
                             doctest::Contains("duplicate"), std::runtime_error);
    }
}

TEST_CASE("resolved config round-trips through load_config") {
    TempDir dir;
    const std::string path = write_file(dir.path / "run.cfg",
                                        "experiment = suppression_curve\n"
                                        "gain_min = 0.8\n"
                                        "gain_max = 1.2\n"
                                        "gain_points = 11\n"
                                        "suppression_delay_ns = 55\n"
                                        "master_seed = 42\n");
    const RunConfig config = load_config(path);
    const std::string resolved = (dir.path / "resolved.cfg").string();
    write_resolved_config(config, resolved);

    const RunConfig reloaded = load_config(resolved);
    CHECK(reloaded.experiment == ExperimentKind::suppression_curve);
    CHECK(reloaded.gain_min == config.gain_min);
    CHECK(reloaded.gain_points == config.gain_points);
    CHECK(reloaded.suppression_delay_s == config.suppression_delay_s);
    CHECK(reloaded.master_seed == 42);
    CHECK(reloaded.gamma_rad_s == config.gamma_rad_s);
}

TEST_CASE("suppression curve run writes the documented outputs, peaked at g = 1") {
    TempDir dir;
    RunConfig config;
    config.experiment = ExperimentKind::suppression_curve;
    config.output_dir = (dir.path / "out").string();
    config.omega_p_max_rad_s = kTwoPi * 1.17e6;
    config.omega_s_max_rad_s = kTwoPi * 1.19e6;
    config.gamma_rad_s = kTwoPi * 35e3;
    config.pulse_duration_s = 20e-6;
    config.gain_min = 0.5;
    config.gain_max = 1.5;
    config.gain_points = 101;

    REQUIRE(run_experiment(config) == 0);
    REQUIRE(fs::exists(config.output_dir + "/results.csv"));
    REQUIRE(fs::exists(config.output_dir + "/resolved_config.txt"));
    REQUIRE(fs::exists(config.output_dir + "/metadata.json"));

    const CsvTable table = read_csv(config.output_dir + "/results.csv");
    REQUIRE(table.header == std::vector<std::string>{"gain", "suppression_db"});
    REQUIRE(table.rows.size() == 101);
    std::size_t best = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i][1] > table.rows[best][1]) best = i;
    }
    CHECK(table.rows[best][0] == doctest::Approx(1.0).epsilon(1e-12));

    const std::string metadata = read_file(config.output_dir + "/metadata.json");
    CHECK(metadata.find("splitmix64") != std::string::npos);
    CHECK(metadata.find("master_seed") != std::string::npos);
}

TEST_CASE("rerunning the same config yields byte-identical results.csv") {
    TempDir dir;
    const std::string cfg = write_file(
        dir.path / "run.cfg",
        "experiment = duration_sweep\n"
        "stokes_spectrum = " + kDataDir + "/stokes_ff_off.csv\n"
        "pump_spectrum = " + kDataDir + "/stokes_ff_off.csv\n"
        "t_values_us = 8,12\n"
        "n_realizations = 4\n"
        "n_passes = 1\n"
        "master_seed = 9\n"
        "output_dir = " + (dir.path / "out_a").string() + "\n");
    RunConfig config = load_config(cfg);
    REQUIRE(run_experiment(config) == 0);
    const std::string first = read_file(dir.path / "out_a" / "results.csv");

    config.output_dir = (dir.path / "out_b").string();
    REQUIRE(run_experiment(config) == 0);
    const std::string second = read_file(dir.path / "out_b" / "results.csv");

    CHECK(first == second);
    CHECK(!first.empty());
    CHECK(first.find('\r') == std::string::npos);  // '\n' endings only

    const CsvTable table = read_csv((dir.path / "out_a" / "results.csv").string());
    REQUIRE(table.header ==
            std::vector<std::string>{"T_us", "mean_recovery", "std_error",
                                     "n_realizations", "seed"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][0] == 8.0);
    CHECK(table.rows[0][3] == 4.0);
    CHECK(table.rows[0][4] == 9.0);
}

TEST_CASE("fit_only run reads a data CSV and reports the fit") {
    TempDir dir;
    // Synthetic log-linear data at eta = 0.97, P0 = 0.9.
    CsvTable data;
    data.header = {"n_passes", "recovery", "sigma"};
    for (int n : {2, 4, 6, 8, 10}) {
        data.rows.push_back({static_cast<double>(n), 0.9 * std::pow(0.97, n), 0.003});
    }
    const std::string data_path = (dir.path / "npass.csv").string();
    write_csv(data_path, data);

    RunConfig config;
    config.experiment = ExperimentKind::fit_only;
    config.output_dir = (dir.path / "out").string();
    config.omega_p_max_rad_s = kTwoPi * 1.17e6;
    config.omega_s_max_rad_s = kTwoPi * 1.19e6;
    config.gamma_rad_s = kTwoPi * 35e3;
    config.pulse_duration_s = 20e-6;
    config.fit_kind = "loglinear";
    config.fit_data_path = data_path;

    REQUIRE(run_experiment(config) == 0);
    const CsvTable result = read_csv(config.output_dir + "/results.csv");
    const int eta_col = result.column("eta");
    REQUIRE(eta_col >= 0);
    CHECK(result.rows[0][static_cast<std::size_t>(eta_col)] ==
          doctest::Approx(0.97).epsilon(1e-9));
}

TEST_CASE("format_double round-trips and stays locale-independent") {
    for (double v : {0.1, 1.0 / 3.0, 123456.789, 1e-300, -0.0, 35000.0}) {
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
        CHECK(text.find(',') == std::string::npos);
    }
}
