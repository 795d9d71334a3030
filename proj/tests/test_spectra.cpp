#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "oracles.hpp"
#include "stirap/rng.hpp"
#include "stirap/spectrum.hpp"

using namespace stirap;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 64 MHz grid over an 8 us window: every multiple of 125 kHz is an exact DFT
// bin, so periodogram checks see no leakage.
constexpr double kOracleDt = 15.625e-9;
constexpr std::size_t kOracleSamples = 512;
constexpr double kOracleBinHz = 125e3;

double tone_to_dbc(const PhaseToneSet& tones, std::size_t index) {
    const auto& tone = tones.tones()[index];
    const PhaseTrajectory trajectory =
        synthesize_phase(tones, 0.0, kOracleDt, kOracleSamples);
    const auto bin = static_cast<std::size_t>(std::llround(tone.freq_hz / kOracleBinHz));
    return oracles::sideband_dbc(trajectory.phi_rad, bin);
}

}  // namespace

TEST_CASE("spectrum validation") {
    CHECK_THROWS(BeatNoteSpectrum({{1e6, -40.0}}));                      // < 2 bins
    CHECK_THROWS(BeatNoteSpectrum({{2e6, -40.0}, {1e6, -40.0}}));        // not increasing
    CHECK_THROWS(BeatNoteSpectrum({{1e6, -40.0}, {1e6, -41.0}}));        // not strict
    CHECK_THROWS(BeatNoteSpectrum({{-1e6, -40.0}, {1e6, -40.0}}));       // negative freq
    CHECK_THROWS(BeatNoteSpectrum({{1e6, -40.0}, {2e6, 0.5}}));          // above carrier
    CHECK_NOTHROW(BeatNoteSpectrum({{1e6, -40.0}, {2e6, 0.0}}));
}

TEST_CASE("tones_from_spectrum converts dBc to rad with the PM identity") {
    const BeatNoteSpectrum spectrum({{1e3, -30.0}, {2e6, -40.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 7);

    REQUIRE(tones.size() == 1);  // 1 kHz bin removed by the cutoff
    CHECK(tones.tones()[0].freq_hz == 2e6);
    CHECK(tones.tones()[0].amplitude_rad == doctest::Approx(0.02).epsilon(1e-12));

    // Oracle: pure-tone PM with this amplitude shows a -40 dBc sideband.
    CHECK(tone_to_dbc(tones, 0) == doctest::Approx(-40.0).epsilon(0.0).scale(1.0).epsilon(0.002));
}

TEST_CASE("tones_from_spectrum error cases") {
    const BeatNoteSpectrum spectrum({{1e3, -30.0}, {2e3, -40.0}});
    CHECK_THROWS_WITH(static_cast<void>(tones_from_spectrum(spectrum, 25e3, 1)),
                      "no tones above cutoff");
    CHECK_THROWS(static_cast<void>(tones_from_spectrum(spectrum, 0.0, 1)));
}

TEST_CASE("equal bins give equal amplitudes (-46 dBc pair)") {
    const BeatNoteSpectrum spectrum({{1e6, -46.0}, {2e6, -46.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 3);
    REQUIRE(tones.size() == 2);
    const double expected = 2.0 * std::pow(10.0, -2.3);  // 0.0100237...
    CHECK(tones.tones()[0].amplitude_rad == doctest::Approx(expected).epsilon(1e-12));
    CHECK(tones.tones()[1].amplitude_rad == tones.tones()[0].amplitude_rad);
    CHECK(expected == doctest::Approx(0.01002).epsilon(1e-3));

    CHECK(tone_to_dbc(tones, 0) == doctest::Approx(-46.0).epsilon(0.005));
    CHECK(tone_to_dbc(tones, 1) == doctest::Approx(-46.0).epsilon(0.005));
}

TEST_CASE("tone phases are reproducible and uniform in [0, 2pi)") {
    const BeatNoteSpectrum spectrum(
        {{0.5e6, -40.0}, {1e6, -42.0}, {2e6, -44.0}, {3e6, -46.0}});
    const PhaseToneSet a = tones_from_spectrum(spectrum, 25e3, 42);
    const PhaseToneSet b = tones_from_spectrum(spectrum, 25e3, 42);
    const PhaseToneSet c = tones_from_spectrum(spectrum, 25e3, 43);
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.tones()[i].phase_rad == b.tones()[i].phase_rad);  // bit-identical
        CHECK(a.tones()[i].phase_rad >= 0.0);
        CHECK(a.tones()[i].phase_rad < kTwoPi);
        any_different = any_different || a.tones()[i].phase_rad != c.tones()[i].phase_rad;
    }
    CHECK(any_different);
}

TEST_CASE("apply_feedforward disabled is the identity") {
    const BeatNoteSpectrum spectrum({{1e6, -40.0}, {2e6, -46.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 5);
    FeedforwardSettings ff;
    ff.enabled = false;
    ff.gain = 0.7;
    ff.delay_mismatch_s = 55e-9;
    const PhaseToneSet out = apply_feedforward(tones, ff);
    REQUIRE(out.size() == tones.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out.tones()[i].freq_hz == tones.tones()[i].freq_hz);
        CHECK(out.tones()[i].amplitude_rad == tones.tones()[i].amplitude_rad);
        CHECK(out.tones()[i].phase_rad == tones.tones()[i].phase_rad);
    }
}

TEST_CASE("apply_feedforward with unit gain and zero delay cancels exactly") {
    const BeatNoteSpectrum spectrum({{1e6, -40.0}, {2e6, -46.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 5);
    FeedforwardSettings ff;
    ff.enabled = true;
    ff.gain = 1.0;
    const PhaseToneSet out = apply_feedforward(tones, ff);
    for (const auto& tone : out.tones()) CHECK(tone.amplitude_rad == 0.0);
}

TEST_CASE("best measured suppression ~29 dB corresponds to gain 0.9646") {
    const BeatNoteSpectrum spectrum({{1e6, -40.0}, {2e6, -46.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 5);
    FeedforwardSettings ff;
    ff.enabled = true;
    ff.gain = 0.9646;
    const PhaseToneSet out = apply_feedforward(tones, ff);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ratio = out.tones()[i].amplitude_rad / tones.tones()[i].amplitude_rad;
        CHECK(ratio == doctest::Approx(0.0354).epsilon(1e-9));
    }
    CHECK(suppression_db(0.9646, 0.0, 1e6) == doctest::Approx(29.0).epsilon(0.002));
}

TEST_CASE("suppression_db known values") {
    // Perfect cancellation clamps at the ceiling.
    CHECK(suppression_db(1.0, 0.0, 1e6) == 120.0);
    CHECK(suppression_db(1.0, 0.0, 3e6, 90.0) == 90.0);

    // g = 0.9: residual exactly 0.1 -> 20 dB.
    CHECK(suppression_db(0.9, 0.0, 1e6) == doctest::Approx(20.0).epsilon(1e-12));

    // g = 1 with 55 ns delay at 1 MHz: residual 2 sin(pi f tau).
    const double residual = 2.0 * std::sin(std::numbers::pi * 1e6 * 55e-9);
    const double expected = -20.0 * std::log10(residual);
    CHECK(suppression_db(1.0, 55e-9, 1e6) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(9.27).epsilon(0.01));  // the measured-delay operating point
}

TEST_CASE("suppression_db properties") {
    // Independent of frequency at zero delay.
    const double reference = suppression_db(0.8, 0.0, 1e3);
    for (double f : {1e4, 1e5, 1e6, 5e6}) CHECK(suppression_db(0.8, 0.0, f) == reference);

    // Continuity in gain and delay away from the ceiling.
    const double base = suppression_db(0.8, 30e-9, 1e6);
    CHECK(std::abs(suppression_db(0.8 + 1e-7, 30e-9, 1e6) - base) < 1e-4);
    CHECK(std::abs(suppression_db(0.8, 30e-9 + 1e-15, 1e6) - base) < 1e-4);

    CHECK_THROWS(static_cast<void>(suppression_db(0.9, 0.0, -1e6)));
    CHECK_THROWS(static_cast<void>(suppression_db(-0.1, 0.0, 1e6)));
}

TEST_CASE("feedforward never amplifies for 0 <= g <= 2 at zero delay") {
    const BeatNoteSpectrum spectrum({{1e6, -40.0}, {2e6, -46.0}, {3e6, -50.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 11);
    for (double gain = 0.0; gain <= 2.0; gain += 0.05) {
        FeedforwardSettings ff;
        ff.enabled = true;
        ff.gain = gain;
        const PhaseToneSet out = apply_feedforward(tones, ff);
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out.tones()[i].amplitude_rad <=
                  tones.tones()[i].amplitude_rad * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("frequency-dependent gain table") {
    PhaseToneSet tones(std::vector<PhaseTone>{{1e6, 0.01, 0.0}, {3e6, 0.01, 0.0}});
    FeedforwardSettings ff;
    ff.enabled = true;
    ff.gain = 1.0;
    ff.gain_vs_frequency = {{1e6, 1.0}, {3e6, 0.5}};
    const PhaseToneSet out = apply_feedforward(tones, ff);
    CHECK(out.tones()[0].amplitude_rad == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.tones()[1].amplitude_rad == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("synthesize_phase closed-form values") {
    SUBCASE("empty tone set gives zero trajectories") {
        const PhaseTrajectory trajectory = synthesize_phase(PhaseToneSet{}, 0.0, 1e-8, 100);
        for (double v : trajectory.phi_rad) CHECK(v == 0.0);
        for (double v : trajectory.phi_dot_rad_per_s) CHECK(v == 0.0);
    }
    SUBCASE("single tone at t = 0") {
        PhaseToneSet tones(std::vector<PhaseTone>{{1e6, 0.02, 0.0}});
        const PhaseTrajectory trajectory = synthesize_phase(tones, 0.0, 1e-8, 4);
        CHECK(trajectory.phi_rad[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(trajectory.phi_dot_rad_per_s[0] ==
              doctest::Approx(0.02 * kTwoPi * 1e6).epsilon(1e-12));
        CHECK(trajectory.phi_dot_rad_per_s[0] == doctest::Approx(1.2566e5).epsilon(1e-4));
    }
    SUBCASE("undersampled grid is rejected") {
        PhaseToneSet tones(std::vector<PhaseTone>{{5e6, 0.02, 0.0}});
        CHECK_THROWS_WITH(static_cast<void>(synthesize_phase(tones, 0.0, 1.0 / 40e6, 16)),
                          "sample rate below 10x max tone frequency");
    }
}

TEST_CASE("synthesized phi/phi_dot match the analytic tone sum") {
    const BeatNoteSpectrum spectrum(
        {{0.5e6, -40.0}, {1e6, -42.0}, {2e6, -44.0}, {3e6, -46.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 99);
    std::vector<std::array<double, 3>> reference;
    for (const auto& tone : tones.tones()) {
        reference.push_back({tone.freq_hz, tone.amplitude_rad, tone.phase_rad});
    }
    const PhaseTrajectory trajectory =
        synthesize_phase(tones, 0.0, kOracleDt, 4 * kOracleSamples);
    const double scale_phi = tones.rms_phase_rad();
    const double scale_rate = scale_phi * kTwoPi * 3e6;
    for (std::size_t k = 0; k < trajectory.size(); k += 7) {
        const double t = trajectory.time_at(k);
        CHECK(std::abs(trajectory.phi_rad[k] - oracles::tone_sum_phi(reference, t)) <
              1e-9 * scale_phi);
        CHECK(std::abs(trajectory.phi_dot_rad_per_s[k] -
                       oracles::tone_sum_phi_dot(reference, t)) < 1e-9 * scale_rate);
    }
}

TEST_CASE("spectrum -> tones -> trajectory -> periodogram round trip within 0.2 dB") {
    const BeatNoteSpectrum spectrum(
        {{0.5e6, -50.0}, {1e6, -45.0}, {2e6, -40.0}, {3e6, -55.0}});
    const PhaseToneSet tones = tones_from_spectrum(spectrum, 25e3, 2024);
    const PhaseTrajectory trajectory =
        synthesize_phase(tones, 0.0, kOracleDt, kOracleSamples);
    for (const auto& bin : spectrum.bins()) {
        const auto k = static_cast<std::size_t>(std::llround(bin.freq_hz / kOracleBinHz));
        const double measured = oracles::sideband_dbc(trajectory.phi_rad, k);
        CHECK(std::abs(measured - bin.power_dbc) < 0.2);
    }
}

TEST_CASE("total RMS phase equals sqrt(sum amplitude^2 / 2)") {
    PhaseToneSet tones(
        std::vector<PhaseTone>{{1e5, 0.03, 0.1}, {2e5, 0.04, 2.0}, {3e5, 0.12, 4.0}});
    const double expected = std::sqrt((0.03 * 0.03 + 0.04 * 0.04 + 0.12 * 0.12) / 2.0);
    CHECK(tones.rms_phase_rad() == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("sample_detuning: zero-noise and error cases") {
    DetuningNoiseModel model;
    model.kind = DetuningNoiseKind::one_over_f;
    model.rms_hz = 0.0;
    for (double v : sample_detuning(model, 0.0, 1e-7, 64, 1)) CHECK(v == 0.0);

    model.rms_hz = 1e3;
    model.f_min_hz = 1e4;
    model.f_max_hz = 1e3;  // inverted band
    CHECK_THROWS(static_cast<void>(sample_detuning(model, 0.0, 1e-7, 64, 1)));
}

TEST_CASE("one_over_f ensemble RMS matches the requested 30 kHz within 3%") {
    DetuningNoiseModel model;
    model.kind = DetuningNoiseKind::one_over_f;
    model.rms_hz = 30e3;

    const std::size_t n_samples = 257;
    double total_square = 0.0;
    std::size_t total_count = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto series = sample_detuning(model, 0.0, 1e-7, n_samples, seed);
        for (double v : series) total_square += v * v;
        total_count += series.size();
    }
    const double ensemble_rms = std::sqrt(total_square / static_cast<double>(total_count));
    CHECK(ensemble_rms == doctest::Approx(30e3).epsilon(0.03));
}

TEST_CASE("shot-to-shot gaussian statistics (sigma = 346 Hz)") {
    DetuningNoiseModel model;
    model.kind = DetuningNoiseKind::shot_to_shot_gaussian;
    model.sigma_hz = 346.0;

    double sum = 0.0;
    double sum_sq = 0.0;
    const int n_seeds = 10000;
    for (int seed = 0; seed < n_seeds; ++seed) {
        const auto series =
            sample_detuning(model, 0.0, 1e-7, 8, static_cast<std::uint64_t>(seed));
        for (std::size_t k = 1; k < series.size(); ++k) CHECK(series[k] == series[0]);
        sum += series[0];
        sum_sq += series[0] * series[0];
    }
    const double mean = sum / n_seeds;
    const double std_dev = std::sqrt(sum_sq / n_seeds - mean * mean);
    CHECK(std::abs(mean) < 15.0);
    CHECK(std_dev == doctest::Approx(346.0).epsilon(0.03));
}

TEST_CASE("detuning draws are reproducible for identical seeds") {
    DetuningNoiseModel model;
    model.kind = DetuningNoiseKind::one_over_f;
    model.rms_hz = 30e3;
    const auto a = sample_detuning(model, 0.0, 1e-7, 128, 77);
    const auto b = sample_detuning(model, 0.0, 1e-7, 128, 77);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
}
