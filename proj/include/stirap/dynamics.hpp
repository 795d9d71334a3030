#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "stirap/pulse.hpp"
#include "stirap/spectrum.hpp"

namespace stirap {

/// Physics parameters of one STIRAP sequence. All rates are angular (rad/s).
struct StirapParams {
    double omega_p_max = 0.0;             // peak pump Rabi frequency
    double omega_s_max = 0.0;             // peak Stokes Rabi frequency
    double delta_one_photon = 0.0;        // static one-photon detuning
    double delta_two_photon_static = 0.0; // static two-photon detuning offset
    double gamma = 0.0;                   // excited-state decay rate
    double pulse_duration_s = 0.0;
    int n_passes = 1;

    void validate() const;
};

/// Complex amplitudes in the bright-excited-dark basis {B, E, D}.
struct BrightDarkState {
    std::complex<double> c_b{0.0, 0.0};
    std::complex<double> c_e{0.0, 0.0};
    std::complex<double> c_d{1.0, 0.0};

    double total_population() const {
        return std::norm(c_b) + std::norm(c_e) + std::norm(c_d);
    }
};

struct TransferResult {
    double efficiency = 0.0;  // final dark-state population
    double p_bright = 0.0;
    double p_excited = 0.0;
    double p_dark = 0.0;
    double loss = 0.0;        // 1 - total population (decay through E)
};

/// Bright/excited/dark-basis Hamiltonian matrix M such that the equation of
/// motion is i dc/dt = (1/2) M c:
///
///       | 2f_s sin^2(th) + 2f_p cos^2(th) + d cos(2th)   W     2i th' - (f_s - f_p + d) sin(2th) |
///   M = | W                                          -2D - ig                      0             |
///       | -2i th' - (f_s - f_p + d) sin(2th)             0    ... - d cos(2th)                   |
///
/// with f_s, f_p the laser phase noise frequency deviations (rad/s), d the
/// two-photon and D the one-photon detuning, W = omega_rms, g the decay rate.
/// M plus i*gamma restored on the E diagonal is Hermitian.
Eigen::Matrix3cd hamiltonian_bd(const PulseSample& sample, double phi_dot_s,
                                double phi_dot_p, double delta_two_photon,
                                double delta_one_photon, double gamma);

/// Fixed integration step honouring all stability constraints:
/// min(1 / (20 f_max_tone), T / 2000, 0.05 / max(omega_p_max, omega_s_max)).
/// The last term keeps the RK4 amplitude error per pulse below ~1e-7.
double default_step_s(const StirapParams& params, double f_max_tone_hz);

/// Largest step <= step_s that divides the duration into a whole number of
/// steps, so noise grids sampled at step/2 line up exactly with the RK4
/// stage times.
double align_step_to_duration(double step_s, double duration_s);

/// Integrates i dc/dt = (1/2) M(t) c over [0, T] with fixed-step RK4 from the
/// dark state c = (0, 0, 1). Phase trajectories must be sampled on the
/// half-step grid (dt = step/2, t0 = 0, covering [0, T]); empty trajectories
/// mean zero noise. `detuning_hz` shares the same grid and is added to both
/// the one- and two-photon detunings. Returns the final populations;
/// efficiency is the dark-state population at t = T. When non-null,
/// `population_trace` receives the total population after every step.
TransferResult propagate(const StirapParams& params,
                         const PhaseTrajectory& stokes_phase,
                         const PhaseTrajectory& pump_phase,
                         const std::vector<double>& detuning_hz, double step_s,
                         PassDirection direction = PassDirection::forward,
                         std::vector<double>* population_trace = nullptr);

/// Per-pass noise realization, sampled on the propagation half-step grid.
struct PassNoise {
    PhaseTrajectory stokes_phase;
    PhaseTrajectory pump_phase;
    std::vector<double> detuning_hz;
};

/// Builds the noise for pass `pass_index` from `seed`; the factory owns the
/// seed-splitting scheme so each pass gets an independent realization.
using PassNoiseFactory = std::function<PassNoise(
    std::uint64_t seed, int pass_index, double step_s, std::size_t n_samples)>;

struct MultiPassResult {
    double recovery = 1.0;                 // product of per-pass efficiencies
    std::vector<double> pass_efficiency;
};

/// Runs params.n_passes sequential transfers alternating forward and reverse,
/// each with fresh noise from the factory.
MultiPassResult multi_pass(const StirapParams& params, const PassNoiseFactory& factory,
                           std::uint64_t seed, double step_s);

}  // namespace stirap
