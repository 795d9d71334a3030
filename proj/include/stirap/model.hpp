#pragma once

#include <Eigen/Dense>
#include <vector>

namespace stirap {

/// Parameters of the transfer-efficiency model
/// eta(T) = exp(-tau_adi/T - T/tau_deph), fitted to recovery-vs-duration data
/// as recovery(T) = amplitude * eta(T)^n_passes.
struct EfficiencyModelFit {
    double tau_adi_s = 0.0;
    double tau_deph_s = 0.0;
    double amplitude = 1.0;
    int n_passes_used = 1;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // (tau_adi, tau_deph, amplitude)
};

/// Decaying-oscillation fit P(t) = offset + amplitude exp(-t/decay) cos(omega t).
struct RabiFlopFit {
    double omega_rad_s = 0.0;
    double decay_time_s = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (omega, decay, amplitude, offset)
    bool omega_identifiable = true;  // false when the oscillation amplitude is ~0
};

struct LogLinearFit {
    double eta = 0.0;        // per-pass efficiency, exp(slope)
    double p0 = 0.0;         // prefactor, exp(intercept)
    double eta_sigma = 0.0;
    double p0_sigma = 0.0;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (slope, intercept)
};

struct RecoveryPoint {
    double pulse_duration_s = 0.0;
    double recovery = 0.0;
    double sigma = 0.0;  // <= 0 means unit weight
};

struct NPassPoint {
    int n_passes = 0;
    double recovery = 0.0;
    double sigma = 0.0;
};

struct RabiPoint {
    double pulse_length_s = 0.0;
    double population = 0.0;
    double sigma = 0.0;
};

/// eta(T) = exp(-tau_adi/T - T/tau_deph). tau_deph may be +infinity
/// (no dephasing). Throws for T <= 0 or non-positive timescales.
double eta_model(double pulse_duration_s, double tau_adi_s, double tau_deph_s);

struct OptimalPulse {
    double t_prime_s = 0.0;  // sqrt(tau_adi * tau_deph)
    double eta_peak = 0.0;   // exp(-2 sqrt(tau_adi / tau_deph))
};

OptimalPulse optimal_pulse(double tau_adi_s, double tau_deph_s);

/// Adiabaticity timescale pi^2 gamma / omega^2 (angular inputs).
double tau_adi_formula(double gamma_rad_s, double omega_rad_s);

/// Weighted fit of recovery(T) = amplitude * eta(T)^n_passes. Needs >= 4
/// points bracketing the maximum.
EfficiencyModelFit fit_eta_curve(const std::vector<RecoveryPoint>& points, int n_passes);

/// Weighted linear regression of ln(recovery) on N.
LogLinearFit fit_loglinear(const std::vector<NPassPoint>& points);

/// (1 - eta_off) / (1 - eta_on): transfer-error reduction factor.
double error_ratio(double eta_off, double eta_on);

/// Decaying-oscillation fit; needs >= 8 points spanning >= 1 period.
RabiFlopFit fit_rabi_flop(const std::vector<RabiPoint>& points);

}  // namespace stirap
