#pragma once

namespace stirap {

/// Pass direction. A forward pass ramps the pump up and the Stokes down
/// (mixing angle 0 -> pi/2, transferring F -> G); a reverse pass uses the
/// time-reversed envelopes (pi/2 -> 0, G -> F).
enum class PassDirection { forward, reverse };

/// Pulse state at time t: envelopes, mixing angle and its analytic rate.
struct PulseSample {
    double t_s = 0.0;
    double omega_p = 0.0;      // rad/s
    double omega_s = 0.0;      // rad/s
    double theta = 0.0;        // rad, in [0, pi/2]
    double theta_dot = 0.0;    // rad/s
    double omega_rms = 0.0;    // sqrt(omega_p^2 + omega_s^2)
};

/// cos^2 STIRAP envelopes for a forward pass:
///   omega_p(t) = omega_p_max sin^2(pi t / 2T),
///   omega_s(t) = omega_s_max cos^2(pi t / 2T).
/// t must lie in [0, T].
void pulse_envelopes(double t_s, double duration_s, double omega_p_max,
                     double omega_s_max, double& omega_p, double& omega_s);

/// Mixing angle theta = atan2(omega_p, omega_s), restricted to [0, pi/2].
/// Undefined (throws) when both Rabi frequencies vanish.
double mixing_angle(double omega_p, double omega_s);

/// Closed-form d(theta)/dt for the cos^2 envelopes,
/// (d omega_p/dt * omega_s - omega_p * d omega_s/dt) / (omega_p^2 + omega_s^2),
/// with the envelope derivatives taken analytically.
double mixing_angle_rate(double t_s, double duration_s, double omega_p_max,
                         double omega_s_max,
                         PassDirection direction = PassDirection::forward);

/// Full pulse sample at t for the given direction.
PulseSample sample_pulse(double t_s, double duration_s, double omega_p_max,
                         double omega_s_max,
                         PassDirection direction = PassDirection::forward);

}  // namespace stirap
