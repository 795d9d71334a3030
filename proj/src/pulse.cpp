#include "stirap/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stirap {

namespace {

void check_pulse_args(double t_s, double duration_s, double omega_p_max,
                      double omega_s_max) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("pulse duration must be > 0");
    if (!(omega_p_max > 0.0) || !(omega_s_max > 0.0)) {
        throw std::invalid_argument("peak Rabi frequencies must be > 0");
    }
    if (t_s < 0.0 || t_s > duration_s) {
        throw std::invalid_argument("t outside pulse interval [0, T]");
    }
}

}  // namespace

void pulse_envelopes(double t_s, double duration_s, double omega_p_max,
                     double omega_s_max, double& omega_p, double& omega_s) {
    check_pulse_args(t_s, duration_s, omega_p_max, omega_s_max);
    const double x = 0.5 * std::numbers::pi * t_s / duration_s;
    const double c = std::cos(x);
    const double s = std::sin(x);
    omega_p = omega_p_max * s * s;
    omega_s = omega_s_max * c * c;
}

double mixing_angle(double omega_p, double omega_s) {
    if (omega_p == 0.0 && omega_s == 0.0) {
        throw std::invalid_argument("mixing angle undefined");
    }
    return std::atan2(omega_p, omega_s);
}

double mixing_angle_rate(double t_s, double duration_s, double omega_p_max,
                         double omega_s_max, PassDirection direction) {
    check_pulse_args(t_s, duration_s, omega_p_max, omega_s_max);
    // Quotient rule on theta = atan(omega_p/omega_s) collapses to
    //   a b (pi/2T) sin(2x) / (a^2 sin^4 x + b^2 cos^4 x)
    // for the forward envelopes; the reverse pass flips the sign and swaps
    // sin <-> cos in the denominator.
    const double x = 0.5 * std::numbers::pi * t_s / duration_s;
    const double s2 = std::sin(x) * std::sin(x);
    const double c2 = 1.0 - s2;
    const double sin_2x = std::sin(2.0 * x);
    const double prefactor =
        omega_p_max * omega_s_max * 0.5 * std::numbers::pi / duration_s;
    if (direction == PassDirection::forward) {
        const double denom = omega_p_max * omega_p_max * s2 * s2 +
                             omega_s_max * omega_s_max * c2 * c2;
        return prefactor * sin_2x / denom;
    }
    const double denom = omega_p_max * omega_p_max * c2 * c2 +
                         omega_s_max * omega_s_max * s2 * s2;
    return -prefactor * sin_2x / denom;
}

PulseSample sample_pulse(double t_s, double duration_s, double omega_p_max,
                         double omega_s_max, PassDirection direction) {
    PulseSample sample;
    sample.t_s = t_s;
    if (direction == PassDirection::forward) {
        pulse_envelopes(t_s, duration_s, omega_p_max, omega_s_max, sample.omega_p,
                        sample.omega_s);
    } else {
        // Time-reversed envelopes: pump ramps down, Stokes ramps up.
        double omega_p_fwd = 0.0;
        double omega_s_fwd = 0.0;
        pulse_envelopes(duration_s - t_s, duration_s, omega_p_max, omega_s_max,
                        omega_p_fwd, omega_s_fwd);
        sample.omega_p = omega_p_fwd;
        sample.omega_s = omega_s_fwd;
    }
    sample.theta = mixing_angle(sample.omega_p, sample.omega_s);
    sample.theta_dot =
        mixing_angle_rate(t_s, duration_s, omega_p_max, omega_s_max, direction);
    sample.omega_rms =
        std::sqrt(sample.omega_p * sample.omega_p + sample.omega_s * sample.omega_s);
    return sample;
}

}  // namespace stirap
