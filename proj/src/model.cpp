#include "stirap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "stirap/fit.hpp"

namespace stirap {

double eta_model(double pulse_duration_s, double tau_adi_s, double tau_deph_s) {
    if (!(pulse_duration_s > 0.0)) throw std::invalid_argument("pulse duration must be > 0");
    if (!(tau_adi_s > 0.0)) throw std::invalid_argument("tau_adi must be > 0");
    if (!(tau_deph_s > 0.0)) throw std::invalid_argument("tau_deph must be > 0");
    const double dephasing = std::isinf(tau_deph_s) ? 0.0 : pulse_duration_s / tau_deph_s;
    return std::exp(-tau_adi_s / pulse_duration_s - dephasing);
}

OptimalPulse optimal_pulse(double tau_adi_s, double tau_deph_s) {
    if (!(tau_adi_s > 0.0) || !(tau_deph_s > 0.0) || std::isinf(tau_deph_s)) {
        throw std::invalid_argument("optimal_pulse needs positive finite timescales");
    }
    OptimalPulse result;
    result.t_prime_s = std::sqrt(tau_adi_s * tau_deph_s);
    result.eta_peak = std::exp(-2.0 * std::sqrt(tau_adi_s / tau_deph_s));
    return result;
}

double tau_adi_formula(double gamma_rad_s, double omega_rad_s) {
    if (!(gamma_rad_s > 0.0) || !(omega_rad_s > 0.0)) {
        throw std::invalid_argument("tau_adi_formula needs positive inputs");
    }
    return std::numbers::pi * std::numbers::pi * gamma_rad_s / (omega_rad_s * omega_rad_s);
}

EfficiencyModelFit fit_eta_curve(const std::vector<RecoveryPoint>& points, int n_passes) {
    if (points.size() < 4) throw std::invalid_argument("fit_eta_curve needs >= 4 points");
    if (n_passes < 1) throw std::invalid_argument("n_passes must be >= 1");

    std::vector<RecoveryPoint> data = points;
    std::sort(data.begin(), data.end(), [](const auto& a, const auto& b) {
        return a.pulse_duration_s < b.pulse_duration_s;
    });
    std::set<double> distinct;
    for (const auto& p : data) {
        if (!(p.pulse_duration_s > 0.0)) throw std::invalid_argument("T values must be > 0");
        if (!(p.recovery > 0.0)) throw std::invalid_argument("recoveries must be > 0");
        distinct.insert(p.pulse_duration_s);
    }
    if (distinct.size() < 2) throw std::invalid_argument("degenerate data: all T equal");

    std::size_t peak = 0;
    for (std::size_t i = 1; i < data.size(); ++i) {
        if (data[i].recovery > data[peak].recovery) peak = i;
    }
    if (peak == 0 || peak + 1 == data.size()) {
        throw std::invalid_argument("data must span both sides of the recovery maximum");
    }

    // Seeds: T at the maximum approximates T'; the rise toward the first
    // point fixes the tau_adi scale and tau_deph follows from T'^2/tau_adi.
    const double n = static_cast<double>(n_passes);
    const double t_peak = data[peak].pulse_duration_s;
    const double r_peak = data[peak].recovery;
    const double t_first = data.front().pulse_duration_s;
    const double r_first = data.front().recovery;
    double tau_adi_seed = t_peak / 30.0;
    const double inv_gap = 1.0 / t_first - 1.0 / t_peak;
    if (r_first < r_peak && inv_gap > 0.0) {
        tau_adi_seed = std::log(r_peak / r_first) / (n * inv_gap);
    }
    tau_adi_seed = std::clamp(tau_adi_seed, t_peak * 1e-4, t_peak);
    const double tau_deph_seed = t_peak * t_peak / tau_adi_seed;
    double amplitude_seed =
        std::min(2.0, r_peak * std::exp(2.0 * n * tau_adi_seed / t_peak));

    bool any_weight = false;
    for (const auto& p : data) any_weight = any_weight || p.sigma > 0.0;

    // Residuals evaluated in log-parameter space; the exponent clamp keeps
    // wild LM trial steps finite (they are rejected on cost anyway).
    auto bounded_exp = [](double u) { return std::exp(std::clamp(u, -300.0, 300.0)); };
    auto residual_fn = [&](const Eigen::VectorXd& u, Eigen::VectorXd& r) {
        const double tau_adi = bounded_exp(u[0]);
        const double tau_deph = bounded_exp(u[1]);
        const double amplitude = bounded_exp(u[2]);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double t = data[i].pulse_duration_s;
            const double model =
                amplitude * std::exp(-n * (tau_adi / t + t / tau_deph));
            const double weight = (any_weight && data[i].sigma > 0.0) ? data[i].sigma : 1.0;
            r[static_cast<Eigen::Index>(i)] = (model - data[i].recovery) / weight;
        }
    };

    Eigen::VectorXd initial(3);
    initial << std::log(tau_adi_seed), std::log(tau_deph_seed), std::log(amplitude_seed);
    const LevMarResult lm =
        levmar_fit(residual_fn, initial, static_cast<int>(data.size()));

    EfficiencyModelFit fit;
    fit.tau_adi_s = std::exp(lm.params[0]);
    fit.tau_deph_s = std::exp(lm.params[1]);
    fit.amplitude = std::exp(lm.params[2]);
    fit.n_passes_used = n_passes;
    // Log-space covariance back to (tau_adi, tau_deph, amplitude).
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    jac(0, 0) = fit.tau_adi_s;
    jac(1, 1) = fit.tau_deph_s;
    jac(2, 2) = fit.amplitude;
    fit.covariance = jac * lm.covariance * jac;
    return fit;
}

LogLinearFit fit_loglinear(const std::vector<NPassPoint>& points) {
    std::set<int> distinct;
    for (const auto& p : points) distinct.insert(p.n_passes);
    if (distinct.size() < 3) throw std::invalid_argument("fit_loglinear needs >= 3 distinct N");

    bool any_weight = false;
    for (const auto& p : points) any_weight = any_weight || p.sigma > 0.0;

    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (const auto& p : points) {
        if (!(p.recovery > 0.0)) throw std::invalid_argument("recoveries must be > 0");
        const double x = static_cast<double>(p.n_passes);
        const double y = std::log(p.recovery);
        // sigma on recovery maps to sigma/recovery on ln(recovery)
        const double sigma_ln = (any_weight && p.sigma > 0.0) ? p.sigma / p.recovery : 1.0;
        const double w = 1.0 / (sigma_ln * sigma_ln);
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
    }
    const double det = sw * swxx - swx * swx;
    if (!(std::abs(det) > 0.0)) throw std::invalid_argument("degenerate N values");

    const double slope = (sw * swxy - swx * swy) / det;
    const double intercept = (swxx * swy - swx * swxy) / det;

    LogLinearFit fit;
    fit.eta = std::exp(slope);
    fit.p0 = std::exp(intercept);
    fit.covariance(0, 0) = sw / det;     // var(slope)
    fit.covariance(1, 1) = swxx / det;   // var(intercept)
    fit.covariance(0, 1) = fit.covariance(1, 0) = -swx / det;
    fit.eta_sigma = fit.eta * std::sqrt(fit.covariance(0, 0));
    fit.p0_sigma = fit.p0 * std::sqrt(fit.covariance(1, 1));
    return fit;
}

double error_ratio(double eta_off, double eta_on) {
    if (!(eta_on < 1.0)) throw std::invalid_argument("eta_on must be < 1");
    return (1.0 - eta_off) / (1.0 - eta_on);
}

RabiFlopFit fit_rabi_flop(const std::vector<RabiPoint>& points) {
    if (points.size() < 8) throw std::invalid_argument("fit_rabi_flop needs >= 8 points");
    std::vector<RabiPoint> data = points;
    std::sort(data.begin(), data.end(), [](const auto& a, const auto& b) {
        return a.pulse_length_s < b.pulse_length_s;
    });
    const double span = data.back().pulse_length_s - data.front().pulse_length_s;
    if (!(span > 0.0)) throw std::invalid_argument("degenerate pulse lengths");

    double mean = 0.0, lo = data.front().population, hi = lo;
    for (const auto& p : data) {
        mean += p.population;
        lo = std::min(lo, p.population);
        hi = std::max(hi, p.population);
    }
    mean /= static_cast<double>(data.size());

    RabiFlopFit fit;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(mean))) {
        // Flat data: no oscillation to fit; report the degenerate solution.
        fit.offset = mean;
        fit.amplitude = 0.0;
        fit.decay_time_s = span;
        fit.omega_rad_s = std::numbers::pi / span;
        fit.omega_identifiable = false;
        return fit;
    }

    // Frequency seed from mean crossings; one period gives two crossings.
    int crossings = 0;
    for (std::size_t i = 1; i < data.size(); ++i) {
        const double a = data[i - 1].population - mean;
        const double b = data[i].population - mean;
        if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) ++crossings;
    }
    if (crossings < 2) {
        throw std::invalid_argument("data must cover at least one oscillation period");
    }
    const double omega_seed = std::numbers::pi * crossings / span;
    const double amplitude_seed = data.front().population - mean;

    bool any_weight = false;
    for (const auto& p : data) any_weight = any_weight || p.sigma > 0.0;

    auto bounded_exp = [](double u) { return std::exp(std::clamp(u, -300.0, 300.0)); };
    auto residual_fn = [&](const Eigen::VectorXd& u, Eigen::VectorXd& r) {
        const double omega = bounded_exp(u[0]);
        const double decay = bounded_exp(u[1]);
        const double amplitude = u[2];
        const double offset = u[3];
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double t = data[i].pulse_length_s;
            const double model =
                offset + amplitude * std::exp(-t / decay) * std::cos(omega * t);
            const double weight = (any_weight && data[i].sigma > 0.0) ? data[i].sigma : 1.0;
            r[static_cast<Eigen::Index>(i)] = (model - data[i].population) / weight;
        }
    };

    Eigen::VectorXd initial(4);
    initial << std::log(omega_seed), std::log(span),
        (amplitude_seed == 0.0 ? 0.5 * (hi - lo) : amplitude_seed), mean;
    const LevMarResult lm =
        levmar_fit(residual_fn, initial, static_cast<int>(data.size()));

    fit.omega_rad_s = std::exp(lm.params[0]);
    fit.decay_time_s = std::exp(lm.params[1]);
    fit.amplitude = lm.params[2];
    fit.offset = lm.params[3];
    Eigen::Matrix4d jac = Eigen::Matrix4d::Identity();
    jac(0, 0) = fit.omega_rad_s;
    jac(1, 1) = fit.decay_time_s;
    fit.covariance = jac * lm.covariance * jac;
    fit.omega_identifiable =
        std::abs(fit.amplitude) > 1e-9 * std::max(1.0, std::abs(fit.offset));
    return fit;
}

}  // namespace stirap
