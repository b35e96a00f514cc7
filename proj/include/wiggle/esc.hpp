#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "wiggle/filters.hpp"
#include "wiggle/pose.hpp"
#include "wiggle/units.hpp"

namespace wiggle {

/// Multi-channel extremum-seeking controller configuration. All quantities
/// are stored in internal units (meters, radians, seconds); use
/// EscConfig::defaults() or the config loader for mm/deg/Hz inputs.
struct EscConfig {
    /// Dither amplitude per channel (m for 0-2, rad for 3-5).
    std::array<double, kPoseDims> amplitude{};
    /// Dither frequency per channel in Hz; must be pairwise distinct.
    std::array<double, kPoseDims> freq_hz{};
    /// Integrator gain per channel (parameter-unit per second per objective-unit).
    std::array<double, kPoseDims> gain{};
    double hpf_cutoff_hz = 0.7;
    double lpf_cutoff_hz = 1.59;

    /// Optional per-channel box bounds on the parameter estimate.
    bool clamp_enabled = false;
    std::array<double, kPoseDims> clamp_lo{};
    std::array<double, kPoseDims> clamp_hi{};

    double omega(std::size_t i) const { return hz_to_rad_s(freq_hz[i]); }

    static EscConfig defaults() {
        EscConfig c;
        c.amplitude = {mm_to_m(0.2), mm_to_m(0.2), mm_to_m(0.5),
                       deg_to_rad(0.675), deg_to_rad(0.675), deg_to_rad(0.675)};
        c.freq_hz = {0.9, 0.83, 0.7, 1.05, 1.0, 0.95};
        c.gain = {0.7, 1.1, 0.7, 10.0, 10.0, 10.0};
        c.hpf_cutoff_hz = 0.7;
        c.lpf_cutoff_hz = 1.59;
        return c;
    }

    void validate() const {
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            if (!(amplitude[i] >= 0.0) || !std::isfinite(amplitude[i]))
                throw std::invalid_argument("esc amplitude must be >= 0");
            if (!(freq_hz[i] > 0.0)) throw std::invalid_argument("esc frequency must be > 0");
            if (!(gain[i] >= 0.0) || !std::isfinite(gain[i]))
                throw std::invalid_argument("esc gain must be >= 0");
            for (std::size_t j = i + 1; j < kPoseDims; ++j) {
                if (freq_hz[i] == freq_hz[j])
                    throw std::invalid_argument("esc frequencies must be pairwise distinct");
            }
        }
        if (!(hpf_cutoff_hz > 0.0) || !(lpf_cutoff_hz > 0.0))
            throw std::invalid_argument("esc filter cutoffs must be > 0");
        if (clamp_enabled) {
            for (std::size_t i = 0; i < kPoseDims; ++i) {
                if (!(clamp_lo[i] <= clamp_hi[i]))
                    throw std::invalid_argument("esc clamp bounds inverted");
            }
        }
    }
};

/// Controller state: parameter estimate, clock, and filter memory.
/// Single-owner; step from one control loop at a time.
struct EscState {
    Pose6 theta_hat;
    double t = 0.0;
    FirstOrderFilter hpf;
    std::array<FirstOrderFilter, kPoseDims> lpf;
    EscConfig config;

    // Diagnostics from the most recent step, for trace logging.
    double last_highpass = 0.0;
    std::array<double, kPoseDims> last_feedback{};

    EscState() : EscState(EscConfig::defaults(), Pose6{}) {}

    EscState(const EscConfig& cfg, const Pose6& theta0) : theta_hat(theta0), config(cfg) {
        config.validate();
        if (!theta0.all_finite()) throw std::invalid_argument("theta0 must be finite");
        hpf = FirstOrderFilter(FilterKind::HighPass, config.hpf_cutoff_hz);
        for (std::size_t i = 0; i < kPoseDims; ++i)
            lpf[i] = FirstOrderFilter(FilterKind::LowPass, config.lpf_cutoff_hz);
    }
};

/// Instantaneously applied parameters: theta_hat + amplitude * sin(w t) per channel.
inline Pose6 modulate(const EscState& state) {
    Pose6 theta = state.theta_hat;
    for (std::size_t i = 0; i < kPoseDims; ++i)
        theta[i] += state.config.amplitude[i] * std::sin(state.config.omega(i) * state.t);
    return theta;
}

/// Per-channel demodulation: channel i carries filtered * sin(w_i t).
inline std::array<double, kPoseDims> demodulate(double filtered, double t,
                                                const EscConfig& config) {
    std::array<double, kPoseDims> out{};
    for (std::size_t i = 0; i < kPoseDims; ++i)
        out[i] = filtered * std::sin(config.omega(i) * t);
    return out;
}

/// Advance the controller by one feedback sample. Block order: high-pass,
/// demodulate, low-pass, gain, explicit-Euler integration of theta_hat,
/// then modulation at the advanced clock. Returns the pose to command next.
inline Pose6 esc_step(EscState& state, double loss_sample, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("esc_step requires dt > 0");
    if (!std::isfinite(loss_sample)) throw std::invalid_argument("esc_step loss must be finite");

    state.t += dt;
    const double hp = state.hpf.step(loss_sample, dt);
    const auto demod = demodulate(hp, state.t, state.config);
    for (std::size_t i = 0; i < kPoseDims; ++i) {
        const double fb = state.lpf[i].step(demod[i], dt);
        state.last_feedback[i] = fb;
        state.theta_hat[i] -= state.config.gain[i] * fb * dt;
        if (state.config.clamp_enabled) {
            state.theta_hat[i] = std::clamp(state.theta_hat[i], state.config.clamp_lo[i],
                                            state.config.clamp_hi[i]);
        }
    }
    state.last_highpass = hp;
    if (!state.theta_hat.all_finite())
        throw std::runtime_error("esc_step produced a non-finite estimate");
    return modulate(state);
}

/// Zero all filter memory and the clock; set the estimate to theta0.
inline void reset(EscState& state, const Pose6& theta0) {
    if (!theta0.all_finite()) throw std::invalid_argument("theta0 must be finite");
    state.theta_hat = theta0;
    state.t = 0.0;
    state.hpf.reset();
    for (auto& f : state.lpf) f.reset();
    state.last_highpass = 0.0;
    state.last_feedback = {};
}

}  // namespace wiggle
