#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wiggle/esc.hpp"
#include "wiggle/gel_render.hpp"
#include "wiggle/lock.hpp"
#include "wiggle/objective.hpp"
#include "wiggle/plant.hpp"
#include "wiggle/tracker.hpp"

namespace wiggle {

enum class StrainSource { DirectPlant, RenderedFrames };

inline const char* strain_source_name(StrainSource s) {
    return s == StrainSource::DirectPlant ? "direct-plant" : "rendered-frames";
}

inline StrainSource strain_source_from_name(const std::string& s) {
    if (s == "direct-plant") return StrainSource::DirectPlant;
    if (s == "rendered-frames") return StrainSource::RenderedFrames;
    throw std::invalid_argument("unknown strain source: " + s);
}

enum class FailureClass { None, Timeout, Wedged, StrainLimit, TrackingLost };

inline const char* failure_class_name(FailureClass f) {
    switch (f) {
        case FailureClass::None: return "none";
        case FailureClass::Timeout: return "timeout";
        case FailureClass::Wedged: return "wedged";
        case FailureClass::StrainLimit: return "strain-limit";
        case FailureClass::TrackingLost: return "tracking-lost";
    }
    return "?";
}

/// Objective weights that do not depend on the trial's latched start pose.
struct ObjectiveParams {
    double lambda = 0.0005;
    double success_epsilon = 0.5e-3;
    double strain_abort_px = 40.0;
};

struct TrialSpec {
    LockModel lock = preset(Archetype::PinTumbler);
    Pose6 initial_offset;  // perturbation from the aligned pose
    double time_limit_s = 1800.0;
    double feedback_rate_hz = 13.0;
    StrainSource strain_source = StrainSource::DirectPlant;
    std::uint64_t rng_seed = 0;

    EscConfig esc = EscConfig::defaults();
    ObjectiveParams objective{};
    GelRenderConfig render{};

    // Optional pose-achievement noise, applied to the commanded pose.
    double pose_noise_sigma_m = 0.0;
    double pose_noise_sigma_rad = 0.0;

    // Simulated seconds of zero progress while wedged before giving up.
    double wedge_patience_s = 60.0;

    bool record_trace = true;

    void validate() const {
        lock.validate();
        esc.validate();
        if (!(time_limit_s > 0.0)) throw std::invalid_argument("trial: time limit must be > 0");
        if (!(feedback_rate_hz >= 10.0 && feedback_rate_hz <= 16.0))
            throw std::invalid_argument("trial: feedback rate must lie in [10, 16] Hz");
        if (!initial_offset.all_finite())
            throw std::invalid_argument("trial: offset must be finite");
        ObjectiveConfig oc{objective.lambda, lock.depth, 0.0, objective.success_epsilon,
                           objective.strain_abort_px};
        oc.validate();
    }
};

struct TraceRow {
    double t = 0.0;
    Pose6 commanded;
    Pose6 theta_hat;
    Pose6 achieved;
    double inserted_depth = 0.0;
    bool wedged = false;
    double insertion_loss = 0.0;
    double strain_px = 0.0;
    double total_loss = 0.0;
    double highpass = 0.0;
    std::array<double, kPoseDims> feedback{};
};

struct TrialRecord {
    TrialSpec spec;
    bool success = false;
    double insertion_time_s = std::numeric_limits<double>::quiet_NaN();
    FailureClass failure = FailureClass::None;
    std::vector<TraceRow> trace;
};

/// Run one closed-loop insertion trial. Deterministic given the spec
/// (including rng_seed). Trial outcomes are data, never exceptions;
/// only malformed specs throw.
inline TrialRecord run_trial(const TrialSpec& spec) {
    spec.validate();

    TrialRecord rec;
    rec.spec = spec;

    const double dt = 1.0 / spec.feedback_rate_hz;
    const Pose6 start_pose = aligned_pose(spec.lock) + spec.initial_offset;

    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> trans_noise(0.0, spec.pose_noise_sigma_m);
    std::normal_distribution<double> rot_noise(0.0, spec.pose_noise_sigma_rad);
    const bool noisy = spec.pose_noise_sigma_m > 0.0 || spec.pose_noise_sigma_rad > 0.0;
    auto perturb = [&](const Pose6& p) {
        if (!noisy) return p;
        Pose6 q = p;
        for (std::size_t i = 0; i < 3; ++i) q[i] += trans_noise(rng);
        for (std::size_t i = 3; i < kPoseDims; ++i) q[i] += rot_noise(rng);
        return q;
    };

    EscState esc(spec.esc, start_pose);
    PlantState plant = make_initial_state(spec.lock, perturb(start_pose));

    // Latch the objective origin from the achieved pose.
    ObjectiveConfig objective{spec.objective.lambda, spec.lock.depth, plant.achieved.y,
                              spec.objective.success_epsilon, spec.objective.strain_abort_px};
    objective.validate();

    std::optional<GelRenderer> renderer;
    std::optional<TrackerState> tracker;
    if (spec.strain_source == StrainSource::RenderedFrames) {
        GelRenderConfig rc = spec.render;
        rc.strain_px_per_unit = spec.lock.strain_px_per_unit;
        renderer.emplace(rc);
        tracker = init_tracker(renderer->render(plant));
    }

    Pose6 cmd = modulate(esc);
    double last_progress_t = 0.0;
    double last_depth = plant.inserted_depth;
    bool first_sample = true;

    while (true) {
        plant = plant_step(spec.lock, plant, perturb(cmd), dt);

        double strain_px = 0.0;
        if (spec.strain_source == StrainSource::DirectPlant) {
            strain_px = apply_deadband(plant.contact_strain_px);
        } else {
            try {
                track(*tracker, renderer->render(plant));
            } catch (const TrackingLostError&) {
                rec.failure = FailureClass::TrackingLost;
                break;
            }
            strain_px = strain(*tracker);
        }

        const double ins = insertion_loss(plant.achieved.y, objective);
        const double loss = total_loss(ins, strain_px, objective);

        // Prime the high-pass memory with the resting loss level so the
        // arbitrary DC value at trial start does not kick the integrators.
        if (first_sample) {
            esc.hpf.prev_input = loss;
            first_sample = false;
        }

        if (spec.record_trace) {
            rec.trace.push_back(TraceRow{esc.t, cmd, esc.theta_hat, plant.achieved,
                                         plant.inserted_depth, plant.wedged, ins, strain_px,
                                         loss, esc.last_highpass, esc.last_feedback});
        }

        if (check_success(ins, objective)) {
            rec.success = true;
            rec.insertion_time_s = esc.t;
            break;
        }
        if (strain_px > objective.strain_abort_px) {
            rec.failure = FailureClass::StrainLimit;
            break;
        }
        if (plant.inserted_depth > last_depth + 1e-9 || !plant.wedged) {
            last_progress_t = esc.t;
            last_depth = std::max(last_depth, plant.inserted_depth);
        }
        if (plant.wedged && esc.t - last_progress_t >= spec.wedge_patience_s) {
            rec.failure = FailureClass::Wedged;
            break;
        }
        if (esc.t >= spec.time_limit_s) {
            rec.failure = FailureClass::Timeout;
            break;
        }

        cmd = esc_step(esc, loss, dt);
    }

    return rec;
}

}  // namespace wiggle
