#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wiggle/trial.hpp"

namespace wiggle {

enum class Axis { TransX, TransZ, RotX, RotY, RotZ };

inline constexpr std::array<Axis, 5> kAllAxes{Axis::TransX, Axis::TransZ, Axis::RotX,
                                              Axis::RotY, Axis::RotZ};

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::TransX: return "X";
        case Axis::TransZ: return "Z";
        case Axis::RotX: return "RX";
        case Axis::RotY: return "RY";
        case Axis::RotZ: return "RZ";
    }
    return "?";
}

inline bool axis_is_translation(Axis a) { return a == Axis::TransX || a == Axis::TransZ; }

/// Pose offset for a single-axis perturbation in bench units (mm or deg).
inline Pose6 axis_offset(Axis a, double value) {
    Pose6 p;
    switch (a) {
        case Axis::TransX: p.x = mm_to_m(value); break;
        case Axis::TransZ: p.z = mm_to_m(value); break;
        case Axis::RotX: p.alpha = deg_to_rad(value); break;
        case Axis::RotY: p.beta = deg_to_rad(value); break;
        case Axis::RotZ: p.gamma = deg_to_rad(value); break;
    }
    return p;
}

inline std::vector<double> default_offsets(Axis a) {
    if (axis_is_translation(a)) return {-2.5, -1.9, 1.9, 2.5};
    return {-10.0, -5.0, 5.0, 10.0};
}

/// splitmix64; used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t s, std::uint64_t v) {
    std::uint64_t z = s + 0x9e3779b97f4a7c15ull + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Shared per-campaign knobs applied to every trial.
struct CampaignOptions {
    double time_limit_s = 1800.0;
    double feedback_rate_hz = 13.0;
    StrainSource strain_source = StrainSource::DirectPlant;
    EscConfig esc = EscConfig::defaults();
    ObjectiveParams objective{};
    GelRenderConfig render{};
    double pose_noise_sigma_m = 0.0;
    double pose_noise_sigma_rad = 0.0;
    double wedge_patience_s = 60.0;
    int jobs = 1;
    bool record_traces = false;
};

/// One aggregated report cell, rounded the way the tables report it
/// (whole percent, whole seconds; no time when nothing succeeded).
struct CellStat {
    std::string lock;
    std::string axis;
    std::string bin;
    int trials = 0;
    int successes = 0;
    int rate_percent = 0;
    std::optional<long> mean_time_s;

    friend bool operator==(const CellStat&, const CellStat&) = default;
};

struct TrialOutcome {
    std::string lock;
    Pose6 offset;
    std::uint64_t seed = 0;
    bool success = false;
    double insertion_time_s = 0.0;
    FailureClass failure = FailureClass::None;
};

struct CampaignReport {
    std::string kind;
    std::uint64_t seed = 0;
    std::vector<CellStat> cells;
    std::vector<TrialOutcome> outcomes;
    int total_trials = 0;
    int total_successes = 0;
    // Order: timeout, wedged, strain-limit, tracking-lost.
    std::array<int, 4> failure_counts{};
    std::vector<TrialRecord> records;  // retained only when traces are requested
};

namespace campaign_detail {

inline void run_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> workers;
    workers.reserve(std::size_t(jobs));
    for (int j = 0; j < jobs; ++j) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

inline TrialSpec make_spec(const LockModel& lock, const Pose6& offset, std::uint64_t seed,
                           const CampaignOptions& opts) {
    TrialSpec spec;
    spec.lock = lock;
    spec.initial_offset = offset;
    spec.time_limit_s = opts.time_limit_s;
    spec.feedback_rate_hz = opts.feedback_rate_hz;
    spec.strain_source = opts.strain_source;
    spec.rng_seed = seed;
    spec.esc = opts.esc;
    spec.objective = opts.objective;
    spec.render = opts.render;
    spec.pose_noise_sigma_m = opts.pose_noise_sigma_m;
    spec.pose_noise_sigma_rad = opts.pose_noise_sigma_rad;
    spec.wedge_patience_s = opts.wedge_patience_s;
    spec.record_trace = opts.record_traces;
    return spec;
}

inline void tally(CampaignReport& rep, const TrialRecord& rec, const std::string& lock_name) {
    TrialOutcome o;
    o.lock = lock_name;
    o.offset = rec.spec.initial_offset;
    o.seed = rec.spec.rng_seed;
    o.success = rec.success;
    o.insertion_time_s = rec.insertion_time_s;
    o.failure = rec.failure;
    rep.outcomes.push_back(o);
    rep.total_trials += 1;
    if (rec.success) {
        rep.total_successes += 1;
    } else {
        switch (rec.failure) {
            case FailureClass::Timeout: rep.failure_counts[0] += 1; break;
            case FailureClass::Wedged: rep.failure_counts[1] += 1; break;
            case FailureClass::StrainLimit: rep.failure_counts[2] += 1; break;
            case FailureClass::TrackingLost: rep.failure_counts[3] += 1; break;
            case FailureClass::None: break;
        }
    }
}

inline CellStat finalize_cell(std::string lock, std::string axis, std::string bin, int trials,
                              int successes, double total_time) {
    CellStat c;
    c.lock = std::move(lock);
    c.axis = std::move(axis);
    c.bin = std::move(bin);
    c.trials = trials;
    c.successes = successes;
    c.rate_percent = trials > 0 ? int(std::lround(100.0 * successes / trials)) : 0;
    if (successes > 0) c.mean_time_s = std::lround(total_time / successes);
    return c;
}

inline std::string format_offset(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace campaign_detail

/// Single-axis perturbation sweep over one lock: trials_per_cell trials at
/// each offset (mm for translation axes, deg for rotation axes).
inline CampaignReport run_single_axis_sweep(const LockModel& lock, Axis axis,
                                            const std::vector<double>& offsets,
                                            int trials_per_cell, std::uint64_t seed,
                                            const CampaignOptions& opts = {}) {
    if (trials_per_cell < 0) throw std::invalid_argument("sweep: trials_per_cell must be >= 0");
    CampaignReport rep;
    rep.kind = "sweep";
    rep.seed = seed;
    if (trials_per_cell == 0) return rep;

    std::vector<TrialSpec> specs;
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
        for (int k = 0; k < trials_per_cell; ++k) {
            const std::uint64_t s =
                mix_seed(mix_seed(mix_seed(seed, std::uint64_t(axis)), oi), std::uint64_t(k));
            specs.push_back(
                campaign_detail::make_spec(lock, axis_offset(axis, offsets[oi]), s, opts));
        }
    }

    std::vector<TrialRecord> records(specs.size());
    campaign_detail::run_indexed(specs.size(), opts.jobs,
                                 [&](std::size_t i) { records[i] = run_trial(specs[i]); });

    const std::string lock_name = archetype_name(lock.archetype);
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
        int succ = 0;
        double total_time = 0.0;
        for (int k = 0; k < trials_per_cell; ++k) {
            const TrialRecord& rec = records[oi * trials_per_cell + k];
            campaign_detail::tally(rep, rec, lock_name);
            if (rec.success) {
                succ += 1;
                total_time += rec.insertion_time_s;
            }
        }
        rep.cells.push_back(campaign_detail::finalize_cell(
            lock_name, axis_name(axis), campaign_detail::format_offset(offsets[oi]),
            trials_per_cell, succ, total_time));
    }
    if (opts.record_traces) rep.records = std::move(records);
    return rep;
}

/// All five axes with the default offset grid, for a set of locks.
inline CampaignReport run_full_sweep(const std::vector<LockModel>& locks, int trials_per_cell,
                                     std::uint64_t seed, const CampaignOptions& opts = {}) {
    CampaignReport rep;
    rep.kind = "sweep";
    rep.seed = seed;
    for (std::size_t li = 0; li < locks.size(); ++li) {
        for (Axis axis : kAllAxes) {
            CampaignReport part = run_single_axis_sweep(
                locks[li], axis, default_offsets(axis), trials_per_cell,
                mix_seed(seed, li * 16 + std::uint64_t(axis)), opts);
            for (auto& c : part.cells) rep.cells.push_back(std::move(c));
            for (auto& o : part.outcomes) rep.outcomes.push_back(std::move(o));
            for (auto& r : part.records) rep.records.push_back(std::move(r));
            rep.total_trials += part.total_trials;
            rep.total_successes += part.total_successes;
            for (int i = 0; i < 4; ++i) rep.failure_counts[i] += part.failure_counts[i];
        }
    }
    return rep;
}

struct RandomPoseRanges {
    double translation_mm = 2.5;  // X, Z ~ U(-range, range)
    double rotation_deg = 10.0;   // RX, RY, RZ ~ U(-range, range)
};

namespace campaign_detail {

inline double uniform_pm(std::mt19937_64& rng, double range) {
    return -range + 2.0 * range * (double(rng() >> 11) * (1.0 / 9007199254740992.0));
}

inline int marginal_bin(double v, bool translation) {
    const double a = translation ? 1.9 : 5.0;
    if (v < -a) return 0;
    if (v < 0.0) return 1;
    if (v < a) return 2;
    return 3;
}

inline std::string marginal_bin_label(int bin, bool translation) {
    static const char* t[4] = {"(-2.5,-1.9)", "(-1.9,0)", "(0,1.9)", "(1.9,2.5)"};
    static const char* r[4] = {"(-10,-5)", "(-5,0)", "(0,5)", "(5,10)"};
    return translation ? t[bin] : r[bin];
}

}  // namespace campaign_detail

/// Random-initial-pose campaign: n_trials per lock, offsets drawn uniformly
/// over the pose-uncertainty box, marginals binned per axis like the
/// reported tables.
inline CampaignReport run_random_campaign(const std::vector<LockModel>& locks, int n_trials,
                                          std::uint64_t seed, const CampaignOptions& opts = {},
                                          const RandomPoseRanges& ranges = {}) {
    if (n_trials < 0) throw std::invalid_argument("random campaign: n_trials must be >= 0");
    CampaignReport rep;
    rep.kind = "random";
    rep.seed = seed;

    struct Draw {
        std::size_t lock_index;
        std::array<double, 5> values;  // x mm, z mm, rx deg, ry deg, rz deg
        std::uint64_t trial_seed;
    };
    std::vector<Draw> draws;
    std::vector<TrialSpec> specs;
    for (std::size_t li = 0; li < locks.size(); ++li) {
        std::mt19937_64 rng(mix_seed(seed, li));
        for (int t = 0; t < n_trials; ++t) {
            Draw d;
            d.lock_index = li;
            d.values[0] = campaign_detail::uniform_pm(rng, ranges.translation_mm);
            d.values[1] = campaign_detail::uniform_pm(rng, ranges.translation_mm);
            d.values[2] = campaign_detail::uniform_pm(rng, ranges.rotation_deg);
            d.values[3] = campaign_detail::uniform_pm(rng, ranges.rotation_deg);
            d.values[4] = campaign_detail::uniform_pm(rng, ranges.rotation_deg);
            d.trial_seed = mix_seed(mix_seed(seed, li), 1000 + std::uint64_t(t));
            Pose6 offset{mm_to_m(d.values[0]), 0.0,
                         mm_to_m(d.values[1]), deg_to_rad(d.values[2]),
                         deg_to_rad(d.values[3]), deg_to_rad(d.values[4])};
            specs.push_back(campaign_detail::make_spec(locks[li], offset, d.trial_seed, opts));
            draws.push_back(d);
        }
    }

    std::vector<TrialRecord> records(specs.size());
    campaign_detail::run_indexed(specs.size(), opts.jobs,
                                 [&](std::size_t i) { records[i] = run_trial(specs[i]); });

    for (std::size_t li = 0; li < locks.size(); ++li) {
        const std::string lock_name = archetype_name(locks[li].archetype);
        // cell accumulators: [axis][bin]
        int n[5][4] = {};
        int succ[5][4] = {};
        double times[5][4] = {};
        for (std::size_t i = 0; i < draws.size(); ++i) {
            if (draws[i].lock_index != li) continue;
            const TrialRecord& rec = records[i];
            campaign_detail::tally(rep, rec, lock_name);
            for (int a = 0; a < 5; ++a) {
                const bool trans = a < 2;
                const int b = campaign_detail::marginal_bin(draws[i].values[a], trans);
                n[a][b] += 1;
                if (rec.success) {
                    succ[a][b] += 1;
                    times[a][b] += rec.insertion_time_s;
                }
            }
        }
        for (int a = 0; a < 5; ++a) {
            const bool trans = a < 2;
            for (int b = 0; b < 4; ++b) {
                rep.cells.push_back(campaign_detail::finalize_cell(
                    lock_name, axis_name(kAllAxes[std::size_t(a)]),
                    campaign_detail::marginal_bin_label(b, trans), n[a][b], succ[a][b],
                    times[a][b]));
            }
        }
    }
    if (opts.record_traces) rep.records = std::move(records);
    return rep;
}

}  // namespace wiggle
