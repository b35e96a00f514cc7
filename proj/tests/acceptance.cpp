// Acceptance suite: end-to-end checks of the controller, tracker, objective,
// plant and harness at fixed tolerances. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wiggle/campaign.hpp"
#include "wiggle/esc.hpp"
#include "wiggle/filters.hpp"
#include "wiggle/report.hpp"
#include "wiggle/tracker.hpp"
#include "wiggle/trial.hpp"

using namespace wiggle;

namespace {

constexpr double kDt13 = 1.0 / 13.0;

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * (1.0 / 9007199254740992.0);
}

double uniform_pm(std::mt19937_64& rng, double range) {
    return -range + 2.0 * range * uniform01(rng);
}

// --- shared measurement helpers ---------------------------------------------

// Estimate drift over a 100 s window (integer cycles of every pairwise
// dither beat for the default frequency set) after a 10 s settle.
std::array<double, 6> drift_per_channel(const EscConfig& cfg,
                                        const std::array<double, 6>& gradient) {
    EscState esc(cfg, Pose6{});
    Pose6 start_hat;
    bool captured = false;
    Pose6 cmd = modulate(esc);
    const double settle = 10.0, window = 100.0;
    while (esc.t < settle + window) {
        double loss = 0.0;
        for (std::size_t i = 0; i < kPoseDims; ++i) loss += gradient[i] * cmd[i];
        cmd = esc_step(esc, loss, kDt13);
        if (!captured && esc.t >= settle) {
            start_hat = esc.theta_hat;
            captured = true;
        }
    }
    std::array<double, 6> drift{};
    for (std::size_t i = 0; i < kPoseDims; ++i)
        drift[i] = (esc.theta_hat[i] - start_hat[i]) / window;
    return drift;
}

double measured_gain(FirstOrderFilter f, double f_hz, double fs_hz) {
    const double dt = 1.0 / fs_hz;
    const int n = int(120.0 * fs_hz);
    const int settle = n / 4;
    double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 1) * dt;
        const double x = std::sin(kTwoPi * f_hz * t);
        const double y = f.step(x, dt);
        if (i < settle) continue;
        const double s = std::sin(kTwoPi * f_hz * t);
        const double c = std::cos(kTwoPi * f_hz * t);
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
    }
    const double det = ss * cc - sc * sc;
    return std::hypot((ys * cc - yc * sc) / det, (yc * ss - ys * sc) / det);
}

Frame make_texture(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    Frame noise(kFrameWidth, kFrameHeight);
    for (auto& p : noise.pixels) p = dist(rng);
    Frame out(kFrameWidth, kFrameHeight);
    const int r = 3;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            double acc = 0.0;
            int n = 0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = std::clamp(x + dx, 0, out.width - 1);
                    const int yy = std::clamp(y + dy, 0, out.height - 1);
                    acc += noise.at(xx, yy);
                    ++n;
                }
            }
            out.at(x, y) = float(0.1 + 0.8 * acc / n);
        }
    }
    return out;
}

Frame warp_frame(const Frame& tex, const Eigen::Matrix3d& W) {
    const Eigen::Matrix3d Winv = W.inverse();
    Frame out(tex.width, tex.height);
    for (int y = 0; y < tex.height; ++y) {
        for (int x = 0; x < tex.width; ++x) {
            const Vec2 src = apply_homography(Winv, Vec2{double(x), double(y)});
            out.at(x, y) = sample_bilinear(tex, src.u, src.v);
        }
    }
    return out;
}

// --- criteria ----------------------------------------------------------------

bool criterion_esc_gradient_fidelity(std::string& detail) {
    const double t0 = now_s();
    const EscConfig base = EscConfig::defaults();
    std::mt19937_64 rng(101);
    int sign_ok = 0, prop_ok = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        std::array<double, 6> g{};
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            const double mag = 0.5 + 1.5 * uniform01(rng);
            const double sign = (rng() % 2 == 0) ? 1.0 : -1.0;
            // Loop gain k_i*g_i capped near 0.5: inside the stable region.
            g[i] = sign * mag * 0.25 / base.gain[i];
        }
        const auto d1 = drift_per_channel(base, g);
        bool signs = true;
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            if (!(d1[i] * g[i] < 0.0)) signs = false;
        }
        if (signs) ++sign_ok;

        EscConfig doubled = base;
        for (auto& b : doubled.amplitude) b *= 2.0;
        const auto d2 = drift_per_channel(doubled, g);
        bool prop = true;
        for (std::size_t i = 0; i < kPoseDims; ++i) {
            if (std::abs(d2[i] / (2.0 * d1[i]) - 1.0) > 0.2) prop = false;
        }
        if (prop) ++prop_ok;
    }
    const double elapsed = now_s() - t0;
    std::ostringstream os;
    os << "signs " << sign_ok << "/" << trials << ", proportionality " << prop_ok << "/"
       << trials << ", " << elapsed << " s";
    detail = os.str();
    return sign_ok == trials && prop_ok == trials && elapsed < 10.0;
}

bool criterion_esc_convergence(std::string& detail) {
    const EscConfig cfg = EscConfig::defaults();
    const std::array<double, 6> curvature{150.0, 150.0, 150.0, 0.2, 0.2, 0.2};
    std::mt19937_64 rng(202);
    int ok = 0;
    const int runs = 40;
    for (int run = 0; run < runs; ++run) {
        Pose6 target;
        for (std::size_t i = 0; i < 3; ++i) target[i] = uniform_pm(rng, 0.3e-3);
        for (std::size_t i = 3; i < kPoseDims; ++i) target[i] = uniform_pm(rng, deg_to_rad(1.0));

        const Axis axis = kAllAxes[std::size_t(run) % 5];
        const double sign = (run % 2 == 0) ? 1.0 : -1.0;
        const double value = axis_is_translation(axis) ? 1.9 : 5.0;
        const Pose6 start = target + axis_offset(axis, sign * value);

        EscState esc(cfg, start);
        Pose6 cmd = modulate(esc);
        while (esc.t < 300.0) {
            double loss = 0.0;
            for (std::size_t i = 0; i < kPoseDims; ++i) {
                const double e = cmd[i] - target[i];
                loss += curvature[i] * e * e;
            }
            cmd = esc_step(esc, loss, kDt13);
        }
        double trans = 0.0, rot = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            trans += (esc.theta_hat[i] - target[i]) * (esc.theta_hat[i] - target[i]);
            rot += (esc.theta_hat[i + 3] - target[i + 3]) *
                   (esc.theta_hat[i + 3] - target[i + 3]);
        }
        if (std::sqrt(trans) < 0.5e-3 && std::sqrt(rot) < deg_to_rad(1.0)) ++ok;
    }
    std::ostringstream os;
    os << "converged " << ok << "/" << runs << " within 0.5 mm / 1 deg in 300 s";
    detail = os.str();
    return ok >= int(std::ceil(0.95 * runs));
}

bool criterion_filter_correctness(std::string& detail) {
    const std::vector<double> freqs{0.2, 0.7, 0.9, 1.59, 3.0};
    double worst = 0.0;
    for (double f_hz : freqs) {
        const double hp = measured_gain(FirstOrderFilter(FilterKind::HighPass, 0.7), f_hz, 13.0);
        const double hp_ref = analog_magnitude(FilterKind::HighPass, 0.7, f_hz);
        worst = std::max(worst, std::abs(hp / hp_ref - 1.0));
        const double lp = measured_gain(FirstOrderFilter(FilterKind::LowPass, 1.59), f_hz, 13.0);
        const double lp_ref = analog_magnitude(FilterKind::LowPass, 1.59, f_hz);
        worst = std::max(worst, std::abs(lp / lp_ref - 1.0));
    }

    FirstOrderFilter hpf(FilterKind::HighPass, 0.7);
    FirstOrderFilter lpf(FilterKind::LowPass, 1.59);
    double hy = 0.0, ly = 0.0;
    for (int i = 0; i < 200; ++i) {
        hy = hpf.step(2.5, kDt13);
        ly = lpf.step(2.5, kDt13);
    }
    const bool dc_ok = std::abs(hy) < 1e-6 * 2.5 && std::abs(ly - 2.5) < 1e-6 * 2.5;

    std::ostringstream os;
    os << "worst magnitude deviation " << 100.0 * worst << "%, DC "
       << (dc_ok ? "within 1e-6" : "off");
    detail = os.str();
    return worst < 0.05 && dc_ok;
}

bool criterion_tracker_accuracy(std::string& detail) {
    const Frame tex = make_texture(5);
    const CornerQuad ref = patch_corners(tex.width, tex.height);
    std::mt19937_64 rng(77);
    int ok = 0;
    const int warps = 200;
    for (int t = 0; t < warps; ++t) {
        CornerQuad truth = ref;
        for (auto& c : truth) {
            c.u += uniform_pm(rng, 5.0);
            c.v += uniform_pm(rng, 5.0);
        }
        const Frame moved = warp_frame(tex, dlt_from_corners(ref, truth));
        TrackerState state = init_tracker(tex);
        bool good = true;
        try {
            const Homography warp = track(state, moved);
            for (std::size_t i = 0; i < 4; ++i) {
                if ((warp.corners[i] - truth[i]).norm() >= 0.5) good = false;
            }
        } catch (const TrackingLostError&) {
            good = false;
        }
        if (good) ++ok;
    }

    // Identity frames report exactly zero strain.
    TrackerState ident = init_tracker(tex);
    track(ident, tex);
    const bool ident_ok = strain(ident) == 0.0;

    // Deadband boundary cases, exact.
    TrackerState db = init_tracker(tex);
    db.tracked_once = true;
    db.current_warp.corners = db.current_warp.reference_corners;
    for (auto& c : db.current_warp.corners) {
        c.u += 1.0;
        c.v += 1.0;
    }
    const bool sqrt8_ok = raw_strain(db) == std::sqrt(8.0) && strain(db) == 0.0;
    db.current_warp.corners = db.current_warp.reference_corners;
    db.current_warp.corners[0].u += 3.0;
    const bool edge_ok = raw_strain(db) == 3.0 && strain(db) == 3.0;

    std::ostringstream os;
    os << "recovered " << ok << "/" << warps << " within 0.5 px, identity "
       << (ident_ok ? "0" : "nonzero") << ", deadband "
       << (sqrt8_ok && edge_ok ? "exact" : "off");
    detail = os.str();
    return ok >= int(std::ceil(0.95 * warps)) && ident_ok && sqrt8_ok && edge_ok;
}

struct CampaignOutcome {
    CampaignReport report;
    std::array<int, 4> per_lock_successes{};  // DD, PT, dimpled, tubular
};

CampaignOutcome run_acceptance_campaign() {
    CampaignOutcome out;
    CampaignOptions opts;
    const std::vector<LockModel> locks{preset(Archetype::DiscDetainer),
                                       preset(Archetype::PinTumbler),
                                       preset(Archetype::Dimpled), preset(Archetype::Tubular)};
    out.report = run_random_campaign(locks, 30, 1, opts);
    for (const TrialOutcome& o : out.report.outcomes) {
        if (!o.success) continue;
        if (o.lock == "disc-detainer") out.per_lock_successes[0] += 1;
        else if (o.lock == "pin-tumbler") out.per_lock_successes[1] += 1;
        else if (o.lock == "dimpled") out.per_lock_successes[2] += 1;
        else if (o.lock == "tubular") out.per_lock_successes[3] += 1;
    }
    return out;
}

bool criterion_closed_loop_campaign(std::string& detail) {
    const double t0 = now_s();
    const CampaignOutcome out = run_acceptance_campaign();
    const auto& s = out.per_lock_successes;

    bool aligned_ok = true;
    for (Archetype a : {Archetype::PinTumbler, Archetype::Dimpled, Archetype::Tubular,
                        Archetype::DiscDetainer}) {
        TrialSpec spec;
        spec.lock = preset(a);
        spec.rng_seed = 1;
        spec.record_trace = false;
        if (!run_trial(spec).success) aligned_ok = false;
    }
    const double elapsed = now_s() - t0;

    std::ostringstream os;
    os << "DD " << s[0] << "/30, PT " << s[1] << "/30, dimpled " << s[2] << "/30, tubular "
       << s[3] << "/30, aligned " << (aligned_ok ? "4/4" : "failed") << ", " << elapsed << " s";
    detail = os.str();
    const bool dd_rate = s[0] >= 29;  // >= 95% of 30
    const bool ordering = s[0] >= s[1] && s[1] > s[2] && s[2] > s[3];
    return dd_rate && ordering && aligned_ok && elapsed < 300.0;
}

bool criterion_rendered_equivalence(std::string& detail) {
    const std::vector<Archetype> locks{Archetype::DiscDetainer, Archetype::PinTumbler,
                                       Archetype::Dimpled, Archetype::Tubular};
    std::mt19937_64 rng(606);
    int agree = 0;
    const int pairs_per_lock = 10;
    const int total = pairs_per_lock * int(locks.size());
    for (std::size_t li = 0; li < locks.size(); ++li) {
        for (int t = 0; t < pairs_per_lock; ++t) {
            TrialSpec spec;
            spec.lock = preset(locks[li]);
            spec.initial_offset =
                Pose6{mm_to_m(uniform_pm(rng, 2.5)), 0.0, mm_to_m(uniform_pm(rng, 2.5)),
                      deg_to_rad(uniform_pm(rng, 10.0)), deg_to_rad(uniform_pm(rng, 10.0)),
                      deg_to_rad(uniform_pm(rng, 10.0))};
            spec.time_limit_s = 300.0;
            spec.rng_seed = mix_seed(606, li * 100 + std::uint64_t(t));
            spec.record_trace = false;

            spec.strain_source = StrainSource::DirectPlant;
            const bool direct = run_trial(spec).success;
            spec.strain_source = StrainSource::RenderedFrames;
            const bool rendered = run_trial(spec).success;
            if (direct == rendered) ++agree;
        }
    }
    std::ostringstream os;
    os << "success flags agree on " << agree << "/" << total << " paired trials";
    detail = os.str();
    return agree >= int(std::ceil(0.9 * total));
}

bool criterion_determinism_accounting(std::string& detail) {
    const CampaignOutcome a = run_acceptance_campaign();
    const CampaignOutcome b = run_acceptance_campaign();
    const bool identical = campaign_to_csv(a.report) == campaign_to_csv(b.report) &&
                           campaign_summary_json(a.report).dump() ==
                               campaign_summary_json(b.report).dump();

    int failures = 0;
    for (int c : a.report.failure_counts) failures += c;
    const bool partition = a.report.total_successes + failures == a.report.total_trials &&
                           a.report.total_trials == 120;

    // Per-axis marginal bins partition each lock's 30 trials.
    bool bins_ok = true;
    for (std::size_t lock = 0; lock < 4; ++lock) {
        for (std::size_t axis = 0; axis < 5; ++axis) {
            int sum = 0;
            for (std::size_t bin = 0; bin < 4; ++bin)
                sum += a.report.cells[lock * 20 + axis * 4 + bin].trials;
            if (sum != 30) bins_ok = false;
        }
    }

    // Traced sweep: every successful trace ends inside the success threshold
    // and satisfies the objective identity exactly.
    CampaignOptions opts;
    opts.record_traces = true;
    const CampaignReport traced = run_single_axis_sweep(preset(Archetype::PinTumbler),
                                                        Axis::TransX, {-1.9, 1.9}, 1, 11, opts);
    bool traces_ok = !traced.records.empty();
    int checked = 0;
    for (const TrialRecord& rec : traced.records) {
        if (!rec.success) continue;
        ++checked;
        if (rec.trace.empty() || rec.trace.back().insertion_loss >= 0.5e-3) traces_ok = false;
        for (const TraceRow& row : rec.trace) {
            if (row.total_loss !=
                row.insertion_loss + rec.spec.objective.lambda * row.strain_px) {
                traces_ok = false;
            }
        }
    }
    if (checked == 0) traces_ok = false;

    std::ostringstream os;
    os << (identical ? "re-run bit-identical" : "re-run drifted") << ", counts "
       << (partition && bins_ok ? "partition" : "broken") << ", " << checked
       << " successful traces self-consistent " << (traces_ok ? "exactly" : "NO");
    detail = os.str();
    return identical && partition && bins_ok && traces_ok;
}

bool criterion_trace_structure(std::string& detail) {
    TrialSpec spec;
    spec.lock = preset(Archetype::PinTumbler);
    spec.initial_offset = Pose6{mm_to_m(1.1), 0.0, 0.0, deg_to_rad(3.4), deg_to_rad(-7.4),
                                deg_to_rad(5.7)};
    spec.rng_seed = 5;
    const TrialRecord rec = run_trial(spec);
    if (!rec.success) {
        detail = "reference trial failed to insert";
        return false;
    }

    std::vector<double> window_means;
    double acc = 0.0, t0 = 0.0;
    long n = 0;
    for (const TraceRow& row : rec.trace) {
        acc += row.total_loss;
        ++n;
        if (row.t - t0 >= 10.0) {
            window_means.push_back(acc / double(n));
            acc = 0.0;
            n = 0;
            t0 = row.t;
        }
    }
    int non_increasing = 0;
    for (std::size_t i = 0; i + 1 < window_means.size(); ++i) {
        if (window_means[i + 1] <= window_means[i] + 1e-9) ++non_increasing;
    }
    const int pair_count = int(window_means.size()) - 1;

    std::ostringstream os;
    os << "inserted in " << rec.insertion_time_s << " s, loss windows non-increasing "
       << non_increasing << "/" << pair_count;
    detail = os.str();
    return pair_count > 5 && non_increasing >= int(std::ceil(0.9 * pair_count));
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> criteria{
        {"1 esc-gradient-fidelity", criterion_esc_gradient_fidelity},
        {"2 esc-convergence", criterion_esc_convergence},
        {"3 filter-correctness", criterion_filter_correctness},
        {"4 tracker-accuracy", criterion_tracker_accuracy},
        {"5 closed-loop-campaign", criterion_closed_loop_campaign},
        {"6 rendered-equivalence", criterion_rendered_equivalence},
        {"7 determinism-accounting", criterion_determinism_accounting},
        {"8 trace-structure", criterion_trace_structure},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %s - %s\n", ok ? "PASS" : "FAIL", c.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
