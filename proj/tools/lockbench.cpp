// lockbench: desk-scale insertion benchmark driver.
//
// Subcommands:
//   sweep          single-axis perturbation sweeps over the lock presets
//   random         random-initial-pose campaigns
//   trial          one trial with a full per-tick trace
//   replay-frames  strain series from a directory of numbered PGM frames

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wiggle/campaign.hpp"
#include "wiggle/config.hpp"
#include "wiggle/report.hpp"
#include "wiggle/tracker.hpp"
#include "wiggle/trial.hpp"

namespace fs = std::filesystem;
using namespace wiggle;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string strain_source;
    double feedback_rate_hz = -1.0;
    double time_limit_s = -1.0;
    int jobs = 0;
    bool traces = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON config file");
    cmd->add_option("-o,--out", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--strain-source", a.strain_source,
                    "direct-plant | rendered-frames");
    cmd->add_option("--feedback-rate", a.feedback_rate_hz, "feedback rate in Hz (10-16)");
    cmd->add_option("--time-limit", a.time_limit_s, "simulated time limit per trial (s)");
    cmd->add_option("-j,--jobs", a.jobs, "parallel trial workers");
    cmd->add_flag("--traces", a.traces, "write per-trial trace CSVs");
}

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig cfg;
    if (!a.config_path.empty()) cfg = load_config(a.config_path);
    if (!a.strain_source.empty())
        cfg.options.strain_source = strain_source_from_name(a.strain_source);
    if (a.feedback_rate_hz > 0.0) cfg.options.feedback_rate_hz = a.feedback_rate_hz;
    if (a.time_limit_s > 0.0) cfg.options.time_limit_s = a.time_limit_s;
    if (a.jobs > 0) cfg.options.jobs = a.jobs;
    if (cfg.options.jobs <= 0)
        cfg.options.jobs = std::max(1u, std::thread::hardware_concurrency());
    cfg.options.record_traces = a.traces;
    return cfg;
}

std::vector<LockModel> resolve_locks(const std::string& name, const LockOverrides& ov) {
    std::vector<LockModel> locks;
    if (name == "all") {
        for (Archetype a : {Archetype::PinTumbler, Archetype::Dimpled, Archetype::Tubular,
                            Archetype::DiscDetainer}) {
            locks.push_back(preset(a));
        }
    } else {
        locks.push_back(preset(archetype_from_name(name)));
    }
    for (auto& l : locks) ov.apply(l);
    return locks;
}

Axis axis_from_name(const std::string& s) {
    for (Axis a : kAllAxes) {
        if (s == axis_name(a)) return a;
    }
    throw std::invalid_argument("unknown axis '" + s + "' (use X, Z, RX, RY, RZ)");
}

void write_campaign_outputs(const CampaignReport& rep, const fs::path& dir,
                            const std::string& stem, bool traces) {
    fs::create_directories(dir);
    write_text_file(dir / (stem + ".csv"), campaign_to_csv(rep));
    write_text_file(dir / (stem + "_summary.json"), campaign_summary_json(rep).dump(2) + "\n");
    if (traces) {
        const fs::path tdir = dir / "traces";
        fs::create_directories(tdir);
        for (std::size_t i = 0; i < rep.records.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "trial_%05zu.csv", i);
            write_text_file(tdir / name, trace_to_csv(rep.records[i]));
        }
    }
    std::cout << stem << ": " << rep.total_successes << "/" << rep.total_trials
              << " trials succeeded; outputs in " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wiggling-based tactile insertion benchmark (simulated plant)"};
    app.require_subcommand(1);

    // --- sweep ---
    auto* sweep = app.add_subcommand("sweep", "single-axis perturbation sweep");
    CommonArgs sweep_args;
    std::string sweep_lock = "all";
    std::string sweep_axis;
    std::vector<double> sweep_offsets;
    int trials_per_cell = 3;
    std::uint64_t sweep_seed = 1;
    sweep->add_option("--lock", sweep_lock,
                      "pin-tumbler | dimpled | tubular | disc-detainer | all")
        ->capture_default_str();
    sweep->add_option("--axis", sweep_axis, "restrict to one axis (X, Z, RX, RY, RZ)");
    sweep->add_option("--offsets", sweep_offsets,
                      "offset grid override (mm for X/Z, deg for rotations)");
    sweep->add_option("--trials-per-cell", trials_per_cell, "trials per offset")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_seed, "campaign seed")->capture_default_str();
    add_common(sweep, sweep_args);

    // --- random ---
    auto* random = app.add_subcommand("random", "random-initial-pose campaign");
    CommonArgs random_args;
    std::string random_lock = "all";
    int random_n = 30;
    std::uint64_t random_seed = 1;
    random->add_option("--lock", random_lock,
                       "pin-tumbler | dimpled | tubular | disc-detainer | all")
        ->capture_default_str();
    random->add_option("-n,--trials", random_n, "trials per lock")->capture_default_str();
    random->add_option("--seed", random_seed, "campaign seed")->capture_default_str();
    add_common(random, random_args);

    // --- trial ---
    auto* trial = app.add_subcommand("trial", "run one trial and write its trace");
    CommonArgs trial_args;
    std::string trial_lock = "pin-tumbler";
    double dx_mm = 0, dz_mm = 0, rx_deg = 0, ry_deg = 0, rz_deg = 0;
    std::uint64_t trial_seed = 1;
    trial->add_option("--lock", trial_lock, "lock archetype")->capture_default_str();
    trial->add_option("--dx-mm", dx_mm, "initial X offset (mm)");
    trial->add_option("--dz-mm", dz_mm, "initial Z offset (mm)");
    trial->add_option("--rx-deg", rx_deg, "initial rotation about X (deg)");
    trial->add_option("--ry-deg", ry_deg, "initial rotation about Y (deg)");
    trial->add_option("--rz-deg", rz_deg, "initial rotation about Z (deg)");
    trial->add_option("--seed", trial_seed, "trial seed")->capture_default_str();
    add_common(trial, trial_args);

    // --- replay-frames ---
    auto* replay_cmd = app.add_subcommand("replay-frames", "strain series from PGM frames");
    std::string frames_dir;
    std::string replay_out = "strain.csv";
    replay_cmd->add_option("--frames", frames_dir, "directory of numbered .pgm frames")
        ->required();
    replay_cmd->add_option("-o,--out", replay_out, "output CSV path")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            const RunConfig cfg = resolve_config(sweep_args);
            const auto locks = resolve_locks(sweep_lock, cfg.lock_overrides);
            CampaignReport rep;
            if (!sweep_axis.empty()) {
                const Axis axis = axis_from_name(sweep_axis);
                const auto offsets =
                    sweep_offsets.empty() ? default_offsets(axis) : sweep_offsets;
                rep.kind = "sweep";
                rep.seed = sweep_seed;
                for (std::size_t li = 0; li < locks.size(); ++li) {
                    CampaignReport part = run_single_axis_sweep(
                        locks[li], axis, offsets, trials_per_cell,
                        mix_seed(sweep_seed, li * 16 + std::uint64_t(axis)), cfg.options);
                    for (auto& c : part.cells) rep.cells.push_back(std::move(c));
                    for (auto& o : part.outcomes) rep.outcomes.push_back(std::move(o));
                    for (auto& r : part.records) rep.records.push_back(std::move(r));
                    rep.total_trials += part.total_trials;
                    rep.total_successes += part.total_successes;
                    for (int i = 0; i < 4; ++i) rep.failure_counts[i] += part.failure_counts[i];
                }
            } else {
                rep = run_full_sweep(locks, trials_per_cell, sweep_seed, cfg.options);
            }
            write_campaign_outputs(rep, sweep_args.out_dir, "sweep", sweep_args.traces);
        } else if (random->parsed()) {
            const RunConfig cfg = resolve_config(random_args);
            const auto locks = resolve_locks(random_lock, cfg.lock_overrides);
            const CampaignReport rep =
                run_random_campaign(locks, random_n, random_seed, cfg.options);
            write_campaign_outputs(rep, random_args.out_dir, "random", random_args.traces);
        } else if (trial->parsed()) {
            RunConfig cfg = resolve_config(trial_args);
            const auto locks = resolve_locks(trial_lock, cfg.lock_overrides);
            TrialSpec spec = campaign_detail::make_spec(
                locks[0],
                Pose6{mm_to_m(dx_mm), 0.0, mm_to_m(dz_mm), deg_to_rad(rx_deg),
                      deg_to_rad(ry_deg), deg_to_rad(rz_deg)},
                trial_seed, cfg.options);
            spec.record_trace = true;
            const TrialRecord rec = run_trial(spec);
            fs::create_directories(trial_args.out_dir);
            write_text_file(fs::path(trial_args.out_dir) / "trial_trace.csv", trace_to_csv(rec));
            write_text_file(fs::path(trial_args.out_dir) / "trial_summary.json",
                            trial_summary_json(rec).dump(2) + "\n");
            std::cout << (rec.success ? "success" : "failure") << " ("
                      << failure_class_name(rec.failure) << ")";
            if (rec.success) std::cout << " in " << rec.insertion_time_s << " s";
            std::cout << "; trace in " << trial_args.out_dir << "\n";
        } else if (replay_cmd->parsed()) {
            const auto paths = list_numbered_pgms(frames_dir);
            if (paths.empty())
                throw std::runtime_error("no numbered .pgm frames in " + frames_dir);
            std::vector<Frame> frames;
            frames.reserve(paths.size());
            for (const auto& p : paths) frames.push_back(read_pgm(p));

            TrackerState state = init_tracker(frames[0]);
            std::vector<double> raw, reported;
            for (std::size_t i = 1; i < frames.size(); ++i) {
                try {
                    track(state, frames[i]);
                } catch (const TrackingLostError& e) {
                    throw std::runtime_error(std::string(e.what()) + " at frame " +
                                             std::to_string(i));
                }
                raw.push_back(raw_strain(state));
                reported.push_back(strain(state));
            }
            write_text_file(replay_out, strain_series_to_csv(raw, reported));
            std::cout << (frames.size() - 1) << " frames tracked; series in " << replay_out
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
