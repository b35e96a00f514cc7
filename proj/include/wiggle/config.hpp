#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wiggle/campaign.hpp"
#include "wiggle/lock.hpp"

namespace wiggle {

/// Lock-model field overrides, applied on top of any archetype preset.
struct LockOverrides {
    nlohmann::json raw;

    void apply(LockModel& m) const {
        for (const auto& [key, value] : raw.items()) {
            if (key == "depth_mm") m.depth = mm_to_m(value.get<double>());
            else if (key == "clearance_x_mm") m.clearance_x = mm_to_m(value.get<double>());
            else if (key == "clearance_z_mm") m.clearance_z = mm_to_m(value.get<double>());
            else if (key == "chamfer_width_mm") m.chamfer_width = mm_to_m(value.get<double>());
            else if (key == "chamfer_depth_mm") m.chamfer_depth = mm_to_m(value.get<double>());
            else if (key == "plateau_height_mm") m.plateau_height = mm_to_m(value.get<double>());
            else if (key == "plateau_extent_mm") m.plateau_extent = mm_to_m(value.get<double>());
            else if (key == "start_height_mm") m.start_height = mm_to_m(value.get<double>());
            else if (key == "strain_px_per_unit") m.strain_px_per_unit = value.get<double>();
            else if (key == "wedging_enabled") m.wedging_enabled = value.get<bool>();
            else if (key == "wedge_release_strain_px")
                m.wedge_release_strain_px = value.get<double>();
            else if (key == "orientation_tol_deg") {
                const auto v = value.get<std::vector<double>>();
                if (v.size() != 3)
                    throw std::invalid_argument("config: orientation_tol_deg needs 3 entries");
                for (int i = 0; i < 3; ++i) m.orientation_tol[std::size_t(i)] = deg_to_rad(v[std::size_t(i)]);
            } else {
                throw std::invalid_argument("config: unknown lock key '" + key + "'");
            }
        }
        m.validate();
    }
};

/// Bench configuration parsed from a JSON file. Every section and key is
/// optional; values use bench units (mm, deg, Hz) and
/// converted to internal units on load.
struct RunConfig {
    CampaignOptions options;
    LockOverrides lock_overrides;
};

namespace config_detail {

template <std::size_t N>
std::array<double, N> array_of(const nlohmann::json& j, const std::string& key) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != N)
        throw std::invalid_argument("config: '" + key + "' needs " + std::to_string(N) +
                                    " entries");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i];
    return out;
}

inline void parse_esc(const nlohmann::json& j, EscConfig& esc) {
    for (const auto& [key, value] : j.items()) {
        if (key == "amplitude_trans_mm") {
            const auto v = array_of<3>(value, key);
            for (std::size_t i = 0; i < 3; ++i) esc.amplitude[i] = mm_to_m(v[i]);
        } else if (key == "amplitude_rot_deg") {
            const auto v = array_of<3>(value, key);
            for (std::size_t i = 0; i < 3; ++i) esc.amplitude[3 + i] = deg_to_rad(v[i]);
        } else if (key == "freq_hz") {
            esc.freq_hz = array_of<6>(value, key);
        } else if (key == "gain") {
            esc.gain = array_of<6>(value, key);
        } else if (key == "hpf_cutoff_hz") {
            esc.hpf_cutoff_hz = value.get<double>();
        } else if (key == "lpf_cutoff_hz") {
            esc.lpf_cutoff_hz = value.get<double>();
        } else {
            throw std::invalid_argument("config: unknown esc key '" + key + "'");
        }
    }
    esc.validate();
}

inline void parse_objective(const nlohmann::json& j, ObjectiveParams& obj) {
    for (const auto& [key, value] : j.items()) {
        if (key == "lambda") obj.lambda = value.get<double>();
        else if (key == "success_epsilon_mm") obj.success_epsilon = mm_to_m(value.get<double>());
        else if (key == "strain_abort_px") obj.strain_abort_px = value.get<double>();
        else throw std::invalid_argument("config: unknown objective key '" + key + "'");
    }
}

inline void parse_trial(const nlohmann::json& j, CampaignOptions& opts) {
    for (const auto& [key, value] : j.items()) {
        if (key == "feedback_rate_hz") opts.feedback_rate_hz = value.get<double>();
        else if (key == "time_limit_s") opts.time_limit_s = value.get<double>();
        else if (key == "strain_source")
            opts.strain_source = strain_source_from_name(value.get<std::string>());
        else if (key == "pose_noise_sigma_mm")
            opts.pose_noise_sigma_m = mm_to_m(value.get<double>());
        else if (key == "pose_noise_sigma_deg")
            opts.pose_noise_sigma_rad = deg_to_rad(value.get<double>());
        else if (key == "wedge_patience_s") opts.wedge_patience_s = value.get<double>();
        else throw std::invalid_argument("config: unknown trial key '" + key + "'");
    }
}

inline void parse_render(const nlohmann::json& j, GelRenderConfig& render) {
    for (const auto& [key, value] : j.items()) {
        if (key == "texture_seed") render.texture_seed = value.get<std::uint64_t>();
        else if (key == "displacement_gain") render.displacement_gain = value.get<double>();
        else throw std::invalid_argument("config: unknown render key '" + key + "'");
    }
}

}  // namespace config_detail

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "esc") config_detail::parse_esc(value, cfg.options.esc);
        else if (key == "objective") config_detail::parse_objective(value, cfg.options.objective);
        else if (key == "trial") config_detail::parse_trial(value, cfg.options);
        else if (key == "render") config_detail::parse_render(value, cfg.options.render);
        else if (key == "lock") cfg.lock_overrides.raw = value;
        else throw std::invalid_argument("config: unknown section '" + key + "'");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace wiggle
