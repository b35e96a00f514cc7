#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wiggle/campaign.hpp"

namespace wiggle {

// --- RFC-4180-style CSV helpers ---------------------------------------------

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

/// Split one CSV document into rows of fields (quoted fields may contain
/// commas, quotes and newlines).
inline std::vector<std::vector<std::string>> csv_parse(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\n') {
            if (!field.empty() || field_started || !row.empty()) {
                row.push_back(std::move(field));
                field.clear();
                field_started = false;
                rows.push_back(std::move(row));
                row.clear();
            }
        } else if (c == '\r') {
            // swallowed; \r\n handled by the \n branch
        } else {
            field += c;
            field_started = true;
        }
    }
    if (!field.empty() || field_started || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- Campaign CSV ------------------------------------------------------------

inline constexpr const char* kCampaignCsvHeader = "lock,axis,bin,n,successes,rate_percent,mean_time_s";

inline std::string campaign_to_csv(const CampaignReport& rep) {
    std::ostringstream out;
    out << kCampaignCsvHeader << "\n";
    for (const CellStat& c : rep.cells) {
        out << csv_escape(c.lock) << "," << csv_escape(c.axis) << "," << csv_escape(c.bin) << ","
            << c.trials << "," << c.successes << "," << c.rate_percent << ",";
        if (c.mean_time_s) out << *c.mean_time_s;
        out << "\n";
    }
    return out.str();
}

inline std::vector<CellStat> cells_from_csv(const std::string& text) {
    const auto rows = csv_parse(text);
    if (rows.empty() || rows[0].size() != 7)
        throw std::runtime_error("campaign csv: missing or malformed header");
    std::vector<CellStat> cells;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 7) throw std::runtime_error("campaign csv: bad row " + std::to_string(i));
        CellStat c;
        c.lock = r[0];
        c.axis = r[1];
        c.bin = r[2];
        c.trials = std::stoi(r[3]);
        c.successes = std::stoi(r[4]);
        c.rate_percent = std::stoi(r[5]);
        if (!r[6].empty()) c.mean_time_s = std::stol(r[6]);
        cells.push_back(std::move(c));
    }
    return cells;
}

// --- Structured summary --------------------------------------------------------

inline nlohmann::json campaign_summary_json(const CampaignReport& rep) {
    nlohmann::json j;
    j["kind"] = rep.kind;
    j["seed"] = rep.seed;
    j["total_trials"] = rep.total_trials;
    j["total_successes"] = rep.total_successes;
    j["failures"] = {{"timeout", rep.failure_counts[0]},
                     {"wedged", rep.failure_counts[1]},
                     {"strain-limit", rep.failure_counts[2]},
                     {"tracking-lost", rep.failure_counts[3]}};
    nlohmann::json cells = nlohmann::json::array();
    for (const CellStat& c : rep.cells) {
        nlohmann::json jc;
        jc["lock"] = c.lock;
        jc["axis"] = c.axis;
        jc["bin"] = c.bin;
        jc["n"] = c.trials;
        jc["successes"] = c.successes;
        jc["rate_percent"] = c.rate_percent;
        if (c.mean_time_s) jc["mean_time_s"] = *c.mean_time_s;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j;
}

// --- Per-trial trace CSV --------------------------------------------------------

inline constexpr const char* kTraceCsvHeader =
    "t,cmd_x,cmd_y,cmd_z,cmd_alpha,cmd_beta,cmd_gamma,"
    "hat_x,hat_y,hat_z,hat_alpha,hat_beta,hat_gamma,"
    "ach_x,ach_y,ach_z,ach_alpha,ach_beta,ach_gamma,"
    "inserted_depth,wedged,insertion_loss,strain_px,total_loss,highpass,"
    "fb_x,fb_y,fb_z,fb_alpha,fb_beta,fb_gamma";

inline std::string trace_to_csv(const TrialRecord& rec) {
    std::ostringstream out;
    out << kTraceCsvHeader << "\n";
    for (const TraceRow& r : rec.trace) {
        out << format_double(r.t);
        for (std::size_t i = 0; i < kPoseDims; ++i) out << "," << format_double(r.commanded[i]);
        for (std::size_t i = 0; i < kPoseDims; ++i) out << "," << format_double(r.theta_hat[i]);
        for (std::size_t i = 0; i < kPoseDims; ++i) out << "," << format_double(r.achieved[i]);
        out << "," << format_double(r.inserted_depth) << "," << (r.wedged ? 1 : 0) << ","
            << format_double(r.insertion_loss) << "," << format_double(r.strain_px) << ","
            << format_double(r.total_loss) << "," << format_double(r.highpass);
        for (std::size_t i = 0; i < kPoseDims; ++i) out << "," << format_double(r.feedback[i]);
        out << "\n";
    }
    return out.str();
}

inline nlohmann::json trial_summary_json(const TrialRecord& rec) {
    nlohmann::json j;
    j["lock"] = archetype_name(rec.spec.lock.archetype);
    j["seed"] = rec.spec.rng_seed;
    j["strain_source"] = strain_source_name(rec.spec.strain_source);
    j["success"] = rec.success;
    j["failure_class"] = failure_class_name(rec.failure);
    if (rec.success) j["insertion_time_s"] = rec.insertion_time_s;
    j["ticks"] = rec.trace.size();
    nlohmann::json off = nlohmann::json::array();
    for (std::size_t i = 0; i < kPoseDims; ++i) off.push_back(rec.spec.initial_offset[i]);
    j["initial_offset"] = off;
    return j;
}

// --- Strain series CSV (replay) ---------------------------------------------

inline std::string strain_series_to_csv(const std::vector<double>& raw,
                                        const std::vector<double>& reported) {
    std::ostringstream out;
    out << "frame_index,raw_strain_px,reported_strain_px\n";
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out << (i + 1) << "," << format_double(raw[i]) << "," << format_double(reported[i])
            << "\n";
    }
    return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace wiggle
