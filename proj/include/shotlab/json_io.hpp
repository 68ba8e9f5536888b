#pragma once

#include "shotlab/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace shotlab {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void to_json(json& j, const ImuSample& s);
void from_json(const json& j, ImuSample& s);
void to_json(json& j, const SessionMeta& m);
void from_json(const json& j, SessionMeta& m);
void to_json(json& j, const RawSession& s);
void from_json(const json& j, RawSession& s);
void to_json(json& j, const ShotRecord& r);
void from_json(const json& j, ShotRecord& r);
void to_json(json& j, const GroundTruthTemplate& t);
void from_json(const json& j, GroundTruthTemplate& t);
void to_json(json& j, const OutcomeModel& m);
void from_json(const json& j, OutcomeModel& m);
void to_json(json& j, const ShotScore& s);
void from_json(const json& j, ShotScore& s);
void to_json(json& j, const PipelineConfig& c);
void from_json(const json& j, PipelineConfig& c);

/// Score event in the wire/batch schema, keys in schema order.
ordered_json score_event(const std::string& player_id, std::size_t shot_index, const ShotScore& s);

// Flat `key = value` config documents. Unknown keys are rejected; '#' starts a
// comment. Values not mentioned keep the value from `base`.
PipelineConfig parse_config_text(std::string_view text, PipelineConfig base = {});
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value);
std::string config_to_text(const PipelineConfig& cfg);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view contents);

GroundTruthTemplate load_template(const std::filesystem::path& p);
OutcomeModel load_model(const std::filesystem::path& p);
PipelineConfig load_config(const std::filesystem::path& p, PipelineConfig base = {});

// Labels document {"shot_0": "success", ...}.
std::map<std::string, Outcome> parse_labels(std::string_view text);
std::string labels_to_text(const std::map<std::string, Outcome>& labels);

} // namespace shotlab
