#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "campaign.hpp"
#include "env3d.hpp"
#include "rl.hpp"

namespace aquaswipt
{
using nlohmann::json;

json to_json(EnvConfig const& c);
json to_json(LearnConfig const& c);
json to_json(CampaignConfig const& c);

// Missing keys keep their defaults; unknown keys and type errors are
// collected and reported together as a ConfigError.
EnvConfig env_config_from_json(json const& j);
LearnConfig learn_config_from_json(json const& j);
CampaignConfig campaign_config_from_json(json const& j);

//! Parse a JSON file; IoError when unreadable, ConfigError when malformed.
json load_json_file(std::filesystem::path const& path);

//! Set "a.b.c" in a JSON document; the value is parsed as JSON when possible.
void apply_override(json& doc, std::string_view dotted_path, std::string_view value);

//! Canonical number formatting for emitted text files.
std::string format_number(double v);

}  // namespace aquaswipt
