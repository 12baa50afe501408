#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "graspmaps/mapbuild.hpp"

namespace graspmaps {

enum class Builder { orange, legacy };

std::string to_string(JawPolicy v);
std::string to_string(QualityMode v);
std::string to_string(Decay v);
std::string to_string(GammaMode v);
std::string to_string(Builder v);

// Each throws InvalidArgument on an unknown name.
JawPolicy parse_jaw_policy(std::string_view s);
QualityMode parse_quality_mode(std::string_view s);
Decay parse_decay(std::string_view s);
GammaMode parse_gamma_mode(std::string_view s);
Builder parse_builder(std::string_view s);

nlohmann::ordered_json to_json(const BuilderConfig& cfg);

/// Missing keys keep their defaults; unknown keys are rejected.
BuilderConfig builder_config_from_json(const nlohmann::json& j);

/// 16 hex digits of FNV-1a over the canonical JSON text.
std::string fingerprint(std::string_view canonical);
std::string fingerprint(const BuilderConfig& cfg);

}  // namespace graspmaps
