#include "graspmaps/config.hpp"

#include <cstdint>

#include <fmt/format.h>

#include "graspmaps/errors.hpp"

namespace graspmaps {

std::string to_string(JawPolicy v) { return v == JawPolicy::minimum ? "minimum" : "maximum"; }
std::string to_string(QualityMode v) { return v == QualityMode::soft ? "soft" : "binary"; }
std::string to_string(Decay) { return "linear"; }
std::string to_string(GammaMode v) { return v == GammaMode::region ? "region" : "centers"; }
std::string to_string(Builder v) { return v == Builder::orange ? "orange" : "legacy"; }

JawPolicy parse_jaw_policy(std::string_view s) {
    if (s == "minimum" || s == "min") return JawPolicy::minimum;
    if (s == "maximum" || s == "max") return JawPolicy::maximum;
    throw InvalidArgument("unknown jaw policy '" + std::string(s) + "'");
}

QualityMode parse_quality_mode(std::string_view s) {
    if (s == "soft") return QualityMode::soft;
    if (s == "binary") return QualityMode::binary;
    throw InvalidArgument("unknown quality mode '" + std::string(s) + "'");
}

Decay parse_decay(std::string_view s) {
    if (s == "linear") return Decay::linear;
    throw InvalidArgument("unknown decay profile '" + std::string(s) + "'");
}

GammaMode parse_gamma_mode(std::string_view s) {
    if (s == "region") return GammaMode::region;
    if (s == "centers") return GammaMode::centers;
    throw InvalidArgument("unknown gamma mode '" + std::string(s) + "'");
}

Builder parse_builder(std::string_view s) {
    if (s == "orange") return Builder::orange;
    if (s == "legacy") return Builder::legacy;
    throw InvalidArgument("unknown builder '" + std::string(s) + "'");
}

nlohmann::ordered_json to_json(const BuilderConfig& cfg) {
    nlohmann::ordered_json j;
    j["bins"] = cfg.bins;
    j["jaw_policy"] = to_string(cfg.jaw_policy);
    j["quality_mode"] = to_string(cfg.quality_mode);
    j["decay"] = to_string(cfg.decay);
    j["gamma_mode"] = to_string(cfg.gamma_mode);
    j["out_width"] = cfg.out_width;
    j["out_height"] = cfg.out_height;
    return j;
}

BuilderConfig builder_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("builder config must be a JSON object");
    BuilderConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "bins") cfg.bins = value.get<int>();
            else if (key == "jaw_policy") cfg.jaw_policy = parse_jaw_policy(value.get<std::string>());
            else if (key == "quality_mode") cfg.quality_mode = parse_quality_mode(value.get<std::string>());
            else if (key == "decay") cfg.decay = parse_decay(value.get<std::string>());
            else if (key == "gamma_mode") cfg.gamma_mode = parse_gamma_mode(value.get<std::string>());
            else if (key == "out_width") cfg.out_width = value.get<int>();
            else if (key == "out_height") cfg.out_height = value.get<int>();
            else throw InvalidArgument("unknown builder config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("builder config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

std::string fingerprint(std::string_view canonical) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char c : canonical) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    return fmt::format("{:016x}", hash);
}

std::string fingerprint(const BuilderConfig& cfg) { return fingerprint(to_json(cfg).dump()); }

}  // namespace graspmaps
