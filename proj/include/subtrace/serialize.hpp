#pragma once

// Versioned JSON model files. One file carries everything the attack phase
// needs: the metro/non-metro mode model, the feature config and the interval
// ensemble, so training and attack agree bit-for-bit.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "subtrace/classify.hpp"
#include "subtrace/extract.hpp"

namespace subtrace {

inline constexpr const char* kModelFormat = "subtrace-model";
inline constexpr int kModelVersion = 1;

struct ModelBundle {
    std::string network_name;
    int line_length = 0;
    std::optional<ModeModel> mode;
    IntervalEnsemble intervals;
};

nlohmann::json to_json(const ModeModel& m);
ModeModel mode_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeatureConfig& c);
FeatureConfig feature_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IntervalEnsemble& e);
IntervalEnsemble ensemble_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelBundle& b);
/// Throws FormatError on a wrong format tag, unknown version or malformed body.
ModelBundle bundle_from_json(const nlohmann::json& j);

void save_model(const ModelBundle& b, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace subtrace
