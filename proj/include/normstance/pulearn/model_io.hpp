#pragma once
// Model files:
//   "EMPM1" | uint32 header_len | JSON header (header_len bytes)
//   | uint64 parameter_count | parameter_count x float32
// All integers and floats little-endian. The header records the model shape,
// the full training config (including seed) and the class prior.

#include <filesystem>
#include <string>

#include "normstance/pulearn/trainer.hpp"

namespace normstance::pulearn {

inline constexpr int kModelFormatVersion = 1;

std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(const std::string& json_text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);

// Parameters come back rounded to float32; the history is not stored.
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace normstance::pulearn
