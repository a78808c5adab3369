#pragma once
// Experiment configuration files.
//
// Grammar (a small TOML subset):
//   # comment
//   key = value
//   [section]
// Values are double-quoted strings, numbers, true/false, or flat arrays of
// those: [0, 0.1, 0.2]. Keys before any section header are top level. Keys
// inside [name] apply to the model called `name`.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "normstance/pulearn/config.hpp"

namespace normstance::harness {

using ConfigScalar = std::variant<bool, double, std::string>;
using ConfigValue = std::variant<bool, double, std::string, std::vector<ConfigScalar>>;

struct ConfigEntry {
    ConfigValue value;
    std::size_t line = 0;
};

// section -> key -> entry; the top-level section is "".
using ConfigDocument = std::map<std::string, std::map<std::string, ConfigEntry>>;

// Throws ParseError with the offending line.
ConfigDocument parse_config_text(std::string_view text, const std::string& origin);

struct ModelSpec {
    std::string name;
    pulearn::TrainConfig config;
};

struct ExperimentConfig {
    std::filesystem::path corpus;
    std::filesystem::path embeddings;
    std::optional<std::filesystem::path> folds;  // otherwise generated from k and fold_seed
    int k = 5;
    std::uint64_t fold_seed = 0;
    std::vector<double> portions{0.0, 0.10, 0.20, 0.30, 0.60, 1.0};
    std::vector<ModelSpec> models;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::filesystem::path out = "out";
    int jobs = 1;

    // Linear and MLP with their default hyperparameters.
    static std::vector<ModelSpec> default_models();

    // Throws ValidationError. With check_paths, the corpus and embeddings
    // (and folds, if given) must exist.
    void validate(bool check_paths) const;
};

// Relative paths resolve against the config file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from(const ConfigDocument& doc, const std::filesystem::path& base_dir,
                                        const std::string& origin);

// Applies `key = value` overrides of a model section (rounds, eta, ...).
void apply_model_key(pulearn::TrainConfig& config, const std::string& key, const ConfigEntry& entry,
                     const std::string& origin);

}  // namespace normstance::harness
