#pragma once
// Prediction files: CSV with header pair_id,label[,score].

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "normstance/corpus.hpp"

namespace normstance::harness {

struct PredictionRow {
    std::string pair_id;
    int label = 0;
    std::optional<double> score;
};

struct PredictionFile {
    std::string provenance;  // internal model id or external run name
    std::vector<PredictionRow> rows;

    std::size_t size() const noexcept { return rows.size(); }
    const PredictionRow* find(const std::string& pair_id) const;
};

// Validates every pair_id against `known_ids` and every label against {0,1}.
// Throws ParseError naming the line and the offending id or value.
PredictionFile ingest_predictions(const std::filesystem::path& path, const std::set<std::string>& known_ids,
                                  std::string provenance = {});
PredictionFile ingest_predictions(const std::filesystem::path& path, const std::vector<corpus::StancePair>& pairs,
                                  std::string provenance = {});

std::string predictions_csv(const PredictionFile& file);
void write_predictions(const std::filesystem::path& path, const PredictionFile& file);

// Labels of `file` in the order of `pair_ids`. Throws ValidationError naming
// the first id the file does not cover.
std::vector<int> aligned_labels(const PredictionFile& file, const std::vector<std::string>& pair_ids);

}  // namespace normstance::harness
