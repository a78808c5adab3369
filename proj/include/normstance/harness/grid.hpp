#pragma once
// Experiment grid: portions x models x folds x seeds.
//
// Layout under the output directory:
//   <portion, 2 decimals>/<model>/<fold>/<seed>/{model.bin,history.csv,preds.csv,metrics.json}
//   summary/{metrics.csv,aggregate.csv,table2.csv,fpr_by_portion.csv}
// A cell counts as complete once metrics.json exists; it is written last.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "normstance/corpus.hpp"
#include "normstance/embeddings.hpp"
#include "normstance/harness/config.hpp"
#include "normstance/metrics.hpp"

namespace normstance::harness {

struct GridInputs {
    std::vector<corpus::StancePair> pairs;
    corpus::FoldSplit folds;
    EmbeddingTable embeddings;
};

// Loads the corpus, builds pairs, loads or generates folds and loads the
// embeddings. Throws ValidationError naming the first pair without an
// embedding.
GridInputs load_grid_inputs(const ExperimentConfig& config);

struct GridCell {
    double portion = 0.0;
    std::size_t model = 0;  // index into ExperimentConfig::models
    int fold = 0;
    std::uint64_t seed = 0;
};

std::filesystem::path cell_dir(const std::filesystem::path& out, const std::string& portion, const std::string& model,
                               int fold, std::uint64_t seed);

struct GridResult {
    std::size_t trained = 0;
    std::size_t skipped = 0;
    std::vector<metrics::ReportRow> rows;  // cell order: portion, model, fold, seed
};

// Runs every cell not yet complete (all cells with `force`) on up to
// config.jobs worker threads, then rewrites the summary tables. A training
// failure is rethrown with the cell identity after running jobs finish.
GridResult run_grid(const GridInputs& inputs, const ExperimentConfig& config, bool force);
GridResult run_grid(const ExperimentConfig& config, bool force);

// Writes the summary tables for `rows` under <out>/summary.
void write_summary(const std::filesystem::path& out, const ExperimentConfig& config,
                   const std::vector<metrics::ReportRow>& rows);

}  // namespace normstance::harness
