#pragma once
// Analytics bundle: distributions, flows, positions, difference matrices and
// the significance tests that go with them.
//
//   summary.csv                 corpus counts per source
//   distributions.csv           source x opinion (explicit/implicit) rows
//   neutral_distributions.csv   neutral user turns, by assistant type and source
//   neutral_sem.csv             per-conversation mean and SEM, neutral user turns
//   flows/<type>_<toxicity>.json
//   positions/<type>_<toxicity>.csv
//   differences_<type>.csv
//   tests.csv

#include <filesystem>
#include <vector>

#include "normstance/corpus.hpp"
#include "normstance/stats.hpp"

namespace normstance::harness {

// Samples smaller than this skip the Mann-Whitney test ("insufficient n").
inline constexpr std::size_t kMinTestSample = 3;

struct AnalyzeResult {
    std::vector<std::filesystem::path> files;
    std::vector<stats::TestRow> tests;
};

// Test rows only, without writing anything.
std::vector<stats::TestRow> significance_tests(const corpus::Corpus& corpus);

AnalyzeResult analyze(const corpus::Corpus& corpus, const std::filesystem::path& out_dir);

}  // namespace normstance::harness
