#pragma once
// Synthetic corpora and embedding sets for tests.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "normstance/corpus.hpp"
#include "normstance/embeddings.hpp"

namespace normstance::testkit {

struct SyntheticSet {
    std::vector<corpus::StancePair> pairs;
    EmbeddingTable embeddings;
};

// Two Gaussian clusters (unit noise) whose means sit +-separation/2 along a
// random unit direction. Labels are balanced; group 0 gets `implicit_share`
// of each class.
SyntheticSet gaussian_clusters(std::size_t n, std::size_t dim, std::uint64_t seed, double separation = 6.0,
                               double implicit_share = 0.5);

// Clusters as above plus a group offset along a second direction. A fraction
// `noise` of the implicit-group positives are relabelled 0.
SyntheticSet group_skewed(std::size_t n, std::size_t dim, std::uint64_t seed, double noise = 0.3);

// Random corpus with 2..7 alternating turns per conversation starting with a
// user turn, and random annotations.
corpus::Corpus random_corpus(std::mt19937_64& rng, std::size_t conversations);

// Builds a corpus turn by turn.
struct CorpusBuilder {
    corpus::Corpus corpus;

    CorpusBuilder& conversation(const std::string& id, corpus::Source source);
    CorpusBuilder& user(corpus::Toxicity toxicity, corpus::UserStance stance, const std::string& text = "u");
    CorpusBuilder& assistant(corpus::AssistantStance stance, corpus::Certainty certainty = corpus::Certainty::None,
                             const std::string& text = "a");
};

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

// Source directory of checked-in fixtures.
std::filesystem::path fixture_dir();

}  // namespace normstance::testkit
