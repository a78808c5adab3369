#include "synthetic.hpp"

#include <atomic>
#include <cmath>

#include <unistd.h>

namespace normstance::testkit {

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal;
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        norm += x * x;
    }
    for (auto& x : v) x /= std::sqrt(norm);
    return v;
}

std::string pair_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "syn%05zu", i);
    return corpus::make_pair_id(buf, 1);
}

}  // namespace

SyntheticSet gaussian_clusters(std::size_t n, std::size_t dim, std::uint64_t seed, double separation,
                               double implicit_share) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const auto direction = random_unit(rng, dim);

    SyntheticSet set{{}, EmbeddingTable(dim)};
    std::vector<float> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        corpus::StancePair p;
        p.pair_id = pair_id(i);
        p.conversation_id = p.pair_id.substr(0, p.pair_id.find(':'));
        p.label = static_cast<int>(i % 2);
        p.group = uniform(rng) < implicit_share ? 0 : 1;
        const double shift = (p.label == 1 ? 0.5 : -0.5) * separation;
        for (std::size_t d = 0; d < dim; ++d) x[d] = static_cast<float>(normal(rng) + shift * direction[d]);
        set.embeddings.add(p.pair_id, x);
        set.pairs.push_back(std::move(p));
    }
    return set;
}

SyntheticSet group_skewed(std::size_t n, std::size_t dim, std::uint64_t seed, double noise) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    const auto class_dir = random_unit(rng, dim);
    const auto group_dir = random_unit(rng, dim);

    SyntheticSet set{{}, EmbeddingTable(dim)};
    std::vector<float> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        corpus::StancePair p;
        p.pair_id = pair_id(i);
        p.conversation_id = p.pair_id.substr(0, p.pair_id.find(':'));
        const int truth = static_cast<int>(i % 2);
        p.group = uniform(rng) < 0.5 ? 0 : 1;
        p.label = truth;
        if (truth == 1 && p.group == 0 && uniform(rng) < noise) p.label = 0;
        const double shift = truth == 1 ? 1.5 : -1.5;
        const double offset = p.group == 0 ? 1.5 : -1.5;
        for (std::size_t d = 0; d < dim; ++d) {
            x[d] = static_cast<float>(normal(rng) + shift * class_dir[d] + offset * group_dir[d]);
        }
        set.embeddings.add(p.pair_id, x);
        set.pairs.push_back(std::move(p));
    }
    return set;
}

corpus::Corpus random_corpus(std::mt19937_64& rng, std::size_t conversations) {
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    CorpusBuilder b;
    for (std::size_t c = 0; c < conversations; ++c) {
        b.conversation("r" + std::to_string(c), static_cast<corpus::Source>(pick(corpus::kNumSources)));
        const std::size_t turns = 2 + pick(6);
        for (std::size_t t = 0; t < turns; ++t) {
            if (t % 2 == 0) {
                b.user(static_cast<corpus::Toxicity>(pick(corpus::kNumToxicity)),
                       static_cast<corpus::UserStance>(pick(corpus::kNumUserStances)));
            } else {
                b.assistant(static_cast<corpus::AssistantStance>(pick(corpus::kNumAssistantStances)),
                            static_cast<corpus::Certainty>(pick(corpus::kNumCertainty)));
            }
        }
    }
    return b.corpus;
}

CorpusBuilder& CorpusBuilder::conversation(const std::string& id, corpus::Source source) {
    corpus.push_back({id, source, {}});
    return *this;
}

CorpusBuilder& CorpusBuilder::user(corpus::Toxicity toxicity, corpus::UserStance stance, const std::string& text) {
    auto& conv = corpus.back();
    corpus::Turn t;
    t.conversation_id = conv.id;
    t.turn_index = static_cast<int>(conv.turns.size()) + 1;
    t.role = corpus::Role::User;
    t.text = text;
    t.annotation = corpus::UserAnnotation{toxicity, stance};
    conv.turns.push_back(std::move(t));
    return *this;
}

CorpusBuilder& CorpusBuilder::assistant(corpus::AssistantStance stance, corpus::Certainty certainty,
                                        const std::string& text) {
    auto& conv = corpus.back();
    corpus::Turn t;
    t.conversation_id = conv.id;
    t.turn_index = static_cast<int>(conv.turns.size()) + 1;
    t.role = corpus::Role::Assistant;
    t.text = text;
    t.annotation = corpus::AssistantAnnotation{certainty, stance};
    conv.turns.push_back(std::move(t));
    return *this;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("normstance-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::filesystem::path fixture_dir() { return NORMSTANCE_FIXTURE_DIR; }

}  // namespace normstance::testkit
