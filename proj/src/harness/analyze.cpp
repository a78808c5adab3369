#include "normstance/harness/analyze.hpp"

#include <stdexcept>

#include "normstance/flows.hpp"
#include "normstance/util.hpp"

namespace normstance::harness {

namespace fs = std::filesystem;
using corpus::AssistantType;
using corpus::Source;
using corpus::Toxicity;
using corpus::UserStance;

namespace {

constexpr std::array<Source, 3> kSources{Source::HumanExpert, Source::Human, Source::LLM};
constexpr std::array<AssistantType, 2> kTypes{AssistantType::Human, AssistantType::LLM};
constexpr std::array<Toxicity, 2> kOpinions{Toxicity::ExplicitToxic, Toxicity::ImplicitToxic};

std::vector<flows::DistributionRow> opinion_rows(const corpus::Corpus& c) {
    std::vector<flows::DistributionRow> rows;
    for (auto s : kSources) {
        for (auto t : kOpinions) rows.push_back(flows::stance_distribution(c, {s, std::nullopt, t, std::nullopt}));
    }
    return rows;
}

std::vector<flows::DistributionRow> neutral_rows_by_type(const corpus::Corpus& c) {
    std::vector<flows::DistributionRow> rows;
    for (auto t : kTypes) rows.push_back(flows::stance_distribution(c, {std::nullopt, t, Toxicity::Neutral, std::nullopt}));
    return rows;
}

stats::TestRow chi_square_row(const std::string& group, const std::string& comparison,
                              const std::vector<flows::DistributionRow>& rows) {
    stats::TestRow row{"chi_square", group, comparison, std::nullopt, ""};
    try {
        row.result = stats::chi_square_independence(flows::contingency(rows));
    } catch (const std::invalid_argument& e) {
        row.note = std::string("not computed: ") + e.what();
    }
    return row;
}

std::string condition_name(AssistantType type, Toxicity tox) {
    return std::string(corpus::to_string(type)) + '_' + std::string(corpus::to_string(tox));
}

}  // namespace

std::vector<stats::TestRow> significance_tests(const corpus::Corpus& c) {
    std::vector<stats::TestRow> tests;
    tests.push_back(chi_square_row("all", "source x opinion (6x3)", opinion_rows(c)));
    tests.push_back(chi_square_row("neutral_user", "human vs llm (2x3)", neutral_rows_by_type(c)));

    for (auto type : kTypes) {
        const auto explicit_samples = flows::relative_positions(c, type, Toxicity::ExplicitToxic);
        const auto implicit_samples = flows::relative_positions(c, type, Toxicity::ImplicitToxic);
        for (std::size_t s = 0; s < corpus::kNumUserStances; ++s) {
            const auto stance = static_cast<UserStance>(s);
            const auto a = flows::positions_of(explicit_samples, stance);
            const auto b = flows::positions_of(implicit_samples, stance);
            stats::TestRow row{"mann_whitney_u",
                               std::string(corpus::to_string(type)) + '/' + std::string(corpus::to_string(stance)),
                               "explicit vs implicit position", std::nullopt, ""};
            if (a.size() < kMinTestSample || b.size() < kMinTestSample) {
                row.note = "insufficient n (" + std::to_string(a.size()) + ", " + std::to_string(b.size()) + ")";
            } else {
                row.result = stats::mann_whitney_u(a, b);
            }
            tests.push_back(std::move(row));
        }
    }
    return tests;
}

AnalyzeResult analyze(const corpus::Corpus& c, const fs::path& out) {
    AnalyzeResult result;
    auto emit = [&](const fs::path& rel, const std::string& text) {
        write_text_file(out / rel, text);
        result.files.push_back(out / rel);
    };

    emit("summary.csv", corpus::summary_csv(corpus::corpus_summary(c)));
    emit("distributions.csv", flows::distribution_csv(opinion_rows(c)));

    auto neutral = neutral_rows_by_type(c);
    for (auto s : kSources) {
        neutral.push_back(flows::stance_distribution(c, {s, std::nullopt, Toxicity::Neutral, std::nullopt}));
    }
    emit("neutral_distributions.csv", flows::distribution_csv(neutral));

    std::vector<flows::SemRow> sem;
    for (auto s : kSources) {
        auto rows = flows::per_conversation_sem(c, {s, std::nullopt, Toxicity::Neutral, std::nullopt});
        sem.insert(sem.end(), rows.begin(), rows.end());
    }
    emit("neutral_sem.csv", flows::sem_csv(sem));

    for (auto type : kTypes) {
        for (auto tox : kOpinions) {
            const auto name = condition_name(type, tox);
            emit(fs::path("flows") / (name + ".json"),
                 flows::flow_json(flows::transition_flow(c, {std::nullopt, type, tox, std::nullopt})));
            emit(fs::path("positions") / (name + ".csv"), flows::positions_csv(flows::relative_positions(c, type, tox)));
        }
        emit("differences_" + std::string(corpus::to_string(type)) + ".csv",
             flows::difference_csv(flows::stance_difference_matrix(c, type)));
    }

    result.tests = significance_tests(c);
    emit("tests.csv", stats::tests_csv(result.tests));
    return result;
}

}  // namespace normstance::harness
