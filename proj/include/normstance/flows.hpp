#pragma once
// Discourse analytics over adjacent (user, assistant) couples: stance
// distributions, three-layer transition flows, relative turn positions and
// explicit-minus-implicit difference matrices.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "normstance/corpus.hpp"

namespace normstance::flows {

using corpus::AssistantStance;
using corpus::AssistantType;
using corpus::Certainty;
using corpus::Source;
using corpus::Toxicity;
using corpus::UserStance;

// Filters on a couple. Unset fields match everything. The toxicity of a
// couple is the toxicity of its user turn.
struct Condition {
    std::optional<Source> source;
    std::optional<AssistantType> assistant_type;
    std::optional<Toxicity> toxicity;
    std::optional<UserStance> user_stance;

    // e.g. "human/implicit_toxic", "all"
    std::string label() const;
};

struct Couple {
    const corpus::Conversation* conversation = nullptr;
    const corpus::Turn* user = nullptr;
    const corpus::Turn* assistant = nullptr;
};

// Every user turn immediately followed by an assistant turn.
std::vector<Couple> couples(const corpus::Corpus& corpus);
bool matches(const Condition& condition, const Couple& couple);

struct DistributionRow {
    std::string condition;
    std::size_t n = 0;
    std::array<std::size_t, corpus::kNumAssistantStances> counts{};
    // Percentages over all assistant stances; empty when n == 0.
    std::optional<std::array<double, corpus::kNumAssistantStances>> percent;
};

DistributionRow stance_distribution(const corpus::Corpus& corpus, const Condition& condition);

// condition,n,<stance>_n...,<stance>_pct... with percentages to one decimal.
std::string distribution_csv(const std::vector<DistributionRow>& rows);

// Agree, Disagree and Neutral counts per row, as used by the chi-square tests.
std::vector<std::vector<double>> contingency(const std::vector<DistributionRow>& rows);

struct FlowNode {
    std::string id;  // "<layer>:<category>", e.g. "assistant:disagree"
    std::size_t count = 0;
    double share = 0.0;
};

struct FlowEdge {
    std::string from;
    std::string to;
    std::size_t count = 0;
    double weight = 0.0;  // fraction of all couples in the condition
};

inline constexpr std::array<const char*, 3> kFlowLayers{"user", "assistant", "certainty"};

struct FlowGraph {
    std::string condition;
    std::size_t couples = 0;
    std::array<std::vector<FlowNode>, 3> layers;  // nonzero nodes only
    std::vector<FlowEdge> edges;

    // Share of a node id, 0 when absent.
    double share(const std::string& id) const;
};

FlowGraph transition_flow(const corpus::Corpus& corpus, const Condition& condition);
std::string flow_json(const FlowGraph& graph);

struct PositionSample {
    std::string conversation_id;
    UserStance stance = UserStance::Initial;
    int turn_index = 1;
    double relative_position = 0.0;  // turn_index / total turns
};

// One sample per user turn of the matching conversations and toxicity.
std::vector<PositionSample> relative_positions(const corpus::Corpus& corpus, AssistantType type,
                                               Toxicity toxicity);

// conversation_id,stance,position
std::string positions_csv(const std::vector<PositionSample>& samples);

std::vector<double> positions_of(const std::vector<PositionSample>& samples, UserStance stance);

// Rows are user stances, columns assistant stances. Each column holds
// P(user stance | assistant stance, explicit) - P(... | implicit) in
// percentage points. A column is null when either condition has no couples
// with that assistant stance.
struct DifferenceMatrix {
    AssistantType assistant_type = AssistantType::Human;
    std::array<std::array<std::optional<double>, corpus::kNumAssistantStances>, corpus::kNumUserStances> cells{};
    std::array<std::size_t, corpus::kNumAssistantStances> n_explicit{};
    std::array<std::size_t, corpus::kNumAssistantStances> n_implicit{};
};

DifferenceMatrix stance_difference_matrix(const corpus::Corpus& corpus, AssistantType type);
std::string difference_csv(const DifferenceMatrix& matrix);

// Per-conversation assistant stance shares within a condition, summarized as
// mean and standard error across conversations.
struct SemRow {
    std::string condition;
    AssistantStance stance = AssistantStance::Agree;
    std::size_t conversations = 0;
    double mean_pct = 0.0;
    double sem_pct = 0.0;
};

std::vector<SemRow> per_conversation_sem(const corpus::Corpus& corpus, const Condition& condition);
std::string sem_csv(const std::vector<SemRow>& rows);

}  // namespace normstance::flows
