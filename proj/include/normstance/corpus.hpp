#pragma once
// Annotated conversation corpora: loading, validation, stance-pair
// construction, fold assignment and implicit-portion sampling.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace normstance::corpus {

enum class Role : std::uint8_t { User, Assistant };
enum class Source : std::uint8_t { HumanExpert, Human, LLM };
enum class Toxicity : std::uint8_t { ExplicitToxic, ImplicitToxic, Neutral };
enum class UserStance : std::uint8_t { Agree, Disagree, ElaborateNeutral, Initial, ShiftTopic };
enum class Certainty : std::uint8_t { Certain, Uncertain, RefuseToEngage, None };
enum class AssistantStance : std::uint8_t { Agree, Disagree, Neutral, NewTopic };
enum class Split : std::uint8_t { Train, Test };

// Human covers both HumanExpert and Human sources.
enum class AssistantType : std::uint8_t { Human, LLM };

inline constexpr std::size_t kNumSources = 3;
inline constexpr std::size_t kNumToxicity = 3;
inline constexpr std::size_t kNumUserStances = 5;
inline constexpr std::size_t kNumCertainty = 4;
inline constexpr std::size_t kNumAssistantStances = 4;

// Lowercase snake_case names as used on disk.
std::string_view to_string(Role v);
std::string_view to_string(Source v);
std::string_view to_string(Toxicity v);
std::string_view to_string(UserStance v);
std::string_view to_string(Certainty v);
std::string_view to_string(AssistantStance v);
std::string_view to_string(Split v);
std::string_view to_string(AssistantType v);

// Parsers throw ValidationError on unknown names.
Role parse_role(std::string_view s);
Source parse_source(std::string_view s);
Toxicity parse_toxicity(std::string_view s);
UserStance parse_user_stance(std::string_view s);
Certainty parse_certainty(std::string_view s);
AssistantStance parse_assistant_stance(std::string_view s);
Split parse_split(std::string_view s);

AssistantType assistant_type(Source source);

struct UserAnnotation {
    Toxicity toxicity;
    UserStance stance;
};

struct AssistantAnnotation {
    Certainty certainty;
    AssistantStance stance;
};

struct Turn {
    std::string conversation_id;
    int turn_index = 1;  // 1-based, consecutive
    Role role = Role::User;
    std::string text;
    std::variant<UserAnnotation, AssistantAnnotation> annotation;

    const UserAnnotation* user() const { return std::get_if<UserAnnotation>(&annotation); }
    const AssistantAnnotation* assistant() const { return std::get_if<AssistantAnnotation>(&annotation); }
};

struct Conversation {
    std::string id;
    Source source = Source::Human;
    std::vector<Turn> turns;
};

using Corpus = std::vector<Conversation>;

// Load failures carry the 1-based line number and the offending field.
Corpus load_corpus(const std::filesystem::path& path);

// Parses one JSONL record; `line` is used for error messages only.
Conversation parse_conversation(std::string_view json_line, const std::string& origin, std::size_t line);

std::string to_json_line(const Conversation& conversation);

struct ValidationIssue {
    std::string conversation_id;
    std::string message;
};

// Soft checks: turn count outside [2,7] and non-alternating roles. Hard
// invariants are enforced by load_corpus.
std::vector<ValidationIssue> validate_corpus(const Corpus& corpus);

std::size_t count_turns(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Stance pairs
// ---------------------------------------------------------------------------

inline constexpr std::string_view kSeparator = " [SEP] ";

struct StancePair {
    std::string pair_id;
    std::string conversation_id;
    std::string user_text;
    std::string assistant_text;
    std::string combined_text;
    int label = 0;  // 1 = Agree, 0 = Disagree
    int group = 0;  // 0 = Implicit, 1 = Explicit
    int fold_id = 0;
    Split split = Split::Train;

    bool operator==(const StancePair&) const = default;
};

struct PairExclusions {
    std::size_t neutral_toxicity = 0;     // user turn not toxic
    std::size_t non_binary_stance = 0;    // assistant stance not Agree/Disagree
    std::size_t total() const { return neutral_toxicity + non_binary_stance; }
};

struct PairSet {
    std::vector<StancePair> pairs;
    PairExclusions excluded;
};

// pair_id is "<conversation_id>:<user turn_index>".
std::string make_pair_id(std::string_view conversation_id, int user_turn_index);

// One pair per adjacent (User, Assistant) couple with a toxic user turn and an
// Agree/Disagree assistant turn.
PairSet make_pairs(const Corpus& corpus);

// JSONL export consumed by the embedding encoder.
std::string to_json_line(const StancePair& pair);
void write_pairs_jsonl(const std::filesystem::path& path, const std::vector<StancePair>& pairs);

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

struct FoldAssignment {
    std::string pair_id;
    int fold_id = 0;
    Split split = Split::Train;
};

struct FoldSplit {
    int k = 5;
    std::uint64_t seed = 0;
    // One row per (pair, fold) membership; a pair normally appears once per
    // fold, as Test in exactly one fold and Train in the others.
    std::vector<FoldAssignment> assignments;

    // Test fold of each pair (the fold where it is Test).
    std::map<std::string, int> test_fold() const;
};

// Stratified by (label, group); test fold sizes differ by at most one.
FoldSplit make_folds(const std::vector<StancePair>& pairs, int k, std::uint64_t seed);

FoldSplit load_folds(const std::filesystem::path& path);
void write_folds(const std::filesystem::path& path, const FoldSplit& folds);

// Pairs participating in `fold`, with fold_id and split filled in. Pairs not
// listed for the fold are omitted. Order follows `pairs`.
std::vector<StancePair> fold_view(const std::vector<StancePair>& pairs, const FoldSplit& folds, int fold);

// Keeps every Test pair and every explicit-group Train pair, plus the first
// floor(portion * n) implicit Train pairs of a seeded permutation. The
// permutation depends only on the implicit Train ids and the seed, so smaller
// portions select a prefix of larger ones. Output order follows input order.
std::vector<StancePair> sample_portion(const std::vector<StancePair>& pairs, double portion,
                                       std::uint64_t seed);

inline const std::vector<double> kDefaultPortions{0.0, 0.10, 0.20, 0.30, 0.60, 1.0};

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

struct SourceSummary {
    Source source;
    std::size_t conversations = 0;
    std::size_t turns = 0;
    std::size_t pairs = 0;  // adjacent user -> assistant exchanges
    std::array<std::size_t, kNumToxicity> toxicity{};
    std::array<std::size_t, kNumUserStances> user_stance{};
    std::array<std::size_t, kNumAssistantStances> assistant_stance{};
    std::array<std::size_t, kNumCertainty> certainty{};
};

struct CorpusSummary {
    std::array<SourceSummary, kNumSources> sources;
    SourceSummary overall;
};

CorpusSummary corpus_summary(const Corpus& corpus);

// source,turns,pairs,... one row per source plus "overall".
std::string summary_csv(const CorpusSummary& summary);

// Assistant stance percentages by split and opinion type, averaged over folds.
struct SplitStanceRow {
    Split split;
    int group;  // 0 implicit, 1 explicit
    double agree_pct = 0.0;
    double disagree_pct = 0.0;
    double mean_count = 0.0;
};

std::vector<SplitStanceRow> split_stance_table(const std::vector<StancePair>& pairs, const FoldSplit& folds);
std::string split_stance_csv(const std::vector<SplitStanceRow>& rows);

}  // namespace normstance::corpus
