#include "normstance/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "normstance/error.hpp"
#include "normstance/util.hpp"

namespace normstance::corpus {

using nlohmann::json;

namespace {

template <typename E, std::size_t N>
struct EnumNames {
    std::array<std::string_view, N> names;

    std::string_view name(E v) const { return names[static_cast<std::size_t>(v)]; }

    E parse(std::string_view s, std::string_view what) const {
        for (std::size_t i = 0; i < N; ++i) {
            if (names[i] == s) return static_cast<E>(i);
        }
        throw ValidationError("unknown " + std::string(what) + " value '" + std::string(s) + "'");
    }
};

constexpr EnumNames<Role, 2> kRoleNames{{"user", "assistant"}};
constexpr EnumNames<Source, 3> kSourceNames{{"human_expert", "human", "llm"}};
constexpr EnumNames<Toxicity, 3> kToxicityNames{{"explicit_toxic", "implicit_toxic", "neutral"}};
constexpr EnumNames<UserStance, 5> kUserStanceNames{
    {"agree", "disagree", "elaborate_neutral", "initial", "shift_topic"}};
constexpr EnumNames<Certainty, 4> kCertaintyNames{{"certain", "uncertain", "refuse_to_engage", "none"}};
constexpr EnumNames<AssistantStance, 4> kAssistantStanceNames{{"agree", "disagree", "neutral", "new_topic"}};
constexpr EnumNames<Split, 2> kSplitNames{{"train", "test"}};
constexpr EnumNames<AssistantType, 2> kAssistantTypeNames{{"human", "llm"}};

}  // namespace

std::string_view to_string(Role v) { return kRoleNames.name(v); }
std::string_view to_string(Source v) { return kSourceNames.name(v); }
std::string_view to_string(Toxicity v) { return kToxicityNames.name(v); }
std::string_view to_string(UserStance v) { return kUserStanceNames.name(v); }
std::string_view to_string(Certainty v) { return kCertaintyNames.name(v); }
std::string_view to_string(AssistantStance v) { return kAssistantStanceNames.name(v); }
std::string_view to_string(Split v) { return kSplitNames.name(v); }
std::string_view to_string(AssistantType v) { return kAssistantTypeNames.name(v); }

Role parse_role(std::string_view s) { return kRoleNames.parse(s, "role"); }
Source parse_source(std::string_view s) { return kSourceNames.parse(s, "source"); }
Toxicity parse_toxicity(std::string_view s) { return kToxicityNames.parse(s, "toxicity"); }
UserStance parse_user_stance(std::string_view s) { return kUserStanceNames.parse(s, "user stance"); }
Certainty parse_certainty(std::string_view s) { return kCertaintyNames.parse(s, "certainty"); }
AssistantStance parse_assistant_stance(std::string_view s) {
    return kAssistantStanceNames.parse(s, "assistant stance");
}
Split parse_split(std::string_view s) { return kSplitNames.parse(s, "split"); }

AssistantType assistant_type(Source source) {
    return source == Source::LLM ? AssistantType::LLM : AssistantType::Human;
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string, std::less<>> kConversationKeys{"id", "source", "turns"};
const std::set<std::string, std::less<>> kTurnKeys{"turn_index", "role", "text", "toxicity", "certainty",
                                                   "stance"};

class RecordParser {
public:
    RecordParser(const std::string& origin, std::size_t line) : origin_(origin), line_(line) {}

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        throw ParseError(origin_, line_, "field '" + field + "': " + what);
    }

    const json& require(const json& obj, const std::string& key, const std::string& path) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail(path + key, "missing");
        return *it;
    }

    std::string string_field(const json& obj, const std::string& key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_string()) fail(path + key, "expected string");
        return v.get<std::string>();
    }

    std::optional<std::string> nullable_string(const json& obj, const std::string& key,
                                               const std::string& path) const {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) fail(path + key, "expected string or null");
        return it->get<std::string>();
    }

    void reject_unknown(const json& obj, const std::set<std::string, std::less<>>& allowed,
                        const std::string& path) const {
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.contains(key)) fail(path + key, "unknown key");
        }
    }

    template <typename F>
    auto parse_enum(F&& parse, const std::string& value, const std::string& field) const {
        try {
            return parse(value);
        } catch (const ValidationError& e) {
            fail(field, e.what());
        }
    }

private:
    const std::string& origin_;
    std::size_t line_;
};

}  // namespace

Conversation parse_conversation(std::string_view json_line, const std::string& origin, std::size_t line) {
    RecordParser p(origin, line);
    json doc;
    try {
        doc = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw ParseError(origin, line, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(origin, line, "record is not a JSON object");
    p.reject_unknown(doc, kConversationKeys, "");

    Conversation conv;
    conv.id = p.string_field(doc, "id", "");
    if (conv.id.empty()) p.fail("id", "empty");
    conv.source = p.parse_enum(parse_source, p.string_field(doc, "source", ""), "source");

    const auto& turns = p.require(doc, "turns", "");
    if (!turns.is_array()) p.fail("turns", "expected array");

    int expected_index = 1;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const auto& t = turns[i];
        const std::string path = "turns[" + std::to_string(i) + "].";
        if (!t.is_object()) p.fail(path.substr(0, path.size() - 1), "expected object");
        p.reject_unknown(t, kTurnKeys, path);

        Turn turn;
        turn.conversation_id = conv.id;
        const auto& idx = p.require(t, "turn_index", path);
        if (!idx.is_number_integer()) p.fail(path + "turn_index", "expected integer");
        turn.turn_index = idx.get<int>();
        if (turn.turn_index != expected_index) {
            p.fail(path + "turn_index",
                   "expected " + std::to_string(expected_index) + ", got " + std::to_string(turn.turn_index));
        }
        ++expected_index;

        turn.role = p.parse_enum(parse_role, p.string_field(t, "role", path), path + "role");
        turn.text = p.string_field(t, "text", path);
        const std::string stance = p.string_field(t, "stance", path);
        auto toxicity = p.nullable_string(t, "toxicity", path);
        auto certainty = p.nullable_string(t, "certainty", path);

        if (turn.role == Role::User) {
            if (certainty) p.fail(path + "certainty", "must be null for a user turn");
            if (!toxicity) p.fail(path + "toxicity", "required for a user turn");
            turn.annotation = UserAnnotation{p.parse_enum(parse_toxicity, *toxicity, path + "toxicity"),
                                             p.parse_enum(parse_user_stance, stance, path + "stance")};
        } else {
            if (toxicity) p.fail(path + "toxicity", "must be null for an assistant turn");
            if (!certainty) p.fail(path + "certainty", "required for an assistant turn");
            turn.annotation =
                AssistantAnnotation{p.parse_enum(parse_certainty, *certainty, path + "certainty"),
                                    p.parse_enum(parse_assistant_stance, stance, path + "stance")};
        }
        conv.turns.push_back(std::move(turn));
    }
    return conv;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open corpus " + path.string());
    Corpus corpus;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    const std::string origin = path.string();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto conv = parse_conversation(line, origin, line_no);
        auto [it, inserted] = seen.emplace(conv.id, line_no);
        if (!inserted) {
            throw ParseError(origin, line_no,
                             "field 'id': duplicate conversation_id '" + conv.id + "' (first seen at line " +
                                 std::to_string(it->second) + ")");
        }
        corpus.push_back(std::move(conv));
    }
    return corpus;
}

std::string to_json_line(const Conversation& conversation) {
    json doc;
    doc["id"] = conversation.id;
    doc["source"] = std::string(to_string(conversation.source));
    json turns = json::array();
    for (const auto& t : conversation.turns) {
        json jt;
        jt["turn_index"] = t.turn_index;
        jt["role"] = std::string(to_string(t.role));
        jt["text"] = t.text;
        if (const auto* u = t.user()) {
            jt["toxicity"] = std::string(to_string(u->toxicity));
            jt["certainty"] = nullptr;
            jt["stance"] = std::string(to_string(u->stance));
        } else if (const auto* a = t.assistant()) {
            jt["toxicity"] = nullptr;
            jt["certainty"] = std::string(to_string(a->certainty));
            jt["stance"] = std::string(to_string(a->stance));
        }
        turns.push_back(std::move(jt));
    }
    doc["turns"] = std::move(turns);
    return doc.dump();
}

std::vector<ValidationIssue> validate_corpus(const Corpus& corpus) {
    std::vector<ValidationIssue> issues;
    for (const auto& conv : corpus) {
        const auto n = conv.turns.size();
        if (n < 2 || n > 7) {
            issues.push_back({conv.id, "turn count " + std::to_string(n) + " outside [2, 7]"});
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (conv.turns[i].role == conv.turns[i - 1].role) {
                issues.push_back({conv.id, "roles do not alternate at turn " +
                                               std::to_string(conv.turns[i].turn_index)});
                break;
            }
        }
    }
    return issues;
}

std::size_t count_turns(const Corpus& corpus) {
    std::size_t n = 0;
    for (const auto& c : corpus) n += c.turns.size();
    return n;
}

// ---------------------------------------------------------------------------
// Pairs
// ---------------------------------------------------------------------------

std::string make_pair_id(std::string_view conversation_id, int user_turn_index) {
    return std::string(conversation_id) + ":" + std::to_string(user_turn_index);
}

PairSet make_pairs(const Corpus& corpus) {
    PairSet out;
    for (const auto& conv : corpus) {
        for (std::size_t i = 0; i + 1 < conv.turns.size(); ++i) {
            const auto* user = conv.turns[i].user();
            const auto* asst = conv.turns[i + 1].assistant();
            if (user == nullptr || asst == nullptr) continue;

            if (user->toxicity == Toxicity::Neutral) {
                ++out.excluded.neutral_toxicity;
                continue;
            }
            if (asst->stance != AssistantStance::Agree && asst->stance != AssistantStance::Disagree) {
                ++out.excluded.non_binary_stance;
                continue;
            }
            StancePair pair;
            pair.pair_id = make_pair_id(conv.id, conv.turns[i].turn_index);
            pair.conversation_id = conv.id;
            pair.user_text = conv.turns[i].text;
            pair.assistant_text = conv.turns[i + 1].text;
            pair.combined_text = pair.user_text + std::string(kSeparator) + pair.assistant_text;
            pair.label = asst->stance == AssistantStance::Agree ? 1 : 0;
            pair.group = user->toxicity == Toxicity::ExplicitToxic ? 1 : 0;
            out.pairs.push_back(std::move(pair));
        }
    }
    return out;
}

std::string to_json_line(const StancePair& pair) {
    json doc;
    doc["pair_id"] = pair.pair_id;
    doc["conversation_id"] = pair.conversation_id;
    doc["user_text"] = pair.user_text;
    doc["assistant_text"] = pair.assistant_text;
    doc["combined_text"] = pair.combined_text;
    doc["label"] = pair.label;
    doc["group"] = pair.group;
    return doc.dump();
}

void write_pairs_jsonl(const std::filesystem::path& path, const std::vector<StancePair>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        out += to_json_line(p);
        out += '\n';
    }
    write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

std::map<std::string, int> FoldSplit::test_fold() const {
    std::map<std::string, int> out;
    for (const auto& a : assignments) {
        if (a.split == Split::Test) out[a.pair_id] = a.fold_id;
    }
    return out;
}

FoldSplit make_folds(const std::vector<StancePair>& pairs, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("fold count must be at least 2");
    if (pairs.empty()) throw ValidationError("cannot build folds from zero pairs");
    if (static_cast<std::size_t>(k) > pairs.size()) {
        throw ValidationError("fold count " + std::to_string(k) + " exceeds pair count " +
                              std::to_string(pairs.size()));
    }

    // Strata keyed by (label, group), ids sorted so the result does not depend
    // on input order.
    std::array<std::vector<std::string>, 4> strata;
    for (const auto& p : pairs) strata[static_cast<std::size_t>(p.label * 2 + p.group)].push_back(p.pair_id);

    std::mt19937_64 rng(seed);
    std::map<std::string, int> test_fold;
    std::size_t dealt = 0;
    for (auto& ids : strata) {
        std::sort(ids.begin(), ids.end());
        std::shuffle(ids.begin(), ids.end(), rng);
        for (const auto& id : ids) {
            test_fold[id] = static_cast<int>(dealt % static_cast<std::size_t>(k));
            ++dealt;
        }
    }

    FoldSplit folds;
    folds.k = k;
    folds.seed = seed;
    folds.assignments.reserve(pairs.size() * static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        for (const auto& p : pairs) {
            folds.assignments.push_back({p.pair_id, f, test_fold.at(p.pair_id) == f ? Split::Test : Split::Train});
        }
    }
    return folds;
}

FoldSplit load_folds(const std::filesystem::path& path) {
    auto table = read_csv(path);
    auto id_col = table.column("pair_id");
    auto fold_col = table.column("fold_id");
    auto split_col = table.column("split");
    if (!id_col || !fold_col || !split_col) {
        throw ValidationError(path.string() + ": header must contain pair_id,fold_id,split");
    }
    FoldSplit folds;
    int max_fold = -1;
    std::map<std::pair<int, std::string>, Split> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        FoldAssignment a;
        a.pair_id = row[*id_col];
        try {
            a.fold_id = static_cast<int>(parse_integer(row[*fold_col]));
            a.split = parse_split(row[*split_col]);
        } catch (const ValidationError& e) {
            throw ParseError(path.string(), line, e.what());
        }
        if (a.fold_id < 0) throw ParseError(path.string(), line, "negative fold_id");
        auto [it, inserted] = seen.emplace(std::make_pair(a.fold_id, a.pair_id), a.split);
        if (!inserted) {
            throw ParseError(path.string(), line,
                             "pair '" + a.pair_id + "' listed twice in fold " + std::to_string(a.fold_id) +
                                 (it->second != a.split ? " as both train and test" : ""));
        }
        max_fold = std::max(max_fold, a.fold_id);
        folds.assignments.push_back(std::move(a));
    }
    folds.k = max_fold + 1;
    return folds;
}

void write_folds(const std::filesystem::path& path, const FoldSplit& folds) {
    std::string out = "pair_id,fold_id,split\n";
    for (const auto& a : folds.assignments) {
        out += csv_escape(a.pair_id);
        out += ',';
        out += std::to_string(a.fold_id);
        out += ',';
        out += to_string(a.split);
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<StancePair> fold_view(const std::vector<StancePair>& pairs, const FoldSplit& folds, int fold) {
    std::unordered_map<std::string, Split> membership;
    for (const auto& a : folds.assignments) {
        if (a.fold_id == fold) membership[a.pair_id] = a.split;
    }
    std::vector<StancePair> out;
    out.reserve(membership.size());
    for (const auto& p : pairs) {
        auto it = membership.find(p.pair_id);
        if (it == membership.end()) continue;
        StancePair copy = p;
        copy.fold_id = fold;
        copy.split = it->second;
        out.push_back(std::move(copy));
    }
    return out;
}

std::vector<StancePair> sample_portion(const std::vector<StancePair>& pairs, double portion,
                                       std::uint64_t seed) {
    if (!(portion >= 0.0 && portion <= 1.0)) {
        throw ValidationError("portion must lie in [0, 1], got " + format_double(portion));
    }
    std::vector<std::string> implicit_train;
    for (const auto& p : pairs) {
        if (p.split == Split::Train && p.group == 0) implicit_train.push_back(p.pair_id);
    }
    std::sort(implicit_train.begin(), implicit_train.end());
    std::mt19937_64 rng(seed);
    std::shuffle(implicit_train.begin(), implicit_train.end(), rng);

    // 0.29 * 100 evaluates to 28.999999999999996
    const auto keep = static_cast<std::size_t>(
        std::floor(portion * static_cast<double>(implicit_train.size()) + 1e-9));
    std::unordered_set<std::string> kept(implicit_train.begin(),
                                         implicit_train.begin() + static_cast<std::ptrdiff_t>(keep));

    std::vector<StancePair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (p.split == Split::Train && p.group == 0 && !kept.contains(p.pair_id)) continue;
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

namespace {

void accumulate(SourceSummary& s, const Conversation& conv) {
    ++s.conversations;
    s.turns += conv.turns.size();
    for (std::size_t i = 0; i < conv.turns.size(); ++i) {
        const auto& t = conv.turns[i];
        if (const auto* u = t.user()) {
            ++s.toxicity[static_cast<std::size_t>(u->toxicity)];
            ++s.user_stance[static_cast<std::size_t>(u->stance)];
            if (i + 1 < conv.turns.size() && conv.turns[i + 1].assistant() != nullptr) ++s.pairs;
        } else if (const auto* a = t.assistant()) {
            ++s.assistant_stance[static_cast<std::size_t>(a->stance)];
            ++s.certainty[static_cast<std::size_t>(a->certainty)];
        }
    }
}

}  // namespace

CorpusSummary corpus_summary(const Corpus& corpus) {
    CorpusSummary summary;
    for (std::size_t i = 0; i < kNumSources; ++i) summary.sources[i].source = static_cast<Source>(i);
    summary.overall.source = Source::Human;
    for (const auto& conv : corpus) {
        accumulate(summary.sources[static_cast<std::size_t>(conv.source)], conv);
        accumulate(summary.overall, conv);
    }
    return summary;
}

std::string summary_csv(const CorpusSummary& summary) {
    std::ostringstream out;
    out << "source,conversations,turns,pairs";
    for (std::size_t i = 0; i < kNumToxicity; ++i) out << ",toxicity_" << to_string(static_cast<Toxicity>(i));
    for (std::size_t i = 0; i < kNumUserStances; ++i)
        out << ",user_" << to_string(static_cast<UserStance>(i));
    for (std::size_t i = 0; i < kNumAssistantStances; ++i)
        out << ",assistant_" << to_string(static_cast<AssistantStance>(i));
    for (std::size_t i = 0; i < kNumCertainty; ++i)
        out << ",certainty_" << to_string(static_cast<Certainty>(i));
    out << '\n';
    auto row = [&](std::string_view name, const SourceSummary& s) {
        out << name << ',' << s.conversations << ',' << s.turns << ',' << s.pairs;
        for (auto v : s.toxicity) out << ',' << v;
        for (auto v : s.user_stance) out << ',' << v;
        for (auto v : s.assistant_stance) out << ',' << v;
        for (auto v : s.certainty) out << ',' << v;
        out << '\n';
    };
    for (const auto& s : summary.sources) row(to_string(s.source), s);
    row("overall", summary.overall);
    return out.str();
}

std::vector<SplitStanceRow> split_stance_table(const std::vector<StancePair>& pairs, const FoldSplit& folds) {
    // [split][group] -> accumulated percentages over folds
    std::array<std::array<SplitStanceRow, 2>, 2> acc{};
    std::array<std::array<int, 2>, 2> folds_seen{};
    for (int f = 0; f < folds.k; ++f) {
        auto view = fold_view(pairs, folds, f);
        std::array<std::array<std::array<std::size_t, 2>, 2>, 2> counts{};  // [split][group][label]
        for (const auto& p : view) {
            ++counts[static_cast<std::size_t>(p.split)][static_cast<std::size_t>(p.group)]
                    [static_cast<std::size_t>(p.label)];
        }
        for (std::size_t s = 0; s < 2; ++s) {
            for (std::size_t g = 0; g < 2; ++g) {
                const auto n = counts[s][g][0] + counts[s][g][1];
                if (n == 0) continue;
                acc[s][g].agree_pct += 100.0 * static_cast<double>(counts[s][g][1]) / static_cast<double>(n);
                acc[s][g].disagree_pct += 100.0 * static_cast<double>(counts[s][g][0]) / static_cast<double>(n);
                acc[s][g].mean_count += static_cast<double>(n);
                ++folds_seen[s][g];
            }
        }
    }
    std::vector<SplitStanceRow> rows;
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t g = 0; g < 2; ++g) {
            SplitStanceRow r = acc[s][g];
            r.split = static_cast<Split>(s);
            r.group = static_cast<int>(g);
            if (folds_seen[s][g] > 0) {
                const double n = folds_seen[s][g];
                r.agree_pct /= n;
                r.disagree_pct /= n;
                r.mean_count /= n;
            }
            rows.push_back(r);
        }
    }
    return rows;
}

std::string split_stance_csv(const std::vector<SplitStanceRow>& rows) {
    std::string out = "split,op,agree_pct,disagree_pct,mean_count\n";
    for (const auto& r : rows) {
        out += std::string(to_string(r.split)) + ',' + (r.group == 1 ? "exp" : "imp") + ',' +
               format_fixed(r.agree_pct, 1) + ',' + format_fixed(r.disagree_pct, 1) + ',' +
               format_fixed(r.mean_count, 1) + '\n';
    }
    return out;
}

}  // namespace normstance::corpus
