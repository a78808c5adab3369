#include "normstance/flows.hpp"

#include <cmath>
#include <map>

#include <json.hpp>

#include "normstance/util.hpp"

namespace normstance::flows {

namespace {

constexpr std::size_t kStances = corpus::kNumAssistantStances;
constexpr std::size_t kUserStances = corpus::kNumUserStances;

template <typename E>
std::size_t idx(E e) {
    return static_cast<std::size_t>(e);
}

std::string node_id(std::size_t layer, std::string_view category) {
    return std::string(kFlowLayers[layer]) + ':' + std::string(category);
}

std::string type_label(AssistantType t) { return std::string(corpus::to_string(t)); }

}  // namespace

std::string Condition::label() const {
    std::string out;
    auto add = [&](std::string_view part) {
        if (!out.empty()) out += '/';
        out += part;
    };
    if (source) add(corpus::to_string(*source));
    if (assistant_type) add(corpus::to_string(*assistant_type));
    if (toxicity) add(corpus::to_string(*toxicity));
    if (user_stance) add("user_" + std::string(corpus::to_string(*user_stance)));
    return out.empty() ? "all" : out;
}

std::vector<Couple> couples(const corpus::Corpus& corpus) {
    std::vector<Couple> out;
    for (const auto& conv : corpus) {
        for (std::size_t i = 0; i + 1 < conv.turns.size(); ++i) {
            if (conv.turns[i].user() && conv.turns[i + 1].assistant()) {
                out.push_back({&conv, &conv.turns[i], &conv.turns[i + 1]});
            }
        }
    }
    return out;
}

bool matches(const Condition& c, const Couple& couple) {
    const auto source = couple.conversation->source;
    const auto* user = couple.user->user();
    if (c.source && *c.source != source) return false;
    if (c.assistant_type && *c.assistant_type != corpus::assistant_type(source)) return false;
    if (c.toxicity && *c.toxicity != user->toxicity) return false;
    if (c.user_stance && *c.user_stance != user->stance) return false;
    return true;
}

DistributionRow stance_distribution(const corpus::Corpus& corpus, const Condition& condition) {
    DistributionRow row;
    row.condition = condition.label();
    for (const auto& couple : couples(corpus)) {
        if (!matches(condition, couple)) continue;
        ++row.counts[idx(couple.assistant->assistant()->stance)];
        ++row.n;
    }
    if (row.n > 0) {
        std::array<double, kStances> pct{};
        for (std::size_t s = 0; s < kStances; ++s) {
            pct[s] = 100.0 * static_cast<double>(row.counts[s]) / static_cast<double>(row.n);
        }
        row.percent = pct;
    }
    return row;
}

std::string distribution_csv(const std::vector<DistributionRow>& rows) {
    std::string out = "condition,n";
    for (std::size_t s = 0; s < kStances; ++s) out += ',' + std::string(corpus::to_string(AssistantStance(s))) + "_n";
    for (std::size_t s = 0; s < kStances; ++s) out += ',' + std::string(corpus::to_string(AssistantStance(s))) + "_pct";
    out += '\n';
    for (const auto& r : rows) {
        out += csv_escape(r.condition) + ',' + std::to_string(r.n);
        for (auto c : r.counts) out += ',' + std::to_string(c);
        for (std::size_t s = 0; s < kStances; ++s) out += ',' + (r.percent ? format_fixed((*r.percent)[s], 1) : "");
        out += '\n';
    }
    return out;
}

std::vector<std::vector<double>> contingency(const std::vector<DistributionRow>& rows) {
    std::vector<std::vector<double>> table;
    for (const auto& r : rows) {
        table.push_back({static_cast<double>(r.counts[idx(AssistantStance::Agree)]),
                         static_cast<double>(r.counts[idx(AssistantStance::Disagree)]),
                         static_cast<double>(r.counts[idx(AssistantStance::Neutral)])});
    }
    return table;
}

double FlowGraph::share(const std::string& id) const {
    for (const auto& layer : layers) {
        for (const auto& node : layer) {
            if (node.id == id) return node.share;
        }
    }
    return 0.0;
}

FlowGraph transition_flow(const corpus::Corpus& corpus, const Condition& condition) {
    std::array<std::size_t, kUserStances> user_counts{};
    std::array<std::size_t, kStances> assistant_counts{};
    std::array<std::size_t, corpus::kNumCertainty> certainty_counts{};
    std::array<std::array<std::size_t, kStances>, kUserStances> ua{};
    std::array<std::array<std::size_t, corpus::kNumCertainty>, kStances> ac{};

    FlowGraph g;
    g.condition = condition.label();
    for (const auto& couple : couples(corpus)) {
        if (!matches(condition, couple)) continue;
        const auto u = idx(couple.user->user()->stance);
        const auto a = idx(couple.assistant->assistant()->stance);
        const auto c = idx(couple.assistant->assistant()->certainty);
        ++user_counts[u];
        ++assistant_counts[a];
        ++certainty_counts[c];
        ++ua[u][a];
        ++ac[a][c];
        ++g.couples;
    }
    if (g.couples == 0) return g;
    const double total = static_cast<double>(g.couples);

    auto user_name = [](std::size_t i) { return corpus::to_string(UserStance(i)); };
    auto assistant_name = [](std::size_t i) { return corpus::to_string(AssistantStance(i)); };
    auto certainty_name = [](std::size_t i) { return corpus::to_string(Certainty(i)); };

    auto add_layer = [&](std::size_t layer, const auto& counts, auto name) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0) continue;
            g.layers[layer].push_back({node_id(layer, name(i)), counts[i], static_cast<double>(counts[i]) / total});
        }
    };
    add_layer(0, user_counts, user_name);
    add_layer(1, assistant_counts, assistant_name);
    add_layer(2, certainty_counts, certainty_name);

    for (std::size_t u = 0; u < kUserStances; ++u) {
        for (std::size_t a = 0; a < kStances; ++a) {
            if (ua[u][a] == 0) continue;
            g.edges.push_back({node_id(0, user_name(u)), node_id(1, assistant_name(a)), ua[u][a],
                               static_cast<double>(ua[u][a]) / total});
        }
    }
    for (std::size_t a = 0; a < kStances; ++a) {
        for (std::size_t c = 0; c < corpus::kNumCertainty; ++c) {
            if (ac[a][c] == 0) continue;
            g.edges.push_back({node_id(1, assistant_name(a)), node_id(2, certainty_name(c)), ac[a][c],
                               static_cast<double>(ac[a][c]) / total});
        }
    }
    return g;
}

std::string flow_json(const FlowGraph& g) {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < g.layers.size(); ++l) {
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& n : g.layers[l]) {
            nodes.push_back({{"id", n.id}, {"count", n.count}, {"share", n.share}});
        }
        layers.push_back({{"name", kFlowLayers[l]}, {"nodes", std::move(nodes)}});
    }
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"count", e.count}, {"weight", e.weight}});
    }
    nlohmann::ordered_json doc{{"condition", g.condition},
                               {"couples", g.couples},
                               {"layers", std::move(layers)},
                               {"edges", std::move(edges)}};
    return doc.dump(2) + '\n';
}

std::vector<PositionSample> relative_positions(const corpus::Corpus& corpus, AssistantType type,
                                               Toxicity toxicity) {
    std::vector<PositionSample> out;
    for (const auto& conv : corpus) {
        if (corpus::assistant_type(conv.source) != type) continue;
        const double total = static_cast<double>(conv.turns.size());
        for (const auto& turn : conv.turns) {
            const auto* user = turn.user();
            if (!user || user->toxicity != toxicity) continue;
            out.push_back({conv.id, user->stance, turn.turn_index, static_cast<double>(turn.turn_index) / total});
        }
    }
    return out;
}

std::string positions_csv(const std::vector<PositionSample>& samples) {
    std::string out = "conversation_id,stance,position\n";
    for (const auto& s : samples) {
        out += csv_escape(s.conversation_id) + ',' + std::string(corpus::to_string(s.stance)) + ',' +
               format_double(s.relative_position) + '\n';
    }
    return out;
}

std::vector<double> positions_of(const std::vector<PositionSample>& samples, UserStance stance) {
    std::vector<double> out;
    for (const auto& s : samples) {
        if (s.stance == stance) out.push_back(s.relative_position);
    }
    return out;
}

DifferenceMatrix stance_difference_matrix(const corpus::Corpus& corpus, AssistantType type) {
    // [condition][assistant stance][user stance]
    std::array<std::array<std::array<std::size_t, kUserStances>, kStances>, 2> counts{};
    DifferenceMatrix m;
    m.assistant_type = type;
    for (const auto& couple : couples(corpus)) {
        if (corpus::assistant_type(couple.conversation->source) != type) continue;
        const auto tox = couple.user->user()->toxicity;
        if (tox == Toxicity::Neutral) continue;
        const std::size_t cond = tox == Toxicity::ExplicitToxic ? 0 : 1;
        const auto a = idx(couple.assistant->assistant()->stance);
        ++counts[cond][a][idx(couple.user->user()->stance)];
        ++(cond == 0 ? m.n_explicit : m.n_implicit)[a];
    }
    for (std::size_t a = 0; a < kStances; ++a) {
        if (m.n_explicit[a] == 0 || m.n_implicit[a] == 0) {
            warn("stance_difference_matrix: " + type_label(type) + " has no " +
                 (m.n_explicit[a] == 0 ? "explicit" : "implicit") + " couples with assistant stance " +
                 std::string(corpus::to_string(AssistantStance(a))) + "; column left empty");
            continue;
        }
        for (std::size_t u = 0; u < kUserStances; ++u) {
            const double pe = static_cast<double>(counts[0][a][u]) / static_cast<double>(m.n_explicit[a]);
            const double pi = static_cast<double>(counts[1][a][u]) / static_cast<double>(m.n_implicit[a]);
            m.cells[u][a] = 100.0 * (pe - pi);
        }
    }
    return m;
}

std::string difference_csv(const DifferenceMatrix& m) {
    std::string out = "user_stance";
    for (std::size_t a = 0; a < kStances; ++a) out += ',' + std::string(corpus::to_string(AssistantStance(a)));
    out += '\n';
    for (std::size_t u = 0; u < kUserStances; ++u) {
        out += std::string(corpus::to_string(UserStance(u)));
        for (std::size_t a = 0; a < kStances; ++a) out += ',' + (m.cells[u][a] ? format_fixed(*m.cells[u][a], 1) : "");
        out += '\n';
    }
    out += "n_explicit";
    for (auto n : m.n_explicit) out += ',' + std::to_string(n);
    out += "\nn_implicit";
    for (auto n : m.n_implicit) out += ',' + std::to_string(n);
    out += '\n';
    return out;
}

std::vector<SemRow> per_conversation_sem(const corpus::Corpus& corpus, const Condition& condition) {
    std::map<std::string, std::array<std::size_t, kStances>> per_conv;
    for (const auto& couple : couples(corpus)) {
        if (!matches(condition, couple)) continue;
        ++per_conv[couple.conversation->id][idx(couple.assistant->assistant()->stance)];
    }
    std::vector<SemRow> out;
    const auto k = per_conv.size();
    for (std::size_t s = 0; s < kStances; ++s) {
        SemRow row{condition.label(), AssistantStance(s), k, 0.0, 0.0};
        std::vector<double> shares;
        for (const auto& [id, counts] : per_conv) {
            std::size_t n = 0;
            for (auto c : counts) n += c;
            shares.push_back(100.0 * static_cast<double>(counts[s]) / static_cast<double>(n));
        }
        if (!shares.empty()) {
            double sum = 0.0;
            for (double v : shares) sum += v;
            row.mean_pct = sum / static_cast<double>(k);
        }
        if (k > 1) {
            double ss = 0.0;
            for (double v : shares) ss += (v - row.mean_pct) * (v - row.mean_pct);
            row.sem_pct = std::sqrt(ss / static_cast<double>(k - 1)) / std::sqrt(static_cast<double>(k));
        }
        out.push_back(row);
    }
    return out;
}

std::string sem_csv(const std::vector<SemRow>& rows) {
    std::string out = "condition,stance,conversations,mean_pct,sem_pct\n";
    for (const auto& r : rows) {
        out += csv_escape(r.condition) + ',' + std::string(corpus::to_string(r.stance)) + ',' +
               std::to_string(r.conversations) + ',' + format_fixed(r.mean_pct, 1) + ',' + format_fixed(r.sem_pct, 2) +
               '\n';
    }
    return out;
}

}  // namespace normstance::flows
