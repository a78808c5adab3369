#include "invariants.hpp"

#include <cmath>
#include <map>

#include "normstance/util.hpp"

namespace normstance::testkit {

using namespace normstance::flows;

std::vector<Condition> all_conditions() {
    std::vector<Condition> out{Condition{}};
    for (std::size_t t = 0; t < corpus::kNumToxicity; ++t) {
        const auto tox = static_cast<Toxicity>(t);
        out.push_back({std::nullopt, std::nullopt, tox, std::nullopt});
        for (std::size_t s = 0; s < corpus::kNumSources; ++s) {
            out.push_back({static_cast<Source>(s), std::nullopt, tox, std::nullopt});
        }
        for (auto type : {AssistantType::Human, AssistantType::LLM}) {
            out.push_back({std::nullopt, type, tox, std::nullopt});
        }
    }
    return out;
}

std::vector<std::string> flow_invariant_violations(const corpus::Corpus& corpus) {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };

    for (const auto& condition : all_conditions()) {
        const auto label = condition.label();
        const auto graph = transition_flow(corpus, condition);
        if (graph.couples > 0) {
            for (std::size_t l = 0; l < graph.layers.size(); ++l) {
                double sum = 0.0;
                for (const auto& node : graph.layers[l]) sum += node.share;
                check(std::abs(sum - 1.0) <= 1e-9, label + ": layer " + std::to_string(l) + " sums to " +
                                                       format_double(sum));
            }
            std::map<std::string, double> out_weight, in_weight;
            for (const auto& e : graph.edges) {
                out_weight[e.from] += e.weight;
                in_weight[e.to] += e.weight;
            }
            for (std::size_t l = 0; l + 1 < graph.layers.size(); ++l) {
                for (const auto& node : graph.layers[l]) {
                    check(std::abs(out_weight[node.id] - node.share) <= 1e-9, label + ": edges out of " + node.id);
                }
                double inbound = 0.0;
                for (const auto& node : graph.layers[l + 1]) {
                    inbound += in_weight[node.id];
                    check(std::abs(in_weight[node.id] - node.share) <= 1e-9, label + ": edges into " + node.id);
                }
                check(std::abs(inbound - 1.0) <= 1e-9, label + ": inbound mass at layer " + std::to_string(l + 1));
            }
        } else {
            check(graph.edges.empty(), label + ": edges without couples");
        }

        const auto row = stance_distribution(corpus, condition);
        if (row.n > 0) {
            double sum = 0.0;
            for (double p : *row.percent) sum += p;
            check(std::abs(sum - 100.0) <= 1e-6, label + ": distribution sums to " + format_double(sum));
        } else {
            check(!row.percent.has_value(), label + ": empty row has percentages");
        }
    }

    WarningCapture quiet;
    for (auto type : {AssistantType::Human, AssistantType::LLM}) {
        const auto m = stance_difference_matrix(corpus, type);
        for (std::size_t a = 0; a < corpus::kNumAssistantStances; ++a) {
            double sum = 0.0;
            for (std::size_t u = 0; u < corpus::kNumUserStances; ++u) sum += m.cells[u][a].value_or(0.0);
            check(std::abs(sum) <= 1e-9, "difference column " + std::to_string(a) + " sums to " + format_double(sum));
        }
    }
    return bad;
}

}  // namespace normstance::testkit
