#include "normstance/pulearn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "normstance/error.hpp"
#include "normstance/pulearn/fairness.hpp"
#include "normstance/pulearn/objective.hpp"
#include "normstance/util.hpp"

namespace normstance::pulearn {

TrainingSet make_training_set(const std::vector<corpus::StancePair>& pairs, const EmbeddingTable& embeddings) {
    TrainingSet set;
    const auto dim = static_cast<Eigen::Index>(embeddings.dim());
    set.inputs.resize(static_cast<Eigen::Index>(pairs.size()), dim);
    set.ids.reserve(pairs.size());
    set.labels.reserve(pairs.size());
    set.groups.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        auto row = embeddings.at(p.pair_id);
        for (Eigen::Index j = 0; j < dim; ++j) {
            set.inputs(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
        }
        set.ids.push_back(p.pair_id);
        set.labels.push_back(p.label);
        set.groups.push_back(p.group);
    }
    return set;
}

double estimate_class_prior(const TrainingSet& data) {
    if (data.size() == 0) return 0.5;
    const double pos = static_cast<double>(std::count(data.labels.begin(), data.labels.end(), 1));
    return std::clamp(pos / static_cast<double>(data.size()), 0.01, 0.99);
}

int threshold_label(double score) { return score > 0.0 ? 1 : 0; }

Prediction predict(const ScoreModel& model, std::span<const double> embedding) {
    if (embedding.size() != model.input_dim()) {
        throw ValidationError("embedding dimension " + std::to_string(embedding.size()) +
                              " does not match model dimension " + std::to_string(model.input_dim()));
    }
    const double s = model.score(embedding);
    return {s, threshold_label(s)};
}

Prediction predict(const ScoreModel& model, std::span<const float> embedding) {
    std::vector<double> tmp(embedding.begin(), embedding.end());
    return predict(model, std::span<const double>(tmp));
}

double surrogate_tpr_gap(const ScoreModel& model, const TrainingSet& data) {
    const Eigen::VectorXd scores = model.scores(data.inputs);
    std::array<double, 2> sum{};
    std::array<std::size_t, 2> count{};
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] != 1) continue;
        const auto g = static_cast<std::size_t>(data.groups[i]);
        sum[g] += tpr_surrogate(scores[static_cast<Eigen::Index>(i)]);
        ++count[g];
    }
    if (count[0] == 0 || count[1] == 0) return 0.0;
    return std::abs(sum[0] / static_cast<double>(count[0]) - sum[1] / static_cast<double>(count[1]));
}

namespace {

ScoreModel initial_model(const TrainConfig& config, std::size_t dim) {
    if (config.model_kind == ModelKind::Linear) return ScoreModel::linear(dim);
    return ScoreModel::mlp(dim, static_cast<std::size_t>(config.hidden_size),
                           static_cast<std::size_t>(config.hidden_layers), mix_seed(config.seed, 0x1a17));
}

RoundStats end_of_round(int round, const ScoreModel& model, const TrainingSet& data, double risk_sum,
                        double fair_sum, std::size_t batches) {
    RoundStats rs;
    rs.round = round;
    rs.risk = risk_sum / static_cast<double>(batches);
    rs.fairness_penalty = fair_sum / static_cast<double>(batches);

    const Eigen::VectorXd scores = model.scores(data.inputs);
    std::vector<int> predictions(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) predictions[i] = threshold_label(scores[static_cast<Eigen::Index>(i)]);
    // single-group training sets are legal here, so no degenerate-group warnings
    rs.eo_violation = eo_violation_detail(predictions, data.labels, data.groups).value;
    rs.surrogate_tpr_gap = surrogate_tpr_gap(model, data);
    return rs;
}

}  // namespace

TrainedModel train_online(const TrainingSet& data, const TrainConfig& config) {
    config.validate();
    if (data.size() == 0) throw ValidationError("training set is empty");

    TrainedModel result{initial_model(config, data.dim()), config, 0.0, {}};
    result.class_prior = config.class_prior > 0.0 ? config.class_prior : estimate_class_prior(data);

    ScoreModel& model = result.model;
    const std::size_t n = data.size();
    const auto batch_size = static_cast<std::size_t>(config.batch_size);

    std::vector<int> positive_mask(n);
    for (std::size_t i = 0; i < n; ++i) positive_mask[i] = is_labelled_positive(data.labels[i], data.groups[i]);

    std::vector<std::size_t> order(n);
    Eigen::MatrixXd batch_inputs;
    std::vector<int> batch_labels, batch_groups, batch_mask;
    Eigen::VectorXd gradient;
    GroupStats stats;

    for (int round = 1; round <= config.rounds; ++round) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(round)));
        std::shuffle(order.begin(), order.end(), rng);
        stats.begin_round();

        const double step = config.step_size(round);
        double risk_sum = 0.0, fair_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t end = std::min(n, start + batch_size);
            const auto b = static_cast<Eigen::Index>(end - start);
            batch_inputs.resize(b, data.inputs.cols());
            batch_labels.resize(end - start);
            batch_groups.resize(end - start);
            batch_mask.resize(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t row = order[k];
                batch_inputs.row(static_cast<Eigen::Index>(k - start)) = data.inputs.row(static_cast<Eigen::Index>(row));
                batch_labels[k - start] = data.labels[row];
                batch_groups[k - start] = data.groups[row];
                batch_mask[k - start] = positive_mask[row];
            }

            const BatchView batch{batch_inputs, batch_labels, batch_groups, batch_mask};
            const auto terms = evaluate_objective(model, batch, config, result.class_prior, stats, &gradient);
            if (!std::isfinite(terms.total)) throw NonFiniteError(round, batches, "objective");

            model.parameters() -= step * gradient;
            if (!model.parameters().allFinite()) throw NonFiniteError(round, batches, "parameters");

            for (int g = 0; g < 2; ++g) {
                const auto gi = static_cast<std::size_t>(g);
                if (terms.fair.batch_positives[gi] > 0) {
                    stats.observe(g, terms.fair.batch_sum[gi], terms.fair.batch_positives[gi]);
                }
            }
            risk_sum += terms.risk;
            fair_sum += terms.fairness;
            ++batches;
        }
        result.history.push_back(end_of_round(round, model, data, risk_sum, fair_sum, batches));
    }
    return result;
}

std::string history_csv(const std::vector<RoundStats>& history) {
    std::string out = "round,risk,fairness_penalty,eo_violation\n";
    for (const auto& r : history) {
        out += std::to_string(r.round) + ',' + format_double(r.risk) + ',' + format_double(r.fairness_penalty) + ',' +
               format_double(r.eo_violation) + '\n';
    }
    return out;
}

}  // namespace normstance::pulearn
