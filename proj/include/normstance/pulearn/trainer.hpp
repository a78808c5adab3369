#pragma once
// Online (mini-batch) training of fairness-penalized stance scorers.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "normstance/corpus.hpp"
#include "normstance/embeddings.hpp"
#include "normstance/pulearn/config.hpp"
#include "normstance/pulearn/model.hpp"

namespace normstance::pulearn {

// Dense design matrix plus per-row labels and groups.
struct TrainingSet {
    std::vector<std::string> ids;
    Eigen::MatrixXd inputs;
    std::vector<int> labels;
    std::vector<int> groups;

    std::size_t size() const noexcept { return ids.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(inputs.cols()); }
};

// Throws ValidationError naming the first pair without an embedding.
TrainingSet make_training_set(const std::vector<corpus::StancePair>& pairs, const EmbeddingTable& embeddings);

struct RoundStats {
    int round = 0;
    double risk = 0.0;              // mean batch risk over the round
    double fairness_penalty = 0.0;  // mean batch penalty over the round
    double eo_violation = 0.0;      // hard labels on the full training set, end of round
    double surrogate_tpr_gap = 0.0; // |TPR_0 - TPR_1| of the surrogate on the full training set
};

struct TrainedModel {
    ScoreModel model;
    TrainConfig config;
    double class_prior = 0.0;
    std::vector<RoundStats> history;
};

// Fraction of label-1 rows, clamped into [0.01, 0.99].
double estimate_class_prior(const TrainingSet& data);

// Runs config.rounds passes. Each pass shuffles the rows with a seed derived
// from (config.seed, round), consumes batches of config.batch_size and takes
// one gradient step per batch. Deterministic for a fixed seed.
// Throws ValidationError for an empty set or invalid config and
// NonFiniteError when the objective or parameters stop being finite.
TrainedModel train_online(const TrainingSet& data, const TrainConfig& config);

struct Prediction {
    double score = 0.0;
    int label = 0;
};

// label = 1 iff score > 0; a zero score predicts Disagree.
int threshold_label(double score);
Prediction predict(const ScoreModel& model, std::span<const float> embedding);
Prediction predict(const ScoreModel& model, std::span<const double> embedding);

// Surrogate TPR gap of `model` over all positives in `data`.
double surrogate_tpr_gap(const ScoreModel& model, const TrainingSet& data);

std::string history_csv(const std::vector<RoundStats>& history);

}  // namespace normstance::pulearn
