#pragma once

#include <span>

#include <Eigen/Dense>

#include "normstance/pulearn/config.hpp"
#include "normstance/pulearn/fairness.hpp"
#include "normstance/pulearn/loss.hpp"
#include "normstance/pulearn/model.hpp"

namespace normstance::pulearn {

struct BatchView {
    const Eigen::MatrixXd& inputs;      // one row per example
    std::span<const int> labels;        // 1 Agree, 0 Disagree
    std::span<const int> groups;        // 0 implicit, 1 explicit
    std::span<const int> positive_mask; // PU mode: labelled positives
};

struct ObjectiveTerms {
    double risk = 0.0;
    double fairness = 0.0;
    double l2 = 0.0;
    double total = 0.0;
    FairnessTerm fair;
    PuRisk pu;
};

double l2_penalty(const Eigen::VectorXd& params, double lambda_reg);

// risk + fairness penalty + lambda_reg * ||theta||^2 on one batch. When
// `gradient` is non-null it receives the (sub)gradient w.r.t. the flat
// parameters.
ObjectiveTerms evaluate_objective(const ScoreModel& model, const BatchView& batch, const TrainConfig& config,
                                  double class_prior, const GroupStats& stats, Eigen::VectorXd* gradient);

// PU labelled-positive rule: Agree pairs from the explicit group.
int is_labelled_positive(int label, int group);

}  // namespace normstance::pulearn
