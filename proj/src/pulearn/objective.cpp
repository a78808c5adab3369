#include "normstance/pulearn/objective.hpp"

#include <vector>

namespace normstance::pulearn {

double l2_penalty(const Eigen::VectorXd& params, double lambda_reg) { return lambda_reg * params.squaredNorm(); }

int is_labelled_positive(int label, int group) { return label == 1 && group == 1 ? 1 : 0; }

ObjectiveTerms evaluate_objective(const ScoreModel& model, const BatchView& batch, const TrainConfig& config,
                                  double class_prior, const GroupStats& stats, Eigen::VectorXd* gradient) {
    const auto fwd = model.forward(batch.inputs);
    const std::span<const double> scores(fwd.scores.data(), static_cast<std::size_t>(fwd.scores.size()));

    Eigen::VectorXd dscores;
    std::span<double> ds;
    if (gradient != nullptr) {
        dscores = Eigen::VectorXd::Zero(fwd.scores.size());
        ds = std::span<double>(dscores.data(), static_cast<std::size_t>(dscores.size()));
    }

    ObjectiveTerms terms;
    if (config.learning_mode == LearningMode::PN) {
        terms.risk = pn_risk(scores, batch.labels, config.loss_kind, ds);
    } else {
        terms.pu = pu_risk(scores, batch.positive_mask, class_prior, config.prior_weight_s, config.loss_kind, ds);
        terms.risk = terms.pu.value;
    }

    if (config.fairness_kind == FairnessKind::EqualOpportunity) {
        terms.fair = fairness_penalty(scores, batch.labels, batch.groups, config.lambda_fair, stats, ds);
        terms.fairness = terms.fair.penalty;
    } else {
        // still track batch surrogates so the running estimates stay meaningful
        terms.fair = fairness_penalty(scores, batch.labels, batch.groups, 0.0, stats);
    }

    terms.l2 = l2_penalty(model.parameters(), config.lambda_reg);
    terms.total = terms.risk + terms.fairness + terms.l2;

    if (gradient != nullptr) {
        *gradient = model.gradient(batch.inputs, fwd, dscores);
        *gradient += 2.0 * config.lambda_reg * model.parameters();
    }
    return terms;
}

}  // namespace normstance::pulearn
