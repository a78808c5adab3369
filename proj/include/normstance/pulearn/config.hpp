#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "normstance/pulearn/loss.hpp"
#include "normstance/pulearn/model.hpp"

namespace normstance::pulearn {

enum class LearningMode : std::uint8_t { PN, PU };
enum class FairnessKind : std::uint8_t { EqualOpportunity, None };
enum class StepDecay : std::uint8_t { None, InverseSqrt };

struct TrainConfig {
    ModelKind model_kind = ModelKind::Linear;
    int hidden_size = 0;
    int hidden_layers = 0;
    int batch_size = 1;
    double learning_rate = 0.005;   // base rate for the step schedule
    double eta = 0.005;             // effective step size
    StepDecay decay = StepDecay::None;
    LossKind loss_kind = LossKind::DoubleHinge;
    LearningMode learning_mode = LearningMode::PN;
    double class_prior = 0.0;       // <= 0: estimate from training labels
    double prior_weight_s = 0.1;
    FairnessKind fairness_kind = FairnessKind::EqualOpportunity;
    double lambda_reg = 0.01;       // L2
    double lambda_fair = 0.1;
    int rounds = 30;
    int n_experiments = 5;
    std::uint64_t seed = 0;

    static TrainConfig linear_defaults();
    static TrainConfig mlp_defaults();

    // Throws ValidationError describing the first violated constraint.
    void validate() const;

    // Step size used in `round` (1-based).
    double step_size(int round) const;
};

std::string_view to_string(ModelKind v);
std::string_view to_string(LossKind v);
std::string_view to_string(LearningMode v);
std::string_view to_string(FairnessKind v);
std::string_view to_string(StepDecay v);

ModelKind parse_model_kind(std::string_view s);
LossKind parse_loss_kind(std::string_view s);
LearningMode parse_learning_mode(std::string_view s);
FairnessKind parse_fairness_kind(std::string_view s);
StepDecay parse_step_decay(std::string_view s);

}  // namespace normstance::pulearn
