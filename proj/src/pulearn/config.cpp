#include "normstance/pulearn/config.hpp"

#include <array>
#include <cmath>

#include "normstance/error.hpp"

namespace normstance::pulearn {

TrainConfig TrainConfig::linear_defaults() {
    TrainConfig c;
    c.model_kind = ModelKind::Linear;
    c.batch_size = 1;
    c.learning_rate = 0.005;
    c.eta = 0.005;
    c.lambda_reg = 0.01;
    c.lambda_fair = 0.1;
    c.rounds = 30;
    return c;
}

TrainConfig TrainConfig::mlp_defaults() {
    TrainConfig c;
    c.model_kind = ModelKind::Mlp;
    c.hidden_size = 128;
    c.hidden_layers = 2;
    c.batch_size = 32;
    c.learning_rate = 0.002;
    c.eta = 0.002;
    c.lambda_reg = 0.005;
    c.lambda_fair = 0.05;
    c.rounds = 50;
    return c;
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("invalid training config: ") + what);
    };
    require(rounds >= 1, "rounds must be >= 1");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(n_experiments >= 1, "n_experiments must be >= 1");
    require(std::isfinite(learning_rate) && learning_rate >= 0.0, "learning_rate must be finite and >= 0");
    require(std::isfinite(eta) && eta >= 0.0, "eta must be finite and >= 0");
    require(std::isfinite(lambda_reg) && lambda_reg >= 0.0, "lambda_reg must be finite and >= 0");
    require(std::isfinite(lambda_fair) && lambda_fair >= 0.0, "lambda_fair must be finite and >= 0");
    require(std::isfinite(prior_weight_s) && prior_weight_s >= 0.0, "prior_weight_s must be finite and >= 0");
    require(class_prior <= 0.0 || class_prior < 1.0, "class_prior must lie in (0, 1) or be unset");
    if (model_kind == ModelKind::Mlp) {
        require(hidden_size >= 1, "MLP hidden_size must be >= 1");
        require(hidden_layers >= 1, "MLP hidden_layers must be >= 1");
    }
}

double TrainConfig::step_size(int round) const {
    switch (decay) {
        case StepDecay::InverseSqrt:
            return eta / std::sqrt(static_cast<double>(round));
        case StepDecay::None:
        default:
            return eta;
    }
}

namespace {

template <typename E, std::size_t N>
E parse_named(std::string_view s, const std::array<std::string_view, N>& names, const char* what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    throw ValidationError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::string_view, 2> kModelKinds{"linear", "mlp"};
constexpr std::array<std::string_view, 2> kLossKinds{"double_hinge", "logistic"};
constexpr std::array<std::string_view, 2> kModes{"pn", "pu"};
constexpr std::array<std::string_view, 2> kFairness{"eo", "none"};
constexpr std::array<std::string_view, 2> kDecay{"none", "inverse_sqrt"};

}  // namespace

std::string_view to_string(ModelKind v) { return kModelKinds[static_cast<std::size_t>(v)]; }
std::string_view to_string(LossKind v) { return kLossKinds[static_cast<std::size_t>(v)]; }
std::string_view to_string(LearningMode v) { return kModes[static_cast<std::size_t>(v)]; }
std::string_view to_string(FairnessKind v) { return kFairness[static_cast<std::size_t>(v)]; }
std::string_view to_string(StepDecay v) { return kDecay[static_cast<std::size_t>(v)]; }

ModelKind parse_model_kind(std::string_view s) { return parse_named<ModelKind>(s, kModelKinds, "model kind"); }
LossKind parse_loss_kind(std::string_view s) {
    if (s == "dh") return LossKind::DoubleHinge;
    return parse_named<LossKind>(s, kLossKinds, "loss kind");
}
LearningMode parse_learning_mode(std::string_view s) { return parse_named<LearningMode>(s, kModes, "learning mode"); }
FairnessKind parse_fairness_kind(std::string_view s) {
    if (s == "equal_opportunity") return FairnessKind::EqualOpportunity;
    return parse_named<FairnessKind>(s, kFairness, "fairness kind");
}
StepDecay parse_step_decay(std::string_view s) { return parse_named<StepDecay>(s, kDecay, "step decay"); }

}  // namespace normstance::pulearn
