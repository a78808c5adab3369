#pragma once
// Margin losses and the empirical risks built from them.
//
// Scores are pre-threshold classifier outputs f(x); margins are z = y * f(x)
// with y in {-1, +1}. Risk functions optionally accumulate dRisk/dscore into
// a caller-provided span of the same length as `scores`.

#include <cstdint>
#include <span>

namespace normstance::pulearn {

enum class LossKind : std::uint8_t { DoubleHinge, Logistic };

// max(-z, max(0, (1 - z) / 2)); satisfies l(z) - l(-z) = -z.
double double_hinge(double z);

// Subgradient of double_hinge. At the kinks the flatter side is used:
// z = 1 -> 0, z = -1 -> -1/2.
double double_hinge_slope(double z);

double logistic_loss(double z);
double logistic_slope(double z);

double margin_loss(LossKind kind, double z);
double margin_slope(LossKind kind, double z);

// Mean of loss(y_signed * score) over the batch, y_signed = 2 * label - 1.
// The L2 term is added by the objective, not here.
double pn_risk(std::span<const double> scores, std::span<const int> labels, LossKind kind,
               std::span<double> dscores = {});

struct PuRisk {
    double value = 0.0;
    double positive_term = 0.0;    // prior * R_p+
    double negative_term = 0.0;    // R_u- - prior * R_p-  (before clamping)
    bool clamped = false;          // negative_term < 0
};

// Non-negative PU risk:
//   R = prior * R_p+ + max(0, R_u- - prior * R_p-)
// where R_p+/R_p- are mean losses of labelled positives treated as +1/-1 and
// R_u- is the mean loss of unlabelled examples treated as -1. Empty parts
// contribute 0. When the clamp is active the gradient of the negative term is
// reversed and scaled by `prior_weight` (gradient ascent on the violating
// term); the returned value is unaffected by `prior_weight`.
// Throws std::invalid_argument on an empty batch or a prior outside (0, 1).
PuRisk pu_risk(std::span<const double> scores, std::span<const int> positive_mask, double prior,
               double prior_weight, LossKind kind, std::span<double> dscores = {});

}  // namespace normstance::pulearn
