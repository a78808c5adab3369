#include "normstance/pulearn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace normstance::pulearn {

double double_hinge(double z) { return std::max(-z, std::max(0.0, 0.5 * (1.0 - z))); }

double double_hinge_slope(double z) {
    if (z < -1.0) return -1.0;
    if (z < 1.0) return -0.5;
    return 0.0;
}

double logistic_loss(double z) {
    // log(1 + exp(-z)) without overflow
    return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double logistic_slope(double z) {
    // -1 / (1 + exp(z))
    if (z >= 0) {
        const double e = std::exp(-z);
        return -e / (1.0 + e);
    }
    return -1.0 / (1.0 + std::exp(z));
}

double margin_loss(LossKind kind, double z) {
    return kind == LossKind::DoubleHinge ? double_hinge(z) : logistic_loss(z);
}

double margin_slope(LossKind kind, double z) {
    return kind == LossKind::DoubleHinge ? double_hinge_slope(z) : logistic_slope(z);
}

double pn_risk(std::span<const double> scores, std::span<const int> labels, LossKind kind,
               std::span<double> dscores) {
    if (scores.size() != labels.size()) throw std::invalid_argument("pn_risk: scores/labels length mismatch");
    if (scores.empty()) throw std::invalid_argument("pn_risk: empty batch");
    const double inv_n = 1.0 / static_cast<double>(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double y = labels[i] == 1 ? 1.0 : -1.0;
        const double z = y * scores[i];
        total += margin_loss(kind, z);
        if (!dscores.empty()) dscores[i] += inv_n * y * margin_slope(kind, z);
    }
    return total * inv_n;
}

PuRisk pu_risk(std::span<const double> scores, std::span<const int> positive_mask, double prior,
               double prior_weight, LossKind kind, std::span<double> dscores) {
    if (scores.size() != positive_mask.size()) throw std::invalid_argument("pu_risk: length mismatch");
    if (scores.empty()) throw std::invalid_argument("pu_risk: batch has no positive and no unlabelled examples");
    if (!(prior > 0.0 && prior < 1.0)) throw std::invalid_argument("pu_risk: class prior must lie in (0, 1)");

    std::size_t n_pos = 0;
    for (int m : positive_mask) n_pos += m != 0;
    const std::size_t n_unl = scores.size() - n_pos;

    double pos_plus = 0.0, pos_minus = 0.0, unl_minus = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (positive_mask[i] != 0) {
            pos_plus += margin_loss(kind, scores[i]);
            pos_minus += margin_loss(kind, -scores[i]);
        } else {
            unl_minus += margin_loss(kind, -scores[i]);
        }
    }
    const double inv_pos = n_pos > 0 ? 1.0 / static_cast<double>(n_pos) : 0.0;
    const double inv_unl = n_unl > 0 ? 1.0 / static_cast<double>(n_unl) : 0.0;

    PuRisk r;
    r.positive_term = prior * pos_plus * inv_pos;
    r.negative_term = unl_minus * inv_unl - prior * pos_minus * inv_pos;
    r.clamped = r.negative_term < 0.0;
    r.value = r.positive_term + (r.clamped ? 0.0 : r.negative_term);

    if (!dscores.empty()) {
        const double neg_scale = r.clamped ? -prior_weight : 1.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double s = scores[i];
            if (positive_mask[i] != 0) {
                // d/ds l(s) = slope(s); d/ds l(-s) = -slope(-s)
                dscores[i] += prior * inv_pos * margin_slope(kind, s);
                dscores[i] += neg_scale * (-prior * inv_pos) * (-margin_slope(kind, -s));
            } else {
                dscores[i] += neg_scale * inv_unl * (-margin_slope(kind, -s));
            }
        }
    }
    return r;
}

}  // namespace normstance::pulearn
