#include "normstance/pulearn/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "normstance/util.hpp"

namespace normstance::pulearn {

double tpr_surrogate(double score) { return std::clamp(0.5 * (1.0 + score), 0.0, 1.0); }

void GroupStats::begin_round() {
    for (std::size_t g = 0; g < 2; ++g) {
        if (count_[g] > 0) {
            fallback_[g] = sum_[g] / static_cast<double>(count_[g]);
            has_fallback_[g] = true;
        }
        sum_[g] = 0.0;
        count_[g] = 0;
    }
}

void GroupStats::observe(int group, double surrogate_sum, std::size_t positives) {
    const auto g = static_cast<std::size_t>(group);
    sum_[g] += surrogate_sum;
    count_[g] += positives;
}

bool GroupStats::has_estimate(int group) const {
    const auto g = static_cast<std::size_t>(group);
    return count_[g] > 0 || has_fallback_[g];
}

double GroupStats::estimate(int group) const {
    const auto g = static_cast<std::size_t>(group);
    if (count_[g] > 0) return std::clamp(sum_[g] / static_cast<double>(count_[g]), 0.0, 1.0);
    return has_fallback_[g] ? std::clamp(fallback_[g], 0.0, 1.0) : 0.0;
}

FairnessTerm fairness_penalty(std::span<const double> scores, std::span<const int> labels,
                              std::span<const int> groups, double lambda_fair, const GroupStats& stats,
                              std::span<double> dscores) {
    if (scores.size() != labels.size() || scores.size() != groups.size()) {
        throw std::invalid_argument("fairness_penalty: length mismatch");
    }
    FairnessTerm term;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        const auto g = static_cast<std::size_t>(groups[i]);
        term.batch_sum[g] += tpr_surrogate(scores[i]);
        ++term.batch_positives[g];
    }

    std::array<bool, 2> available{};
    for (std::size_t g = 0; g < 2; ++g) {
        if (term.batch_positives[g] > 0) {
            term.tpr[g] = term.batch_sum[g] / static_cast<double>(term.batch_positives[g]);
            term.from_batch[g] = true;
            available[g] = true;
        } else if (stats.has_estimate(static_cast<int>(g))) {
            term.tpr[g] = stats.estimate(static_cast<int>(g));
            available[g] = true;
        }
    }
    if (!available[0] || !available[1]) return term;

    const double gap = term.tpr[0] - term.tpr[1];
    term.penalty = lambda_fair * std::abs(gap);

    if (!dscores.empty() && gap != 0.0 && lambda_fair != 0.0) {
        const double sign = gap > 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (labels[i] != 1) continue;
            const auto g = static_cast<std::size_t>(groups[i]);
            if (!term.from_batch[g]) continue;
            // surrogate slope is 1/2 strictly inside (-1, 1), 0 on the clamped sides and at the kinks
            const double s = scores[i];
            if (!(s > -1.0 && s < 1.0)) continue;
            const double group_sign = g == 0 ? 1.0 : -1.0;
            dscores[i] += lambda_fair * sign * group_sign * 0.5 / static_cast<double>(term.batch_positives[g]);
        }
    }
    return term;
}

EoBreakdown eo_violation_detail(std::span<const int> predictions, std::span<const int> labels,
                                std::span<const int> groups) {
    if (predictions.size() != labels.size() || predictions.size() != groups.size()) {
        throw std::invalid_argument("eo_violation: length mismatch");
    }
    if (predictions.empty()) throw std::invalid_argument("eo_violation: empty input");

    // [group][label] -> (correct, total)
    std::array<std::array<std::size_t, 2>, 2> correct{}, total{};
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        const auto y = static_cast<std::size_t>(labels[i]);
        ++total[g][y];
        correct[g][y] += predictions[i] == labels[i];
    }
    auto rate = [&](std::size_t g, std::size_t y) {
        return static_cast<double>(correct[g][y]) / static_cast<double>(total[g][y]);
    };

    EoBreakdown out;
    double tpr_gap = 0.0, tnr_gap = 0.0;
    if (total[0][1] > 0 && total[1][1] > 0) {
        tpr_gap = std::abs(rate(0, 1) - rate(1, 1));
    } else {
        out.tpr_degenerate = true;
    }
    if (total[0][0] > 0 && total[1][0] > 0) {
        tnr_gap = std::abs(rate(0, 0) - rate(1, 0));
    } else {
        out.tnr_degenerate = true;
    }
    out.value = 0.5 * (tpr_gap + tnr_gap);
    return out;
}

double eo_violation(std::span<const int> predictions, std::span<const int> labels, std::span<const int> groups) {
    const auto eo = eo_violation_detail(predictions, labels, groups);
    if (eo.tpr_degenerate) warn("eo_violation: a group has no positives; TPR gap taken as 0");
    if (eo.tnr_degenerate) warn("eo_violation: a group has no negatives; TNR gap taken as 0");
    return eo.value;
}

}  // namespace normstance::pulearn
