#pragma once
// Equal Opportunity across the implicit (0) and explicit (1) groups: a
// differentiable surrogate used as a training penalty, and the hard-label
// violation used for reporting.

#include <array>
#include <cstddef>
#include <span>

namespace normstance::pulearn {

// Hinge-style soft "predicted positive" indicator, clamp((1 + s) / 2, 0, 1).
double tpr_surrogate(double score);

// Running per-group surrogate TPR over the positives seen in the current
// round. At the start of a round the counts reset, and the previous round's
// estimate stays available as a fallback until the group is observed again.
class GroupStats {
public:
    void begin_round();
    void observe(int group, double surrogate_sum, std::size_t positives);

    bool has_estimate(int group) const;
    double estimate(int group) const;  // in [0, 1]
    std::size_t positives(int group) const { return count_[static_cast<std::size_t>(group)]; }

private:
    std::array<double, 2> sum_{};
    std::array<std::size_t, 2> count_{};
    std::array<double, 2> fallback_{};
    std::array<bool, 2> has_fallback_{};
};

struct FairnessTerm {
    double penalty = 0.0;
    std::array<double, 2> tpr{};            // surrogate TPR used per group
    std::array<bool, 2> from_batch{};       // false -> running estimate or absent
    std::array<double, 2> batch_sum{};      // surrogate sum over batch positives
    std::array<std::size_t, 2> batch_positives{};
};

// lambda_fair * |TPR_0 - TPR_1| with TPR_g the mean surrogate over positive
// (label 1) batch members of group g. A group with no batch positives uses
// the running estimate from `stats`; the penalty is 0 when either group has
// neither. Substituted estimates are constants for the gradient.
FairnessTerm fairness_penalty(std::span<const double> scores, std::span<const int> labels,
                              std::span<const int> groups, double lambda_fair, const GroupStats& stats,
                              std::span<double> dscores = {});

struct EoBreakdown {
    double value = 0.0;
    bool tpr_degenerate = false;  // a group has no positives
    bool tnr_degenerate = false;  // a group has no negatives
};

// Same as eo_violation without emitting warnings.
EoBreakdown eo_violation_detail(std::span<const int> predictions, std::span<const int> labels,
                                std::span<const int> groups);

// 0.5 * (|TPR_0 - TPR_1| + |TNR_0 - TNR_1|) from hard predictions. If a group
// has no positives (negatives) the TPR (TNR) gap term is 0 and a warning is
// emitted. Throws std::invalid_argument on empty or mismatched input.
double eo_violation(std::span<const int> predictions, std::span<const int> labels, std::span<const int> groups);

}  // namespace normstance::pulearn
