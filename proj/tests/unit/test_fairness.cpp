#include <gtest/gtest.h>

#include <vector>

#include "normstance/pulearn/fairness.hpp"
#include "normstance/util.hpp"

using namespace normstance;
using namespace normstance::pulearn;

TEST(Surrogate, ClampsIntoUnitInterval) {
    EXPECT_EQ(tpr_surrogate(-3.0), 0.0);
    EXPECT_EQ(tpr_surrogate(0.0), 0.5);
    EXPECT_EQ(tpr_surrogate(1.0), 1.0);
    EXPECT_EQ(tpr_surrogate(7.0), 1.0);
}

TEST(FairnessPenalty, SymmetricGroupsGiveZero) {
    const std::vector<double> s{0.4, -0.2, 0.4, -0.2};
    const std::vector<int> y{1, 1, 1, 1};
    const std::vector<int> g{0, 0, 1, 1};
    EXPECT_EQ(fairness_penalty(s, y, g, 0.1, GroupStats{}).penalty, 0.0);
}

TEST(FairnessPenalty, ExtremeGap) {
    const std::vector<double> s{1.0, -1.0};
    const std::vector<int> y{1, 1};
    const std::vector<int> g{0, 1};
    EXPECT_DOUBLE_EQ(fairness_penalty(s, y, g, 0.1, GroupStats{}).penalty, 0.1);
}

TEST(FairnessPenalty, MixedSixExampleHandValue) {
    // group 0 positives: 0.8, 0.4, 1.0 -> 2.2 / 3; group 1 positives: 0.5, 0.9 -> 0.7.
    // The -1.5 score is a negative and does not count.
    const std::vector<double> s{0.6, -0.2, 1.4, 0.0, -1.5, 0.8};
    const std::vector<int> y{1, 1, 1, 1, 0, 1};
    const std::vector<int> g{0, 0, 0, 1, 1, 1};
    const auto t = fairness_penalty(s, y, g, 0.1, GroupStats{});
    EXPECT_NEAR(t.tpr[0], 2.2 / 3.0, 1e-15);
    EXPECT_NEAR(t.tpr[1], 0.7, 1e-15);
    EXPECT_NEAR(t.penalty, 0.1 * (2.2 / 3.0 - 0.7), 1e-15);
}

TEST(FairnessPenalty, MissingGroupUsesRunningEstimate) {
    GroupStats stats;
    const std::vector<double> s{0.6};
    const std::vector<int> y{1};
    const std::vector<int> g{0};
    EXPECT_EQ(fairness_penalty(s, y, g, 0.1, stats).penalty, 0.0);

    stats.observe(1, 0.3, 1);
    auto t = fairness_penalty(s, y, g, 0.1, stats);
    EXPECT_FALSE(t.from_batch[1]);
    EXPECT_NEAR(t.penalty, 0.1 * (0.8 - 0.3), 1e-15);

    std::vector<double> d(1, 0.0);
    fairness_penalty(s, y, g, 0.1, stats, d);
    EXPECT_NEAR(d[0], 0.1 * 0.5, 1e-15);

    // a new round keeps the previous mean as fallback until the group reappears
    stats.begin_round();
    EXPECT_TRUE(stats.has_estimate(1));
    EXPECT_NEAR(stats.estimate(1), 0.3, 1e-15);
    EXPECT_EQ(stats.positives(1), 0u);
    EXPECT_FALSE(stats.has_estimate(0));
}

TEST(EoViolation, IdenticalRatesGiveZero) {
    const std::vector<int> p{1, 0, 1, 0};
    const std::vector<int> y{1, 0, 1, 0};
    const std::vector<int> g{0, 0, 1, 1};
    EXPECT_EQ(eo_violation(p, y, g), 0.0);
}

TEST(EoViolation, TprGapOnly) {
    const std::vector<int> p{1, 0, 0, 0};
    const std::vector<int> y{1, 0, 1, 0};
    const std::vector<int> g{0, 0, 1, 1};
    EXPECT_DOUBLE_EQ(eo_violation(p, y, g), 0.5);
}

TEST(EoViolation, TwelveExampleConstructedSet) {
    // group 0: TPR 2/3, TNR 2/3. group 1: TPR 1/2, TNR 2/4.
    const std::vector<int> y{1, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0};
    const std::vector<int> p{1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1};
    const std::vector<int> g{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    EXPECT_NEAR(eo_violation(p, y, g), 0.5 * (1.0 / 6.0 + 1.0 / 6.0), 1e-15);
}

TEST(EoViolation, DegenerateGroupWarnsAndDropsTerm) {
    const std::vector<int> p{1, 0, 0};
    const std::vector<int> y{1, 0, 0};
    const std::vector<int> g{0, 0, 1};
    WarningCapture capture;
    EXPECT_DOUBLE_EQ(eo_violation(p, y, g), 0.0);
    EXPECT_EQ(capture.messages().size(), 1u);
    EXPECT_THROW(eo_violation(std::vector<int>{}, std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
}
