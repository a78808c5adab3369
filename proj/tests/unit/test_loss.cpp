#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "normstance/pulearn/loss.hpp"

using namespace normstance::pulearn;

namespace {

double hinge_oracle(double z) {
    if (z <= -1.0) return -z;
    if (z < 1.0) return (1.0 - z) / 2.0;
    return 0.0;
}

}  // namespace

TEST(DoubleHinge, AnalyticValues) {
    EXPECT_EQ(double_hinge(1.0), 0.0);
    EXPECT_EQ(double_hinge(0.0), 0.5);
    EXPECT_EQ(double_hinge(-2.0), 2.0);
}

TEST(DoubleHinge, ClosedFormAndSymmetry) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = u(rng);
        EXPECT_DOUBLE_EQ(double_hinge(z), hinge_oracle(z));
        EXPECT_NEAR(double_hinge(z) - double_hinge(-z), -z, 1e-12);
        EXPECT_GE(double_hinge(z), 0.0);
    }
}

TEST(DoubleHinge, SlopeAtKinksTakesFlatterSide) {
    EXPECT_EQ(double_hinge_slope(1.0), 0.0);
    EXPECT_EQ(double_hinge_slope(-1.0), -0.5);
    EXPECT_EQ(double_hinge_slope(-3.0), -1.0);
    EXPECT_EQ(double_hinge_slope(0.2), -0.5);
    EXPECT_EQ(double_hinge_slope(4.0), 0.0);
}

TEST(Logistic, StableAtExtremes) {
    EXPECT_NEAR(logistic_loss(0.0), std::log(2.0), 1e-15);
    EXPECT_TRUE(std::isfinite(logistic_loss(-800.0)));
    EXPECT_NEAR(logistic_loss(-800.0), 800.0, 1e-9);
    EXPECT_NEAR(logistic_slope(0.0), -0.5, 1e-15);
}

TEST(PnRisk, Examples) {
    const std::vector<double> unit{1.0, -1.0, 1.0};
    const std::vector<int> unit_labels{1, 0, 1};
    EXPECT_EQ(pn_risk(unit, unit_labels, LossKind::DoubleHinge), 0.0);

    const std::vector<double> zero{0.0};
    const std::vector<int> one{1};
    EXPECT_EQ(pn_risk(zero, one, LossKind::DoubleHinge), 0.5);

    // margins 2, 0.5, 0.5 -> losses 0, 0.25, 0.25
    const std::vector<double> s{2.0, 0.5, -0.5};
    const std::vector<int> y{1, 1, 0};
    EXPECT_NEAR(pn_risk(s, y, LossKind::DoubleHinge), 0.5 / 3.0, 1e-15);

    EXPECT_THROW(pn_risk(std::vector<double>{}, std::vector<int>{}, LossKind::DoubleHinge), std::invalid_argument);
}

TEST(PnRisk, GradientMatchesSlopes) {
    const std::vector<double> s{2.0, 0.5, -1.5};
    const std::vector<int> y{1, 0, 0};
    std::vector<double> d(3, 0.0);
    pn_risk(s, y, LossKind::DoubleHinge, d);
    EXPECT_NEAR(d[0], 0.0, 1e-15);
    // label 0, score 0.5: z = -0.5, slope -1/2, times y = -1, over n = 3
    EXPECT_NEAR(d[1], 0.5 / 3.0, 1e-15);
    EXPECT_NEAR(d[2], 0.0, 1e-15);
}

TEST(PuRisk, OnlyPositivesWithZeroLossGiveZero) {
    const std::vector<double> s{1.5, 2.0};
    const std::vector<int> m{1, 1};
    // R_p- uses l(-s) > 0, the unlabelled part is empty, so the clamp is active
    const auto r = pu_risk(s, m, 0.3, 0.1, LossKind::DoubleHinge);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.clamped);
}

TEST(PuRisk, ClampGivesPositiveTermExactly) {
    const std::vector<double> s{-0.5, 3.0, 0.5};
    const std::vector<int> m{1, 1, 0};
    const auto r = pu_risk(s, m, 0.7, 0.1, LossKind::DoubleHinge);
    ASSERT_TRUE(r.clamped);
    EXPECT_EQ(r.value, r.positive_term);
}

TEST(PuRisk, FourExampleHandValue) {
    // positives 0.5, -2: R_p+ = (0.25 + 2) / 2, R_p- = (0.75 + 0) / 2
    // unlabelled 0.2, -0.4 as negatives: R_u- = (0.6 + 0.3) / 2
    const std::vector<double> s{0.5, -2.0, 0.2, -0.4};
    const std::vector<int> m{1, 1, 0, 0};
    const auto r = pu_risk(s, m, 0.5, 0.1, LossKind::DoubleHinge);
    EXPECT_FALSE(r.clamped);
    EXPECT_NEAR(r.positive_term, 0.5625, 1e-15);
    EXPECT_NEAR(r.negative_term, 0.2625, 1e-15);
    EXPECT_NEAR(r.value, 0.825, 1e-15);
}

TEST(PuRisk, RejectsBadInput) {
    const std::vector<double> s{0.1};
    const std::vector<int> m{1};
    EXPECT_THROW(pu_risk(std::vector<double>{}, std::vector<int>{}, 0.5, 0.1, LossKind::DoubleHinge),
                 std::invalid_argument);
    EXPECT_THROW(pu_risk(s, m, 0.0, 0.1, LossKind::DoubleHinge), std::invalid_argument);
    EXPECT_THROW(pu_risk(s, m, 1.0, 0.1, LossKind::DoubleHinge), std::invalid_argument);
}

TEST(PuRisk, ClampedGradientIsReversedAndScaled) {
    const std::vector<double> s{-0.5, 3.0, 0.5};
    const std::vector<int> m{1, 1, 0};
    std::vector<double> d(3, 0.0);
    const auto r = pu_risk(s, m, 0.7, 0.1, LossKind::DoubleHinge, d);
    ASSERT_TRUE(r.clamped);
    // unlabelled score 0.5: d/ds l(-s) = 1/2, reversed and scaled by s = 0.1
    EXPECT_NEAR(d[2], -0.05, 1e-15);
}

TEST(PuRisk, UnclampedEqualsEstimatorOnRandomBatches) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal(0.0, 1.5);
    std::bernoulli_distribution coin(0.4);
    int clamped = 0, open = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> s(6);
        std::vector<int> m(6);
        for (int i = 0; i < 6; ++i) {
            s[i] = normal(rng);
            m[i] = coin(rng) ? 1 : 0;
        }
        const double prior = 0.2 + 0.6 * std::uniform_real_distribution<double>()(rng);
        double pp = 0, pm = 0, um = 0;
        int np = 0, nu = 0;
        for (int i = 0; i < 6; ++i) {
            if (m[i]) {
                pp += hinge_oracle(s[i]), pm += hinge_oracle(-s[i]), ++np;
            } else {
                um += hinge_oracle(-s[i]), ++nu;
            }
        }
        const double pos = np ? prior * pp / np : 0.0;
        const double neg = (nu ? um / nu : 0.0) - (np ? prior * pm / np : 0.0);
        const auto r = pu_risk(s, m, prior, 0.1, LossKind::DoubleHinge);
        EXPECT_NEAR(r.positive_term, pos, 1e-12);
        EXPECT_NEAR(r.negative_term, neg, 1e-12);
        EXPECT_EQ(r.clamped, r.negative_term < 0.0);
        if (r.clamped) {
            ++clamped;
            EXPECT_EQ(r.value, r.positive_term);
        } else {
            ++open;
            EXPECT_EQ(r.value, r.positive_term + r.negative_term);
        }
    }
    EXPECT_GT(clamped, 0);
    EXPECT_GT(open, 0);
}
