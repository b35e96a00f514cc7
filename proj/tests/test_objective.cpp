#include <gtest/gtest.h>

#include "wiggle/objective.hpp"

using namespace wiggle;

namespace {

ObjectiveConfig cfg_with(double depth, double y0) {
    ObjectiveConfig c;
    c.keyhole_depth = depth;
    c.start_y = y0;
    return c;
}

}  // namespace

TEST(Objective, FullyInsertedIsZero) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0);
    EXPECT_DOUBLE_EQ(insertion_loss(c.start_y - c.keyhole_depth, c), 0.0);
}

TEST(Objective, AtStartEqualsDepth) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0);
    EXPECT_DOUBLE_EQ(insertion_loss(0.0, c), 0.018);
}

TEST(Objective, OvershootPenalizedSymmetrically) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0);
    EXPECT_DOUBLE_EQ(insertion_loss(-c.keyhole_depth - 0.001, c), 0.001);
    EXPECT_DOUBLE_EQ(insertion_loss(-c.keyhole_depth + 0.001, c), 0.001);
}

TEST(Objective, StartYShiftsTarget) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0015);
    EXPECT_DOUBLE_EQ(insertion_loss(0.0015, c), 0.018);
    EXPECT_DOUBLE_EQ(insertion_loss(0.0015 - 0.018, c), 0.0);
}

TEST(Objective, TotalLossComposition) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0);
    EXPECT_DOUBLE_EQ(total_loss(0.018, 0.0, c), 0.018);
    EXPECT_DOUBLE_EQ(total_loss(0.018, 10.0, c), 0.023);
    EXPECT_DOUBLE_EQ(total_loss(0.0, 0.0, c), 0.0);
}

TEST(Objective, SuccessUsesStrictThreshold) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0);
    EXPECT_TRUE(check_success(0.0004, c));
    EXPECT_FALSE(check_success(0.0005, c));
    EXPECT_FALSE(check_success(0.018, c));
}

TEST(Objective, MonotoneInBothArguments) {
    const ObjectiveConfig c = cfg_with(0.018, 0.0);
    double prev = -1.0;
    for (double ins = 0.0; ins <= 0.02; ins += 0.001) {
        const double v = total_loss(ins, 5.0, c);
        EXPECT_GT(v, prev);
        prev = v;
    }
    prev = -1.0;
    for (double s = 0.0; s <= 40.0; s += 2.0) {
        const double v = total_loss(0.01, s, c);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_GE(total_loss(0.0, 0.0, c), 0.0);
}

TEST(Objective, ValidationRejectsBadConfigs) {
    ObjectiveConfig c = cfg_with(0.018, 0.0);
    EXPECT_NO_THROW(c.validate());

    c.lambda = -0.1;
    EXPECT_THROW(c.validate(), std::invalid_argument);

    c = cfg_with(0.0, 0.0);
    EXPECT_THROW(c.validate(), std::invalid_argument);

    c = cfg_with(0.018, 0.0);
    c.success_epsilon = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);

    // Strain contribution capped at 10x the depth scale.
    c = cfg_with(0.018, 0.0);
    c.lambda = 0.01;  // 0.01 * 40 px = 0.4 > 0.18
    EXPECT_THROW(c.validate(), std::invalid_argument);
}
