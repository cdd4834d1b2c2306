#include <gtest/gtest.h>

#include "hmt/agent/phase.hpp"
#include "hmt/common/error.hpp"

using namespace hmt::agent;

TEST(Phase, Boundaries) {
    PhaseThresholds t;
    EXPECT_EQ(current_phase(0.0, t), 1);
    EXPECT_EQ(current_phase(0.19999, t), 1);
    EXPECT_EQ(current_phase(0.2, t), 2);
    EXPECT_EQ(current_phase(0.4, t), 3);
    EXPECT_EQ(current_phase(0.79, t), 4);
    EXPECT_EQ(current_phase(0.8, t), 5);
    EXPECT_EQ(current_phase(1.0, t), 5);
}

TEST(Phase, MonotoneInCompletion) {
    PhaseThresholds t({0.1, 0.3, 0.5, 0.9});
    int last = 1;
    for (int i = 0; i <= 1000; ++i) {
        const int p = current_phase(i / 1000.0, t);
        EXPECT_GE(p, last);
        last = p;
    }
    EXPECT_EQ(last, 5);
}

TEST(Phase, RejectsBadThresholds) {
    EXPECT_THROW(PhaseThresholds({0.2, 0.2, 0.6, 0.8}), hmt::Error);
    EXPECT_THROW(PhaseThresholds({0.0, 0.2, 0.6, 0.8}), hmt::Error);
    EXPECT_THROW(PhaseThresholds({0.2, 0.4, 0.6, 1.0}), hmt::Error);
    EXPECT_THROW(PhaseThresholds({0.2, 0.4}), hmt::Error);
}
