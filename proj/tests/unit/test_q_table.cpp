#include <gtest/gtest.h>

#include "dcmin/errors.hpp"
#include "dcmin/q_table.hpp"

namespace dcmin {
namespace {

TEST(DeltaKey, Variants) {
    const auto axis = Axis::range(-60, 60, 10);
    EXPECT_EQ(delta_key(StateVariant::S1, 23.0, axis), 0);
    EXPECT_EQ(delta_key(StateVariant::S2, -4.0, axis), 1);
    EXPECT_EQ(delta_key(StateVariant::S2, 4.0, axis), -1);
    EXPECT_EQ(delta_key(StateVariant::S2, 0.0, axis), 0);
    EXPECT_EQ(delta_key(StateVariant::S3, 23.0, axis), 8);
    EXPECT_EQ(delta_key(StateVariant::S4, -100.0, axis), 0);
}

TEST(SparseQ, FoldIsRunningMean) {
    SparseQ q(StateVariant::S4, 2, 2, 3);
    const BlockKey k{5, 7};
    q.fold(k, 1, 0, 2, 2.0);
    q.fold(k, 1, 0, 2, 4.0);
    EXPECT_EQ(*q.value(k, 1, 0, 2), 3.0);
    EXPECT_EQ(q.visits(k, 1, 0, 2), 2u);
    EXPECT_EQ(q.visits(k, 0, 0, 0), 0u);
    EXPECT_FALSE(q.value(k, 0, 0, 0).has_value());
    EXPECT_FALSE(q.value({5, 8}, 1, 0, 2).has_value());
    EXPECT_EQ(q.entry_count(), 1u);
}

TEST(SparseQ, SetRequiresVisits) {
    SparseQ q(StateVariant::S3, 1, 1, 2);
    EXPECT_THROW(q.set({0, 0}, 0, 0, 0, 1.0, 0), DataError);
    q.set({0, 0}, 0, 0, 1, 1.5, 4);
    EXPECT_EQ(*q.value({0, 0}, 0, 0, 1), 1.5);
    EXPECT_EQ(q.visits({0, 0}, 0, 0, 1), 4u);
}

TEST(GreedyAction, TieBreaks) {
    const Axis actions = Axis::range(-10, 10, 5);  // -10 -5 0 5 10
    const auto order = tie_break_order(actions);
    SparseQ q(StateVariant::S1, 1, 1, actions.count);
    const BlockKey k{0, 0};
    // a = -5 and a = +5 tie: smaller a wins.
    q.set(k, 0, 0, 1, 1.0, 1);
    q.set(k, 0, 0, 3, 1.0, 1);
    q.set(k, 0, 0, 4, 2.0, 1);
    EXPECT_EQ(greedy_action(q, *q.find(k), 0, 0, order), 1);
    // a = 0 joins the tie and wins on magnitude.
    q.set(k, 0, 0, 2, 1.0, 1);
    EXPECT_EQ(greedy_action(q, *q.find(k), 0, 0, order), 2);
    // Strictly lower value beats the tie order.
    q.set(k, 0, 0, 0, 0.5, 1);
    EXPECT_EQ(greedy_action(q, *q.find(k), 0, 0, order), 0);
}

TEST(GreedyAction, EmptyCell) {
    SparseQ q(StateVariant::S1, 2, 1, 3);
    q.set({0, 0}, 0, 0, 0, 1.0, 1);
    const auto order = tie_break_order(Axis::range(-1, 1, 1));
    EXPECT_FALSE(greedy_action(q, *q.find({0, 0}), 1, 0, order).has_value());
}

TEST(Policy, LookupAndDifferences) {
    Policy a(StateVariant::S3, 3, 1, ControllerKind::Lazy);
    EXPECT_FALSE(a.lookup({0, 2}, 1, 0).has_value());
    a.set({0, 2}, 1, 0, 4);
    a.set({1, 2}, 0, 0, 3);
    EXPECT_EQ(*a.lookup({0, 2}, 1, 0), 4);
    EXPECT_EQ(a.entry_count(), 2u);

    Policy b = a;
    EXPECT_EQ(a.count_differences(b), 0u);
    b.set({0, 2}, 1, 0, 5);
    EXPECT_EQ(a.count_differences(b), 1u);
    b.set({2, 0}, 0, 0, 1);
    EXPECT_EQ(a.count_differences(b), 2u);
    EXPECT_EQ(b.count_differences(a), 2u);
}

}  // namespace
}  // namespace dcmin
