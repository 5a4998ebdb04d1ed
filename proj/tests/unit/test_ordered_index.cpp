#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kac/ordered_index.hpp"
#include "kac/rng.hpp"

using namespace kac;

TEST(OrderedIndex, BuildSortedAndBalanced) {
    std::vector<double> keys;
    for (int i = 0; i < 1000; ++i) keys.push_back(0.01 * i);
    OrderedIndex idx(keys);
    std::string why;
    ASSERT_TRUE(idx.check_invariants(&why)) << why;
    EXPECT_EQ(idx.size(), 1000);
    EXPECT_EQ(idx.sorted_keys(), keys);
    EXPECT_LE(idx.height(), 11);
    EXPECT_EQ(idx.first(), 0);
    EXPECT_EQ(idx.last(), 999);
    EXPECT_EQ(idx.next(10), 11);
    EXPECT_EQ(idx.prev(10), 9);
    EXPECT_EQ(idx.next(999), OrderedIndex::kNil);
}

TEST(OrderedIndex, NeighborsSkipIds) {
    OrderedIndex idx({0.0, 1.0, 2.0, 3.0});
    auto [p, s] = idx.neighbors(1.5);
    EXPECT_EQ(p, 1);
    EXPECT_EQ(s, 2);
    std::tie(p, s) = idx.neighbors(1.5, 1, 2);
    EXPECT_EQ(p, 0);
    EXPECT_EQ(s, 3);
    std::tie(p, s) = idx.neighbors(2.0);
    EXPECT_EQ(p, 2);
    EXPECT_EQ(s, 3);
    std::tie(p, s) = idx.neighbors(-1.0);
    EXPECT_EQ(p, OrderedIndex::kNil);
    EXPECT_EQ(s, 0);
    std::tie(p, s) = idx.neighbors(5.0, 3);
    EXPECT_EQ(p, 2);
    EXPECT_EQ(s, OrderedIndex::kNil);
}

class OrderedIndexFanout : public ::testing::TestWithParam<int> {};

TEST_P(OrderedIndexFanout, RandomizedAgainstSortedVector) {
    RngStream rng(51, static_cast<std::uint64_t>(GetParam()));
    const int n = 400;
    std::vector<double> keys(n);
    for (auto& k : keys) k = rng.uniform(0.0, 10.0);
    std::sort(keys.begin(), keys.end());
    OrderedIndex idx(keys, GetParam());
    std::vector<double> cur = keys;
    for (int step = 0; step < 20000; ++step) {
        const int id = static_cast<int>(rng.below(n));
        idx.erase(id);
        if (step % 500 == 0) ASSERT_TRUE(idx.check_invariants());
        // Occasionally reuse an existing key to exercise ties.
        const double k = rng.uniform() < 0.05 ? cur[rng.below(n)] : rng.uniform(0.0, 10.0);
        cur[id] = k;
        idx.insert(id, k);
        if (step % 97 == 0) {
            std::string why;
            ASSERT_TRUE(idx.check_invariants(&why)) << why;
            auto sorted = cur;
            std::sort(sorted.begin(), sorted.end());
            ASSERT_EQ(idx.sorted_keys(), sorted);
            const double q = rng.uniform(-1.0, 11.0);
            auto [p, s] = idx.neighbors(q);
            auto it = std::upper_bound(sorted.begin(), sorted.end(), q);
            if (it == sorted.end())
                EXPECT_EQ(s, OrderedIndex::kNil);
            else
                EXPECT_EQ(idx.key(s), *it);
            if (it == sorted.begin())
                EXPECT_EQ(p, OrderedIndex::kNil);
            else
                EXPECT_EQ(idx.key(p), *(it - 1));
            const auto ids = idx.sorted_ids();
            for (std::size_t k = 1; k < ids.size(); ++k) {
                ASSERT_EQ(idx.next(ids[k - 1]), ids[k]);
                ASSERT_EQ(idx.prev(ids[k]), ids[k - 1]);
            }
        }
    }
    EXPECT_LE(idx.height(), static_cast<int>(1.45 * std::log2(n + 2)) + 1);
}

INSTANTIATE_TEST_SUITE_P(Fanouts, OrderedIndexFanout, ::testing::Values(4, 5, 8, 64));

TEST(OrderedIndex, DrainAndRefillSmallFanout) {
    RngStream rng(52, 0);
    std::vector<double> keys(300);
    for (auto& k : keys) k = rng.uniform();
    OrderedIndex idx(keys, 4);
    std::vector<int> order(300);
    std::iota(order.begin(), order.end(), 0);
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 299; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
        for (int id : order) {
            idx.erase(id);
            std::string why;
            ASSERT_TRUE(idx.check_invariants(&why)) << why;
        }
        EXPECT_EQ(idx.size(), 0);
        EXPECT_EQ(idx.height(), 1);
        for (int id : order) {
            idx.insert(id, keys[id]);
            std::string why;
            ASSERT_TRUE(idx.check_invariants(&why)) << why;
        }
    }
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(idx.sorted_keys(), sorted);
}

TEST(OrderedIndex, EqualKeysKeepInsertionOrder) {
    OrderedIndex idx({1.0, 1.0, 1.0});
    idx.erase(0);
    idx.insert(0, 1.0);
    EXPECT_EQ(idx.sorted_ids(), (std::vector<int>{1, 2, 0}));
}

TEST(OrderedIndex, EraseAllAndRebuild) {
    OrderedIndex idx({0.1, 0.2, 0.3, 0.4, 0.5});
    for (int id : {2, 0, 4, 1, 3}) {
        idx.erase(id);
        ASSERT_TRUE(idx.check_invariants());
    }
    EXPECT_EQ(idx.size(), 0);
    EXPECT_EQ(idx.first(), OrderedIndex::kNil);
    for (int id : {3, 1, 4, 0, 2}) idx.insert(id, 0.1 * (id + 1));
    EXPECT_EQ(idx.sorted_ids(), (std::vector<int>{0, 1, 2, 3, 4}));
}
