#include <gtest/gtest.h>

#include <chrono>

#include "pmadesk/balance.hpp"

using namespace pmadesk;

TEST(Balance, CatalogPartition) {
    auto cat = build_catalog();
    EXPECT_TRUE(check_catalog(cat).empty());
    EXPECT_EQ(cat.of(sym_group::s3).size(), 27u);
    const int counts[7] = {8, 27, 6, 9, 9, 1, 4};
    for (int i = 0; i < 7; ++i) EXPECT_EQ(static_cast<int>(cat.of(all_groups[i]).size()), counts[i]);
    const auto& first = cat.of(sym_group::s2).front()->points;
    EXPECT_EQ(first[0], (symbol4d{-1, -1, -1, -1}));
    EXPECT_EQ(first[1], (symbol4d{1, 1, 1, 1}));
}

TEST(Balance, EffectTable) {
    auto cat = build_catalog();
    auto row = [](int y, int x, std::array<int, 8> p, int z) { return effect_row{y, x, p, z}; };
    EXPECT_EQ(group_effect(cat, sym_group::s2), row(0, 1, {2, 0, 0, 0, 0, 0, 0, 0}, 2));
    EXPECT_EQ(group_effect(cat, sym_group::s3), row(1, 0, {3, 0, 0, 0, 0, 0, 0, 0}, 3));
    EXPECT_EQ(group_effect(cat, sym_group::s8), row(2, 1, {0, 2, 0, 2, 0, 2, 0, 2}, 8));
    EXPECT_EQ(group_effect(cat, sym_group::s16), row(4, 2, {0, 4, 0, 4, 0, 4, 0, 4}, 16));
    EXPECT_EQ(group_effect(cat, sym_group::s24_even), row(4, 6, {0, 0, 8, 0, 8, 0, 8, 0}, 24));
    EXPECT_EQ(group_effect(cat, sym_group::s24_10), row(6, 3, {0, 6, 0, 6, 0, 6, 0, 6}, 24));
    EXPECT_EQ(group_effect(cat, sym_group::s24_odd), row(2, 9, {0, 6, 0, 6, 0, 6, 0, 6}, 24));
}

TEST(Balance, OriginalConstellation) {
    auto cat = build_catalog();
    auto s = evaluate(cat, original_sums(), 72);
    EXPECT_EQ(s.H_z, 625);
    EXPECT_EQ(s.H_y, 125);
    EXPECT_EQ(s.H_x, 125);
    EXPECT_EQ(s.H_pages[0], 97);
    EXPECT_EQ(s.H_pages[2], 72);
    EXPECT_EQ(s.H_pages[1], 78);
    EXPECT_FALSE(verify(s).ok);
}

TEST(Balance, ZeroSolutionFlagged) {
    auto s = evaluate(build_catalog(), group_sums{}, 0);
    EXPECT_EQ(s.H_z, 0);
    auto r = verify(s);
    EXPECT_FALSE(r.ok);
}

// Brute-force oracle over the group sums for a small target: every uniform-page
// assignment, minimal |H_y - H_x|.
static std::int64_t brute_min_unbalance(std::int64_t Hz, std::int64_t NE) {
    auto cat = build_catalog();
    std::int64_t Hp = Hz / 8, best = -1;
    std::int64_t g24e = Hp / 8;
    for (std::int64_t g2 = 0; 2 * g2 <= Hp; ++g2)
        for (std::int64_t g3 = 0; 2 * g2 + 3 * g3 <= Hp; ++g3) {
            if (2 * g2 + 3 * g3 != Hp) continue;
            for (std::int64_t g8 = 0; 2 * g8 <= Hp; ++g8)
                for (std::int64_t g16 = 0; 2 * g8 + 4 * g16 <= Hp; ++g16)
                    for (std::int64_t g10 = 0; 2 * g8 + 4 * g16 + 6 * g10 <= Hp; ++g10)
                        for (std::int64_t g24 = 0; 2 * g8 + 4 * g16 + 6 * g10 + 6 * g24 <= Hp; ++g24) {
                            if (2 * g8 + 4 * g16 + 6 * g10 + 6 * g24 != Hp) continue;
                            group_sums g;
                            g.R = {g2, g3, g8, g16, g24e, g10, g24};
                            auto s = evaluate(cat, g, NE);
                            if (!verify(s).ok) continue;
                            if (best < 0 || s.unbalance() < best) best = s.unbalance();
                        }
        }
    return best;
}

TEST(Balance, SolverMatchesBruteForce) {
    for (std::int64_t hz : {576, 640}) EXPECT_EQ(solve(hz, 72).unbalance(), brute_min_unbalance(hz, 72)) << hz;
    EXPECT_EQ(solve(512, 64).unbalance(), brute_min_unbalance(512, 64));
}

TEST(Balance, PrintedTargets) {
    auto s = solve(576, 72);
    EXPECT_TRUE(verify(s).ok);
    EXPECT_EQ(s.H_page, 72);
    EXPECT_LE(s.unbalance(), 2);
    auto e = solve(640, 72);
    EXPECT_TRUE(verify(e).ok);
    EXPECT_EQ(e.H_y, 128);
    EXPECT_EQ(e.H_x, 128);
    const std::pair<std::int64_t, std::int64_t> rows[] = {{1152, 1}, {2304, 2}, {4608, 1}};
    for (auto [hz, ub] : rows) {
        auto r = solve(hz, 72);
        EXPECT_TRUE(verify(r).ok) << hz;
        EXPECT_LE(r.unbalance(), ub) << hz;
    }
}

TEST(Balance, SolverInfeasible) {
    EXPECT_THROW(solve(100, 1), std::invalid_argument);
    EXPECT_THROW(solve(512, 72), std::invalid_argument);
}

TEST(Balance, SolveLargeIsFast) {
    auto t0 = std::chrono::steady_clock::now();
    auto s = solve(16384, 72);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_TRUE(verify(s).ok);
    EXPECT_LT(dt, 10.0);
}

TEST(Balance, VerifyProbabilities) {
    auto s = solve(576, 72);
    auto r = verify(s);
    EXPECT_NEAR(r.p_y, 116.0 / 576, 1e-12);
    EXPECT_NEAR(r.p_x, 114.0 / 576, 1e-12);
    auto e = verify(solve(640, 72));
    EXPECT_DOUBLE_EQ(e.p_y, 0.2);
    EXPECT_DOUBLE_EQ(e.p_x, 0.2);
}

TEST(Balance, SubscramblerError) {
    // Oracle: histogram of v mod B over all 2^k inputs.
    auto oracle = [](unsigned k, unsigned B) {
        std::vector<double> h(B, 0);
        for (std::uint64_t v = 0; v < (1u << k); ++v) h[v % B] += 1;
        double worst = 0;
        for (double c : h) worst = std::max(worst, std::abs(c / (1u << k) - 1.0 / B) * B);
        return worst;
    };
    for (unsigned B : {3u, 5u, 9u})
        for (unsigned k = 4; k <= 12; ++k) EXPECT_NEAR(subscrambler_error(k, B), oracle(k, B), 1e-12);
    EXPECT_DOUBLE_EQ(subscrambler_error(6, 5), 0.0625);
    EXPECT_DOUBLE_EQ(subscrambler_error(5, 5), 0.09375);
    EXPECT_NEAR(subscrambler_error(7, 9), 0.0546875, 1e-12);
    EXPECT_EQ(subscrambler_error(6, 8), 0.0);
    EXPECT_THROW(subscrambler_error(2, 5), std::invalid_argument);
    for (unsigned B : {3u, 5u, 9u})
        for (unsigned k = 4; k < 20; ++k) EXPECT_LE(subscrambler_error(k + 1, B), subscrambler_error(k, B));
}
