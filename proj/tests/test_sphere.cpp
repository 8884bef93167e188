#include <gtest/gtest.h>

#include <map>

#include "pmadesk/sphere.hpp"

using namespace pmadesk;

TEST(Sphere, UnitBall) {
    EXPECT_NEAR(unit_ball_surface(4), 2 * std::numbers::pi * std::numbers::pi, 1e-12);
    EXPECT_NEAR(unit_ball_volume(5), 8 * std::numbers::pi * std::numbers::pi / 15, 1e-12);
    EXPECT_NEAR(unit_ball_volume(1), 2, 1e-12);
    EXPECT_NEAR(unit_ball_surface(1), 2, 1e-12);
}

TEST(Sphere, PublishedEstimates) {
    auto a = grid_volume(3, 4);
    EXPECT_EQ(a.N_o, 8u);
    EXPECT_EQ(a.N_s, 24u);
    EXPECT_EQ(a.R2, 11);
    EXPECT_NEAR(a.V, 4.39, 0.005);
    auto b = grid_volume(3, 3);
    EXPECT_EQ(b.N_o, 19u);
    EXPECT_EQ(b.N_s, 8u);
    EXPECT_NEAR(b.V, 4.43, 0.005);
    EXPECT_NEAR(grid_volume(3, 17).V, 4.20, 0.005);
    EXPECT_NEAR(grid_surface(4, 17), 19.80, 0.005);
    EXPECT_NEAR(grid_surface(7, 17), 33.00, 0.005);
    EXPECT_NEAR(grid_volume(1, 2).V, 2, 1e-12);
    EXPECT_THROW(grid_volume(2, 2), std::domain_error);

    const double s17[] = {2, 6.28, 12.62, 19.80, 26.47, 31.08, 33.00, 32.33, 29.57, 25.45};
    for (int n = 1; n <= 10; ++n) EXPECT_NEAR(grid_surface(n, 17), s17[n - 1], 0.006) << n;
    const double v17[] = {2, 3.15, 4.20, 4.96, 5.28, 5.16, 4.70, 4.04, 3.29};
    for (int n = 1; n <= 9; ++n) EXPECT_NEAR(grid_volume(n, 17).V, v17[n - 1], 0.006) << n;
}

TEST(Sphere, DpMatchesBruteForce) {
    for (int M = 3; M <= 9; ++M)
        for (int n = 1; n <= 3; ++n) {
            auto e = grid_volume(n, M);
            std::vector<long> lv;
            for (int k = 0; k < M; ++k) lv.push_back(M % 2 ? k - (M - 1) / 2 : 2 * k - (M - 1));
            std::uint64_t on = 0, in = 0;
            int total = 1;
            for (int d = 0; d < n; ++d) total *= M;
            for (int idx = 0; idx < total; ++idx) {
                long s = 0;
                int t = idx;
                for (int d = 0; d < n; ++d, t /= M) s += lv[t % M] * lv[t % M];
                if (s == e.R2) ++on;
                else if (s < e.R2) ++in;
            }
            EXPECT_EQ(e.N_s, on) << n << " " << M;
            EXPECT_EQ(e.N_o, in) << n << " " << M;
        }
}

TEST(Sphere, ConvergesToBall) {
    for (int n = 1; n <= 6; ++n) EXPECT_NEAR(grid_volume(n, 64).V / unit_ball_volume(n), 1.0, 0.02) << n;
}

TEST(Sphere, LimitScan) {
    auto r = limit_scan(17);
    EXPECT_EQ(r.n_tx, 7);
    EXPECT_EQ(r.n_rx, 5);
    EXPECT_NEAR(*r.rows[6].S_pct, 100, 1e-12);
    auto r3 = limit_scan(3, 6);
    EXPECT_EQ(r3.n_rx, 4);
    auto r2 = limit_scan(2, 4);
    EXPECT_TRUE(r2.rows[0].V.has_value());
    EXPECT_FALSE(r2.rows[1].V.has_value());
}
