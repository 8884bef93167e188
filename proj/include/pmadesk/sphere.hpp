#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pmadesk {

inline double unit_ball_volume(int n) {
    if (n < 0) throw std::invalid_argument("dimension must be >= 0");
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1);
}

inline double unit_ball_surface(int n) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    return 2 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

struct sphere_estimate {
    int n, M;
    // Levels are integers for odd M and odd integers (doubled half-steps) for even M.
    std::int64_t step;     // level pitch in those units
    std::int64_t u_max, u_min;
    std::int64_t R2;       // u_max^2 + (n-1) u_min^2
    std::uint64_t N_s, N_o;
    double V;
};

namespace detail {
inline std::vector<std::int64_t> level_values(int M) {
    std::vector<std::int64_t> v;
    if (M % 2) {
        for (int k = -(M - 1) / 2; k <= (M - 1) / 2; ++k) v.push_back(k);
    } else {
        for (int k = -(M - 1); k <= M - 1; k += 2) v.push_back(k);
    }
    return v;
}
}  // namespace detail

// Counts grid points inside and on the test sphere by convolving per-dimension
// squared-value histograms, truncated at R_test^2.
inline sphere_estimate grid_volume(int n, int M) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (M < 2) throw std::invalid_argument("need at least two levels");
    if (M == 2 && n > 1) throw std::domain_error("two-level grid has a single shell: volume defined only for n = 1");
    if (n * std::log2(double(M)) > 63) throw std::overflow_error("grid too large for 64-bit counts");
    sphere_estimate e{};
    e.n = n;
    e.M = M;
    const bool odd = M % 2;
    e.step = odd ? 1 : 2;
    e.u_max = odd ? (M - 1) / 2 : M - 1;
    e.u_min = 1;
    e.R2 = e.u_max * e.u_max + std::int64_t(n - 1) * e.u_min * e.u_min;
    const auto levels = detail::level_values(M);
    std::vector<std::uint64_t> hist(e.R2 + 1, 0);
    hist[0] = 1;
    for (int d = 0; d < n; ++d) {
        std::vector<std::uint64_t> next(e.R2 + 1, 0);
        for (std::int64_t s = 0; s <= e.R2; ++s) {
            if (!hist[s]) continue;
            for (auto v : levels) {
                auto t = s + v * v;
                if (t <= e.R2) next[t] += hist[s];
            }
        }
        hist.swap(next);
    }
    for (std::int64_t s = 0; s < e.R2; ++s) e.N_o += hist[s];
    e.N_s = hist[e.R2];
    e.V = (double(e.N_o) + 0.5 * double(e.N_s)) * std::pow(double(e.step) / std::sqrt(double(e.R2)), n);
    return e;
}

// Surface of the n-ball's boundary scaled from the (n-1)-dimensional grid body.
inline double grid_surface(int n, int M) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    const double Vprev = n == 1 ? 1.0 : grid_volume(n - 1, M).V;
    return unit_ball_surface(n) / unit_ball_volume(n - 1) * Vprev;
}

struct limit_row {
    int n;
    std::optional<double> S, V;
    std::optional<double> S_pct, V_pct;  // percent of each row's own peak
};

struct limit_scan_result {
    int M;
    int n_tx, n_rx;  // argmax of surface and of volume
    std::vector<limit_row> rows;
};

inline limit_scan_result limit_scan(int M, int max_dim = 10) {
    if (M < 2) throw std::invalid_argument("need at least two levels");
    if (max_dim < 1) throw std::invalid_argument("max dimension must be >= 1");
    limit_scan_result r{M, 0, 0, {}};
    double bestS = -1, bestV = -1;
    for (int n = 1; n <= max_dim; ++n) {
        limit_row row{n, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
        try {
            row.S = grid_surface(n, M);
        } catch (const std::domain_error&) {
        }
        try {
            row.V = grid_volume(n, M).V;
        } catch (const std::domain_error&) {
        }
        if (row.S && *row.S > bestS) bestS = *row.S, r.n_tx = n;
        if (row.V && *row.V > bestV) bestV = *row.V, r.n_rx = n;
        r.rows.push_back(row);
    }
    for (auto& row : r.rows) {
        if (row.S) row.S_pct = 100 * *row.S / bestS;
        if (row.V) row.V_pct = 100 * *row.V / bestV;
    }
    return r;
}

}  // namespace pmadesk
