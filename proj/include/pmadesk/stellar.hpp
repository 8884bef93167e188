#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmadesk {

inline constexpr double pi = std::numbers::pi;

// Gain of a metric measure with diameter D and least distance delta.
inline double gain(double D, double delta) {
    if (!(delta > 0) || !(D > 0)) throw std::invalid_argument("gain needs positive D and delta");
    if (delta >= D) throw std::domain_error("measure does not exist: delta >= D");
    return 20.0 * std::log10(D / (D - delta));
}

// Squared radii of a 2D integer grid constellation with coordinates in [-m, m].
inline std::vector<int> orbit_set(int m) {
    std::vector<int> r2;
    for (int x = -m; x <= m; ++x)
        for (int y = -m; y <= m; ++y) r2.push_back(x * x + y * y);
    std::sort(r2.begin(), r2.end());
    r2.erase(std::unique(r2.begin(), r2.end()), r2.end());
    return r2;
}

struct gain_entry {
    std::string table;      // which property family: geometric, angular, radial, scheme
    std::string selection;  // e.g. "YY-0 pagelet"
    double D;
    double delta;
    double G;
};

// Angle of the YX point (2,1) on orbit r4.
inline const double phi4 = std::atan(0.5);

inline std::vector<gain_entry> analyze_2d_pam5() {
    const auto r2 = orbit_set(2);  // {0,1,2,4,5,8}
    double r[6];
    for (int i = 0; i < 6; ++i) r[i] = std::sqrt(double(r2[i]));
    const double D0 = std::sqrt(16.0), Dp = 2 * r[5];
    std::vector<gain_entry> out;
    auto add = [&](const char* t, const char* s, double D, double d) { out.push_back({t, s, D, d, gain(D, d)}); };
    add("geometric", "YY-0 pagelet", D0, 2);
    add("geometric", "XX pagelet", D0, 2);
    add("geometric", "YX pagelet", D0, 2);
    add("geometric", "P0 page", D0, std::sqrt(2.0));
    add("geometric", "P1 page", D0, std::sqrt(2.0));
    add("geometric", "dictionary", D0, 1);
    add("angular", "YY-0 pagelet", 2 * pi, pi / 4);
    add("angular", "XX pagelet", 2 * pi, pi / 2);
    add("angular", "YX pagelet", 2 * pi, 2 * phi4);
    add("angular", "P1 page", 2 * pi, phi4);
    add("radial", "YY-0 pagelet", Dp, r[5] - r[3]);
    add("radial", "YX pagelet", Dp, r[4] - r[1]);
    add("radial", "P0 page", Dp, r[3] - r[2]);
    add("radial", "P1 page", Dp, r[4] - r[1]);
    add("radial", "dictionary", Dp, r[4] - r[3]);
    return out;
}

struct scheme_sum {
    std::string scheme;
    double G_delta;
    std::optional<double> G_rho, G_p;
    double total;
};

// Coding variants: 2x8/8 (YY-only P0, r4-only P1), 12/12 (P0 only), 12/24 (both pages).
inline std::vector<scheme_sum> pam5_schemes() {
    const double r3 = 2, r4 = std::sqrt(5.0), r5 = std::sqrt(8.0), r1 = 1;
    const double g_dict = gain(4, 1), g_page = gain(4, std::sqrt(2.0));
    const double g_phi = gain(2 * pi, phi4);
    const double gp_dict = gain(2 * r5, r4 - r3), gp_yx = gain(2 * r5, r4 - r1);
    return {
        {"2x8/8+0", g_dict, g_phi, gp_dict, g_dict + g_phi + gp_dict},
        {"12/12+0", g_page, std::nullopt, std::nullopt, g_page},
        {"12/24+0", g_page, g_phi, gp_yx, g_page + g_phi + gp_yx},
    };
}

// Equal-distance two-orbit placement with N = 4p angles per page, R = 1.
struct ideal_stellar {
    double p;
    int N;
    double dphi;
    double r;
    double page_delta, G_delta, G_phi, G_rho;
    double dict_delta, G_dict;
    // two coupled planes
    double c_dphi, c_G_phi, c_drho, c_G_rho, c_sum;
    // repartitioned into eight pages
    double r8_G_phi, r8_sum;
};

inline ideal_stellar ideal_stellar_table(double p) {
    const double n = 4 * p;
    if (p < 2 || std::abs(n - std::round(n)) > 1e-9)
        throw std::invalid_argument("ideal stellar table needs p >= 2 with 4p integral");
    ideal_stellar s{};
    s.p = p;
    s.N = static_cast<int>(std::lround(n));
    s.dphi = 2 * pi / s.N;
    // neighbours R@0, r@dphi at equal distance to r@dphi, r@3dphi:
    // 1 + r^2 - 2r cos(dphi) = 4 r^2 sin^2(dphi)
    const double c = std::cos(s.dphi), sn = std::sin(s.dphi);
    const double a = 4 * sn * sn - 1, b = 2 * c;
    s.r = std::abs(a) < 1e-12 ? 1 / b : (-b + std::sqrt(b * b + 4 * a)) / (2 * a);
    s.page_delta = 2 * s.r * sn;
    s.G_delta = gain(2, s.page_delta);
    s.G_phi = gain(2 * pi, s.dphi);
    s.G_rho = gain(2, 1 - s.r);
    s.dict_delta = std::min(1 - s.r, 2 * s.r * std::sin(s.dphi / 2));
    s.G_dict = gain(2, s.dict_delta);
    s.c_dphi = std::sqrt(2.0) * s.dphi;
    s.c_G_phi = gain(2 * pi, s.c_dphi);
    s.c_drho = std::sqrt(2.0) * (1 - s.r);
    s.c_G_rho = gain(2, s.c_drho);
    s.c_sum = s.G_delta + s.c_G_phi + s.c_G_rho;
    s.r8_G_phi = gain(2 * pi, 2 * s.dphi);
    s.r8_sum = s.G_delta + s.r8_G_phi + s.c_G_rho;
    return s;
}

inline double stellar_mean_power(double rho) {
    if (!(rho > 0) || rho > 1) throw std::invalid_argument("orbit ratio must be in (0, 1]");
    return (1 + rho * rho) / 4;
}

// Jump class of a move of k views on a plane of N views: opposite views count as the same class.
inline int jump_class(int k, int N) {
    int h = N / 2;
    int m = ((k % h) + h) % h;
    return std::min(m, h - m);
}

// Gain of a coupled jump whose planes move by class distances cAB, cCD (in view steps).
inline double jump_gain(int N, int cAB, int cCD) {
    if (N < 2) throw std::invalid_argument("need at least two views");
    const double d = 2 * pi / N;
    const double delta = std::hypot(cAB * d, cCD * d);
    return delta > 0 ? gain(2 * pi, delta) : 0.0;
}

enum class invariance { DD, DI, ID, II };

inline const char* invariance_name(invariance v) {
    switch (v) {
        case invariance::DD: return "D-D";
        case invariance::DI: return "D-I";
        case invariance::ID: return "I-D";
        case invariance::II: return "I-I";
    }
    return "?";
}

// A plane is directed iff it moves by an even number of view steps.
inline invariance invariance_of(int kAB, int kCD) {
    bool iAB = (kAB % 2) != 0, iCD = (kCD % 2) != 0;
    if (iAB && iCD) return invariance::II;
    if (iAB) return invariance::ID;
    if (iCD) return invariance::DI;
    return invariance::DD;
}

inline int invariance_order(int kAB, int kCD) { return ((kAB % 2) != 0) + ((kCD % 2) != 0); }

struct cic_cell {
    int cAB, cCD;
    double G;
    invariance inv;
    int count;  // number of (kAB, kCD) moves falling in this cell
};

inline std::vector<cic_cell> cic_gain_matrix(int N) {
    if (N < 4 || N % 4) throw std::invalid_argument("views per plane must be a multiple of 4");
    const int C = N / 4;
    std::vector<cic_cell> cells;
    for (int a = 0; a <= C; ++a)
        for (int b = 0; b <= C; ++b) cells.push_back({a, b, jump_gain(N, a, b), invariance_of(a, b), 0});
    for (int ka = 0; ka < N; ++ka)
        for (int kc = 0; kc < N; ++kc) {
            int a = jump_class(ka, N), b = jump_class(kc, N);
            ++cells[a * (C + 1) + b].count;
        }
    return cells;
}

struct jump_limits {
    double single_plane, double_plane;
};

inline jump_limits jump_gain_limits() { return {gain(2 * pi, pi / 2), gain(2 * pi, pi / 2 * std::sqrt(2.0))}; }

// Minimal single-plane jump distance when the x nearest views (current one included) are dead.
inline double dead_zone_min_distance(int N, int x) {
    if (x <= 0) return 0.0;
    return pi / N * std::min(x, N - x) * 2;
}

struct jump_rule {
    int excluded = 0;       // N_X: dead views per plane, the current one included; 0 = static
    bool both = false;      // "+" options: the dead zone applies to both planes
    bool diagonal = false;  // also exclude the diagonally opposite view per plane

    std::string name() const {
        std::string s = excluded == 0 ? "static" : (excluded == 1 ? "G_J" : "G_" + std::to_string(excluded) + "J");
        if (excluded && both) s += "+";
        if (diagonal) s += excluded ? "+D" : "D";
        return s;
    }
};

inline jump_rule parse_jump_rule(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    jump_rule r;
    if (s.ends_with("d")) {
        r.diagonal = true;
        s.pop_back();
        if (!s.empty() && s.back() == '+') s.pop_back();
    }
    if (s.empty() || s == "static") return r;
    if (s.starts_with("g_")) s = s.substr(2);
    else if (s.starts_with("g")) s = s.substr(1);
    if (s.ends_with("+")) {
        r.both = true;
        s.pop_back();
    }
    if (s.empty() || s.back() != 'j') throw std::invalid_argument("unknown jump rule");
    s.pop_back();
    r.excluded = s.empty() ? 1 : std::stoi(s);
    if (r.excluded < 1) throw std::invalid_argument("unknown jump rule");
    return r;
}

struct effective_size {
    int per_rp;
    int dictionary;
    bool below_floor;  // fewer than 64 points per repartitioned page
};

// G_kJ removes k views on the jumping plane and k-1 on the other; "+" removes k on both.
// The diagonal option removes the opposite view on each plane as well.
inline effective_size effective_sizes(int N, const jump_rule& rule) {
    if (N < 1) throw std::invalid_argument("views must be positive");
    const int d = rule.diagonal ? 1 : 0;
    const int k = rule.excluded;
    const int kAB = k, kCD = rule.both ? k : std::max(k - 1, 0);
    const int a = N - d - kAB, b = N - d - kCD;
    if (a <= 0 || b <= 0) throw std::invalid_argument("rule excludes every view");
    const int per = a * b;
    return {per, 8 * per, per < 64};
}

// Ladder static, G_J, G_J+, G_2J, G_2J+, ... down to the 64-point floor.
inline std::vector<std::pair<std::string, effective_size>> effective_ladder(int N) {
    std::vector<std::pair<std::string, effective_size>> out;
    jump_rule r;
    out.emplace_back(r.name(), effective_sizes(N, r));
    for (int k = 1; k < N; ++k)
        for (bool both : {false, true}) {
            r = {k, both, false};
            auto e = effective_sizes(N, r);
            if (e.below_floor) return out;
            out.emplace_back(r.name(), e);
        }
    return out;
}

// Rooms of one plane: N = 4p views at phi0 + i*dphi, phi0 = dphi/2. Page 0 puts R on even
// views and r on odd ones, page 1 the reverse.
struct room {
    int view;
    bool outer;
    double angle;
    double radius;  // in units of R
    double x() const { return radius * std::cos(angle); }
    double y() const { return radius * std::sin(angle); }
};

inline std::vector<room> ideal_rooms(double p, int page, std::optional<double> rho = std::nullopt) {
    auto st = ideal_stellar_table(p);
    const double r = rho.value_or(st.r);
    if (!(r > 0) || r > 1) throw std::invalid_argument("orbit ratio must be in (0, 1]");
    std::vector<room> out;
    for (int i = 0; i < st.N; ++i) {
        bool outer = ((i + page) % 2) == 0;
        out.push_back({i, outer, st.dphi / 2 + i * st.dphi, outer ? 1.0 : r});
    }
    return out;
}

struct arranged_room {
    double ideal_x, ideal_y, ideal_radius;
    std::vector<std::pair<int, int>> vertices;  // one or two grid vertices
    double radius;                              // power-averaged radius of the vertices
    double angle;                               // angle of the vertices' centroid
    double radial_error;
};

struct arranged_outline {
    std::vector<arranged_room> rooms;
    double max_radial_error;
    bool order_kept;
};

// Maps rooms (coordinates in grid steps) onto the integer grid [-h, h]^2, each room taking
// the single vertex or vertex pair that best matches its radius and angle. No vertex may
// serve two rooms.
inline arranged_outline grid_arrange(const std::vector<std::pair<double, double>>& rooms, int M = 17) {
    if (M < 2 || M % 2 == 0) throw std::invalid_argument("grid needs an odd level count");
    const int h = (M - 1) / 2;
    struct option {
        std::vector<std::pair<int, int>> v;
        double radius, angle, score;
    };
    std::vector<std::vector<option>> opts(rooms.size());
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        auto [x, y] = rooms[i];
        if (std::abs(x) > h + 1e-9 || std::abs(y) > h + 1e-9) throw std::invalid_argument("room outside the grid");
        const double R = std::hypot(x, y), a = std::atan2(y, x);
        std::vector<std::pair<int, int>> cand;
        for (int gx = -h; gx <= h; ++gx)
            for (int gy = -h; gy <= h; ++gy)
                if (std::hypot(gx - x, gy - y) <= 1.5) cand.push_back({gx, gy});
        auto consider = [&](std::vector<std::pair<int, int>> v) {
            double p2 = 0, cx = 0, cy = 0;
            for (auto [gx, gy] : v) {
                p2 += gx * gx + gy * gy;
                cx += gx;
                cy += gy;
            }
            double rr = std::sqrt(p2 / v.size()), aa = std::atan2(cy, cx);
            double da = std::remainder(aa - a, 2 * pi);
            double score = (rr - R) * (rr - R) + (R * da) * (R * da) + 0.01 * (v.size() - 1);
            opts[i].push_back({std::move(v), rr, aa, score});
        };
        for (std::size_t j = 0; j < cand.size(); ++j) {
            consider({cand[j]});
            for (std::size_t k = j + 1; k < cand.size(); ++k) consider({cand[j], cand[k]});
        }
        std::sort(opts[i].begin(), opts[i].end(), [](const option& l, const option& r) { return l.score < r.score; });
        if (opts[i].size() > 12) opts[i].resize(12);
        if (opts[i].empty()) throw std::invalid_argument("room has no nearby grid vertex");
    }
    // depth-first search over each room's best options, keeping vertices exclusive
    std::vector<int> pick(rooms.size(), -1);
    std::map<std::pair<int, int>, int> used;
    std::size_t steps = 0;
    auto fits = [&](const option& o) {
        for (auto& v : o.v)
            if (used.count(v)) return false;
        return true;
    };
    std::function<bool(std::size_t)> dfs = [&](std::size_t i) {
        if (i == rooms.size()) return true;
        if (++steps > 200000) return false;
        for (std::size_t k = 0; k < opts[i].size(); ++k) {
            const auto& o = opts[i][k];
            if (!fits(o)) continue;
            for (auto& v : o.v) used[v] = int(i);
            pick[i] = int(k);
            if (dfs(i + 1)) return true;
            for (auto& v : o.v) used.erase(v);
        }
        return false;
    };
    if (!dfs(0)) throw std::runtime_error("ambiguous outline: rooms compete for the same grid vertex");

    arranged_outline out{{}, 0, true};
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        const auto& o = opts[i][pick[i]];
        auto [x, y] = rooms[i];
        double R = std::hypot(x, y);
        out.rooms.push_back({x, y, R, o.v, o.radius, o.angle, std::abs(o.radius - R)});
        out.max_radial_error = std::max(out.max_radial_error, std::abs(o.radius - R));
    }
    // angular order: sorting by ideal angle must also sort the arranged angles (cyclically)
    std::vector<std::size_t> idx(rooms.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto ang = [](double y, double x) { double a = std::atan2(y, x); return a < 0 ? a + 2 * pi : a; };
    std::sort(idx.begin(), idx.end(), [&](auto l, auto r) {
        return ang(out.rooms[l].ideal_y, out.rooms[l].ideal_x) < ang(out.rooms[r].ideal_y, out.rooms[r].ideal_x);
    });
    int descents = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        double a0 = out.rooms[idx[i]].angle, a1 = out.rooms[idx[(i + 1) % idx.size()]].angle;
        double step = a1 - a0;
        if (step < 0) step += 2 * pi;
        if (step <= 1e-12 || step >= pi) ++descents;  // a coincident or backwards neighbour
    }
    out.order_kept = idx.size() < 3 || descents == 0;
    return out;
}

// A plane's rooms scaled so that R sits on the grid's full scale.
inline std::vector<std::pair<double, double>> rooms_on_grid(const std::vector<room>& rooms, int M = 17) {
    const double h = (M - 1) / 2.0;
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rooms) out.push_back({h * r.x(), h * r.y()});
    return out;
}

}  // namespace pmadesk
