#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pam_core.hpp"

namespace pmadesk {

// The seven impersonalized symmetry groups, in solver order.
enum class sym_group { s2, s3, s8, s16, s24_even, s24_10, s24_odd };

inline constexpr std::array<sym_group, 7> all_groups{sym_group::s2,       sym_group::s3,     sym_group::s8,
                                                     sym_group::s16,      sym_group::s24_even, sym_group::s24_10,
                                                     sym_group::s24_odd};

inline const char* group_name(sym_group g) {
    switch (g) {
        case sym_group::s2: return "2S";
        case sym_group::s3: return "3S";
        case sym_group::s8: return "8S";
        case sym_group::s16: return "16S";
        case sym_group::s24_even: return "24S-even";
        case sym_group::s24_10: return "24S10";
        case sym_group::s24_odd: return "24S-odd";
    }
    return "?";
}

struct symmetry {
    sym_group group;
    int ordinal;  // 1-based within the group
    std::vector<symbol4d> points;
    int size() const { return static_cast<int>(points.size()); }
};

struct effect_row {
    int dY = 0;
    int dX = 0;
    std::array<int, 8> dPage{};
    int dZ = 0;
    friend bool operator==(const effect_row&, const effect_row&) = default;
};

// Per-repeat effect of one symmetry: hits per Y bin, per X bin, per page, total.
// Throws if the symmetry is not bin-uniform.
inline effect_row effect_of(const symmetry& s) {
    std::array<std::array<int, 5>, 4> hits{};
    effect_row e{};
    for (const auto& p : s.points) {
        for (int w = 0; w < 4; ++w) ++hits[w][p[w] + 2];
        ++e.dPage[classify(p).page];
        ++e.dZ;
    }
    std::optional<int> y, x;
    for (int w = 0; w < 4; ++w)
        for (int v = -2; v <= 2; ++v) {
            auto& slot = class_of(v) == level_class::y ? y : x;
            int h = hits[w][v + 2];
            if (slot && *slot != h) throw std::logic_error("symmetry is not bin-uniform");
            slot = h;
        }
    e.dY = *y;
    e.dX = *x;
    return e;
}

namespace detail {
inline int yval(int t) { return 2 * (t % 3) - 2; }  // 0,1,2 -> L,z,H

// Place a 3-value triple around one odd position: the four rotations of (t2,t1,t0,o).
inline std::array<symbol4d, 4> rotations(int t2, int t1, int t0, int o) {
    return {{{t2, t1, t0, o}, {t1, t0, o, t2}, {t0, o, t2, t1}, {o, t2, t1, t0}}};
}

inline void add_y_triple(std::vector<symbol4d>& pts, int a, int b, int c) {
    for (int x : {-1, 1})
        for (const auto& s : rotations(yval(a), yval(b), yval(c), x)) pts.push_back(s);
}
}  // namespace detail

struct symmetry_catalog {
    std::vector<symmetry> members;
    std::array<effect_row, 7> effects{};  // per group, filled by build_catalog

    std::vector<const symmetry*> of(sym_group g) const {
        std::vector<const symmetry*> out;
        for (const auto& m : members)
            if (m.group == g) out.push_back(&m);
        return out;
    }
};

inline symmetry_catalog build_catalog() {
    using detail::yval;
    symmetry_catalog cat;
    auto add = [&](sym_group g, std::vector<symbol4d> pts) {
        int ord = static_cast<int>(cat.of(g).size()) + 1;
        cat.members.push_back({g, ord, std::move(pts)});
    };

    // XXXX under global sign flip.
    for (int m = 0; m < 8; ++m) {
        symbol4d a{};
        a[0] = -1;
        for (int i = 1; i < 4; ++i) a[i] = (m >> (3 - i)) & 1 ? 1 : -1;
        symbol4d b{-a[0], -a[1], -a[2], -a[3]};
        add(sym_group::s2, {a, b});
    }

    // YYYY under the global L->z->H rotation; representatives have wire A at L.
    for (int m = 0; m < 27; ++m) {
        int t[4] = {0, m / 9, (m / 3) % 3, m % 3};
        std::vector<symbol4d> pts;
        for (int k = 0; k < 3; ++k) pts.push_back({yval(t[0] + k), yval(t[1] + k), yval(t[2] + k), yval(t[3] + k)});
        add(sym_group::s3, pts);
    }

    // 2X2Y: Y values follow linear forms of (k1,k0) with per-pattern shifts.
    {
        const std::array<std::array<int, 2>, 6> ypos{{{0, 1}, {2, 3}, {0, 3}, {1, 2}, {0, 2}, {1, 3}}};
        std::array<std::array<int, 4>, 6> shift{};
        std::array<int, 4> used{};
        for (int p = 0; p < 6; ++p)
            for (int i : ypos[p]) shift[p][i] = used[i]++;
        for (int k1 = 0; k1 < 3; ++k1)
            for (int k0 = 0; k0 < 3; ++k0) {
                int f[4] = {k1, k0, k1 + k0, k1 + 2 * k0};
                std::vector<symbol4d> pts;
                for (int p = 0; p < 6; ++p) {
                    int i = ypos[p][0], j = ypos[p][1];
                    int xs[2], nx = 0;
                    for (int w = 0; w < 4; ++w)
                        if (w != i && w != j) xs[nx++] = w;
                    for (int sg = 0; sg < 4; ++sg) {
                        symbol4d s{};
                        s[i] = yval(f[i] + shift[p][i]);
                        s[j] = yval(f[j] + shift[p][j]);
                        s[xs[0]] = sg & 2 ? 1 : -1;
                        s[xs[1]] = sg & 1 ? 1 : -1;
                        pts.push_back(s);
                    }
                }
                add(sym_group::s24_even, pts);
            }
    }

    // 1X3Y: triples of Y values rotated around the X position.
    {
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& p : perms) {
            std::vector<symbol4d> pts;
            detail::add_y_triple(pts, p[0], p[1], p[2]);
            add(sym_group::s8, pts);
        }
        // (a,a,b) paired with (c,c,b), b at the same slot.
        const int pairs[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}};  // a, b, c
        for (const auto& q : pairs)
            for (int slot = 0; slot < 3; ++slot) {
                std::vector<symbol4d> pts;
                for (int first : {q[0], q[2]}) {
                    int t[3] = {first, first, first};
                    t[slot] = q[1];
                    detail::add_y_triple(pts, t[0], t[1], t[2]);
                }
                add(sym_group::s16, pts);
            }
        std::vector<symbol4d> pts;
        for (int v = 0; v < 3; ++v) detail::add_y_triple(pts, v, v, v);
        add(sym_group::s24_10, pts);
    }

    // 3X1Y: an X sign triple with its negation, every Y value, four rotations.
    for (int m = 0; m < 4; ++m) {
        int s2 = -1, s1 = m & 2 ? 1 : -1, s0 = m & 1 ? 1 : -1;
        std::vector<symbol4d> pts;
        for (int sign : {1, -1})
            for (int v = 0; v < 3; ++v)
                for (const auto& s : detail::rotations(sign * s2, sign * s1, sign * s0, yval(v))) pts.push_back(s);
        add(sym_group::s24_odd, pts);
    }
    for (int i = 0; i < 7; ++i) cat.effects[i] = effect_of(*cat.of(all_groups[i]).front());
    return cat;
}

// Catalog invariants: 64 members, disjoint cover of 625 points, bin-uniform, page-uniform per group.
inline std::vector<std::string> check_catalog(const symmetry_catalog& cat) {
    std::vector<std::string> errs;
    if (cat.members.size() != 64) errs.push_back("catalog must hold 64 symmetries");
    std::set<symbol4d> seen;
    std::size_t total = 0;
    for (const auto& m : cat.members) {
        total += m.points.size();
        for (const auto& p : m.points) seen.insert(p);
        try {
            effect_of(m);
        } catch (const std::exception& e) {
            errs.push_back(std::string(group_name(m.group)) + std::to_string(m.ordinal) + ": " + e.what());
        }
    }
    if (total != 625 || seen.size() != 625) errs.push_back("catalog does not partition the 625 points");
    for (auto g : all_groups) {
        auto ms = cat.of(g);
        if (ms.empty()) continue;
        auto ref = effect_of(*ms.front());
        for (auto* m : ms)
            if (!(effect_of(*m) == ref)) errs.push_back(std::string("group ") + group_name(g) + " is not homogeneous");
    }
    return errs;
}

inline const effect_row& group_effect(const symmetry_catalog& cat, sym_group g) {
    return cat.effects[static_cast<int>(g)];
}

struct group_sums {
    std::array<std::int64_t, 7> R{};  // indexed like all_groups
    std::int64_t& operator[](sym_group g) { return R[static_cast<int>(g)]; }
    std::int64_t operator[](sym_group g) const { return R[static_cast<int>(g)]; }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto r : R) t += r;
        return t;
    }
};

inline const std::array<int, 7> group_members{8, 27, 6, 9, 9, 1, 4};

struct balance_solution {
    std::int64_t H_z = 0, N_E = 0;
    group_sums sums;
    std::int64_t H_y = 0, H_x = 0;
    std::array<std::int64_t, 8> H_pages{};
    std::int64_t H_page = 0;
    std::int64_t unbalance() const { return H_y > H_x ? H_y - H_x : H_x - H_y; }
    std::int64_t signed_unbalance() const { return H_y - H_x; }
    // distinct points in use per page group when each sum is spread round-robin
    std::int64_t eff_p0 = 0, eff_even = 0, eff_odd = 0;
};

inline balance_solution evaluate(const symmetry_catalog& cat, const group_sums& g, std::int64_t N_E = 0) {
    balance_solution s;
    s.N_E = N_E;
    s.sums = g;
    for (int i = 0; i < 7; ++i) {
        auto e = group_effect(cat, all_groups[i]);
        s.H_y += g.R[i] * e.dY;
        s.H_x += g.R[i] * e.dX;
        s.H_z += g.R[i] * e.dZ;
        for (int p = 0; p < 8; ++p) s.H_pages[p] += g.R[i] * e.dPage[p];
    }
    s.H_page = s.H_pages[0];
    auto used = [&](sym_group grp) {
        int i = static_cast<int>(grp);
        return std::min<std::int64_t>(g.R[i], group_members[i]) * group_effect(cat, grp).dZ;
    };
    s.eff_p0 = used(sym_group::s2) + used(sym_group::s3);
    s.eff_even = used(sym_group::s24_even);
    s.eff_odd = used(sym_group::s8) + used(sym_group::s16) + used(sym_group::s24_10) + used(sym_group::s24_odd);
    return s;
}

struct verify_report {
    bool ok = true;
    std::vector<std::string> violations;
    double p_y = 0, p_x = 0;
};

inline verify_report verify(const balance_solution& s) {
    verify_report r;
    auto fail = [&](std::string m) {
        r.ok = false;
        r.violations.push_back(std::move(m));
    };
    if (3 * s.H_y + 2 * s.H_x != s.H_z) fail("3*H_y + 2*H_x != H_z");
    for (int p = 0; p < 8; ++p)
        if (s.H_pages[p] != s.H_pages[0]) fail("pages are not uniform");
    if (8 * s.H_page != s.H_z) fail("8*H_page != H_z");
    for (auto v : s.sums.R)
        if (v < 0) fail("negative repeat count");
    const std::int64_t ne = std::max<std::int64_t>(s.N_E, 1);
    if (s.eff_p0 < ne) fail("page P0 below effective-size floor");
    if (s.eff_even < 3 * ne) fail("pages P2,P4,P6 below effective-size floor");
    if (s.eff_odd < 4 * ne) fail("odd pages below effective-size floor");
    if (s.H_z > 0) {
        r.p_y = double(s.H_y) / double(s.H_z);
        r.p_x = double(s.H_x) / double(s.H_z);
    }
    return r;
}

// Exhaustive optimum of the balancing problem. Odd-page and P0 parts are separable:
// the level difference contributed by the odd pages depends only on the 24S-odd sum.
inline balance_solution solve(std::int64_t H_z, std::int64_t N_E) {
    const symmetry_catalog cat = build_catalog();
    if (H_z <= 0 || H_z % 8 != 0) throw std::invalid_argument("infeasible: H_z must be a positive multiple of 8");
    if (H_z < 8 * N_E) throw std::invalid_argument("infeasible: H_z < 8*N_E");
    const std::int64_t Hp = H_z / 8;
    if (Hp % 8 != 0) throw std::invalid_argument("infeasible: uniform even pages need H_page divisible by 8");
    if (Hp % 2 != 0) throw std::invalid_argument("infeasible: odd pages need an even H_page");
    const std::int64_t G24e = Hp / 8;
    if (24 * std::min<std::int64_t>(G24e, 9) < 3 * N_E)
        throw std::invalid_argument("infeasible: pages P2,P4,P6 below effective-size floor");

    struct p0_opt {
        std::int64_t g2, g3;
    };
    std::vector<p0_opt> p0;
    for (std::int64_t g2 = 0; 2 * g2 <= Hp; ++g2) {
        if ((Hp - 2 * g2) % 3) continue;
        std::int64_t g3 = (Hp - 2 * g2) / 3;
        if (2 * std::min<std::int64_t>(g2, 8) + 3 * std::min<std::int64_t>(g3, 27) >= N_E) p0.push_back({g2, g3});
    }
    if (p0.empty()) throw std::invalid_argument("infeasible: page P0 below effective-size floor");

    struct odd_opt {
        std::int64_t g8, g16, g10, g24;
    };
    std::vector<odd_opt> odd;
    for (std::int64_t g24 = 0; 6 * g24 <= Hp; ++g24) {
        std::int64_t rest = Hp / 2 - 3 * g24;  // = g8 + 2*g16 + 3*g10
        std::optional<odd_opt> best;
        auto better = [](const odd_opt& a, const odd_opt& b) {
            auto ra = a.g8 + a.g16 + a.g10, rb = b.g8 + b.g16 + b.g10;
            if (ra != rb) return ra < rb;
            return std::tie(a.g8, a.g16, a.g10) < std::tie(b.g8, b.g16, b.g10);
        };
        for (std::int64_t g10 = 0; 3 * g10 <= rest; ++g10)
            for (std::int64_t g16 = 0; 3 * g10 + 2 * g16 <= rest; ++g16) {
                std::int64_t g8 = rest - 3 * g10 - 2 * g16;
                std::int64_t eff = 8 * std::min<std::int64_t>(g8, 6) + 16 * std::min<std::int64_t>(g16, 9) +
                                   24 * std::min<std::int64_t>(g10, 1) + 24 * std::min<std::int64_t>(g24, 4);
                if (eff < 4 * N_E) continue;
                odd_opt o{g8, g16, g10, g24};
                if (!best || better(o, *best)) best = o;
            }
        if (best) odd.push_back(*best);
    }
    if (odd.empty()) throw std::invalid_argument("infeasible: odd pages below effective-size floor");

    std::optional<group_sums> best;
    std::int64_t best_d = 0;
    for (const auto& a : p0)
        for (const auto& o : odd) {
            group_sums g;
            g[sym_group::s2] = a.g2;
            g[sym_group::s3] = a.g3;
            g[sym_group::s8] = o.g8;
            g[sym_group::s16] = o.g16;
            g[sym_group::s24_even] = G24e;
            g[sym_group::s24_10] = o.g10;
            g[sym_group::s24_odd] = o.g24;
            std::int64_t d = (a.g3 - a.g2) + (Hp / 2 - 10 * o.g24) - 2 * G24e;
            if (d < 0) d = -d;
            if (!best || d < best_d || (d == best_d && (g.total() < best->total() ||
                                                        (g.total() == best->total() && g.R < best->R)))) {
                best = g;
                best_d = d;
            }
        }
    return evaluate(cat, *best, N_E);
}

// The unmodified constellation: every symmetry used once.
inline group_sums original_sums() {
    group_sums g;
    for (int i = 0; i < 7; ++i) g.R[i] = group_members[i];
    return g;
}

// Max relative deviation from 1/B when k uniform bits are reduced mod B.
inline double subscrambler_error(unsigned k, unsigned B) {
    if (B < 2) throw std::invalid_argument("base must be >= 2");
    if (k > 62 || (std::uint64_t(1) << k) < B) throw std::invalid_argument("too few input bits for base");
    std::uint64_t n = std::uint64_t(1) << k;
    std::uint64_t r = n % B;
    if (r == 0) return 0.0;
    return double(std::max<std::uint64_t>(r, B - r)) / double(n);
}

}  // namespace pmadesk
