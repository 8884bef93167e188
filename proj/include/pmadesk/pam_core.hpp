#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace pmadesk {

using rational = boost::rational<std::int64_t>;

inline double to_double(const rational& r) { return boost::rational_cast<double>(r); }

// PAM5 levels in half-steps of U_ref/2: -2..+2, +-2 is full scale.
enum class level_class { x, y };

constexpr level_class class_of(int v) { return (v == -1 || v == 1) ? level_class::x : level_class::y; }
constexpr bool valid_level(int v) { return v >= -2 && v <= 2; }

inline rational level_power(int v) { return rational(v * v, 4); }

inline const rational P_X{1, 4};
inline const rational P_Y{2, 3};

using symbol4d = std::array<int, 4>;

// Subset as a 4-bit mask, bit 3 = wire A, set bit = X level.
using subset_mask = unsigned;

inline subset_mask subset_of(const symbol4d& s) {
    subset_mask m = 0;
    for (int i = 0; i < 4; ++i)
        if (class_of(s[i]) == level_class::x) m |= 1u << (3 - i);
    return m;
}

inline std::string subset_name(subset_mask m) {
    std::string s(4, 'Y');
    for (int i = 0; i < 4; ++i)
        if (m & (1u << (3 - i))) s[i] = 'X';
    return s;
}

inline subset_mask subset_from_name(const std::string& s) {
    if (s.size() != 4) throw std::invalid_argument("subset name must have 4 letters: " + s);
    subset_mask m = 0;
    for (int i = 0; i < 4; ++i) {
        if (s[i] == 'X') m |= 1u << (3 - i);
        else if (s[i] != 'Y') throw std::invalid_argument("bad subset letter in " + s);
    }
    return m;
}

// Each page holds a subset and its complement.
inline const std::array<std::array<const char*, 2>, 8> page_subsets{{
    {"XXXX", "YYYY"}, {"XXXY", "YYYX"}, {"XXYY", "YYXX"}, {"XXYX", "YYXY"},
    {"XYYX", "YXXY"}, {"XYYY", "YXXX"}, {"XYXY", "YXYX"}, {"XYXX", "YXYY"},
}};

inline const std::array<int, 16>& subset_page_table() {
    static const std::array<int, 16> table = [] {
        std::array<int, 16> t{};
        for (int p = 0; p < 8; ++p)
            for (const char* s : page_subsets[p]) t[subset_from_name(s)] = p;
        return t;
    }();
    return table;
}

inline int page_of_subset(subset_mask m) { return subset_page_table().at(m); }

struct slice {
    int nx = 0;
    int ny = 0;
    friend bool operator==(const slice&, const slice&) = default;
};

inline rational slice_power(slice s) {
    if (s.nx < 0 || s.ny < 0 || s.nx + s.ny != 4) throw std::invalid_argument("slice must satisfy nx+ny=4");
    return (P_X * s.nx + P_Y * s.ny) / 4;
}

struct classification {
    subset_mask subset;
    int page;
    slice sl;
    int parity;
    rational power;
};

inline classification classify(const symbol4d& s) {
    for (int v : s)
        if (!valid_level(v)) throw std::invalid_argument("PAM5 level out of range");
    classification c{};
    c.subset = subset_of(s);
    c.page = page_of_subset(c.subset);
    c.sl.nx = std::popcount(c.subset);
    c.sl.ny = 4 - c.sl.nx;
    c.parity = c.sl.nx % 2;
    c.power = 0;
    for (int v : s) c.power += level_power(v);
    c.power /= 4;
    return c;
}

inline std::vector<symbol4d> all_symbols() {
    std::vector<symbol4d> out;
    out.reserve(625);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c)
                for (int d = -2; d <= 2; ++d) out.push_back({a, b, c, d});
    return out;
}

inline std::vector<symbol4d> enumerate_page(int page) {
    if (page < 0 || page > 7) throw std::invalid_argument("page id must be 0..7");
    std::vector<symbol4d> out;
    for (const auto& s : all_symbols())
        if (classify(s).page == page) out.push_back(s);
    return out;
}

struct page_descriptor {
    int id;
    std::array<std::string, 2> subsets;
    int point_count;
    int data = 64;
    int data_star = 8;
    int data_all = 72;
    std::optional<int> ctrl;
    std::optional<int> ctrl_star;
    std::optional<int> free;
};

inline page_descriptor describe_page(int page) {
    page_descriptor d{};
    d.id = page;
    d.subsets = {page_subsets.at(page)[0], page_subsets.at(page)[1]};
    d.point_count = static_cast<int>(enumerate_page(page).size());
    if (page != 0) {
        d.ctrl = 0;
        d.ctrl_star = 0;
        d.free = d.point_count - d.data_all;
    }
    return d;
}

inline std::array<rational, 8> native_distribution() {
    std::array<rational, 8> p{};
    for (const auto& s : all_symbols()) p[classify(s).page] += rational(1, 625);
    return p;
}

// Slice occupancy of one page under a design: (slice, points, probability).
struct slice_share {
    slice sl;
    int points;
    rational probability;
};

struct design_profile {
    std::string name;
    std::array<std::vector<slice_share>, 8> pages;
};

namespace detail {
// Point counts per slice; occurrence follows the point counts unless weights are given.
inline design_profile make_profile(std::string name, int p0x, int p0y, int even, int oddx, int oddy,
                                   rational p0x_weight = -1, rational oddx_weight = -1) {
    design_profile d{std::move(name), {}};
    if (p0x_weight < rational(0)) p0x_weight = rational(p0x, p0x + p0y);
    if (oddx_weight < rational(0)) oddx_weight = rational(oddx, oddx + oddy);
    d.pages[0] = {{{4, 0}, p0x, p0x_weight}, {{0, 4}, p0y, rational(1) - p0x_weight}};
    for (int p : {2, 4, 6}) d.pages[p] = {{{2, 2}, even, rational(1)}};
    for (int p : {1, 3, 5, 7}) d.pages[p] = {{{3, 1}, oddx, oddx_weight}, {{1, 3}, oddy, rational(1) - oddx_weight}};
    return d;
}
}  // namespace detail

// The four designs compared by NAP. The proposed design draws slices with fixed
// weights (1/8 of XXXX in P0, 1/4 of 3X1Y on odd pages) rather than by point count.
inline design_profile profile_by_name(const std::string& name) {
    if (name == "original-1000BASE-T") return detail::make_profile(name, 16, 48, 64, 24, 40);
    if (name == "draft") return detail::make_profile(name, 16, 56, 72, 24, 48);
    if (name == "extensive") return detail::make_profile(name, 16, 80, 72, 24, 54);
    if (name == "proposed") return detail::make_profile(name, 16, 81, 72, 24, 54, rational(1, 8), rational(1, 4));
    throw std::invalid_argument("unknown design profile: " + name);
}

inline const std::array<const char*, 4> builtin_profiles{"original-1000BASE-T", "draft", "extensive", "proposed"};

inline rational page_nap(const design_profile& d, int page) {
    if (page < 0 || page > 7 || d.pages[page].empty())
        throw std::invalid_argument("profile does not define page " + std::to_string(page));
    rational sum = 0, nap = 0;
    for (const auto& s : d.pages[page]) {
        sum += s.probability;
        nap += s.probability * slice_power(s.sl);
    }
    if (sum != rational(1)) throw std::invalid_argument("page occurrence probabilities must sum to 1");
    return nap;
}

struct nap_stats {
    std::array<rational, 8> per_page;
    rational mean;
    double sigma;
    double ratio;
};

inline nap_stats nap_statistics(const design_profile& d) {
    nap_stats st{};
    for (int p = 0; p < 8; ++p) {
        if (d.pages[p].empty()) throw std::invalid_argument("incomplete profile: page " + std::to_string(p));
        st.per_page[p] = page_nap(d, p);
        st.mean += st.per_page[p] / 8;
    }
    rational var = 0;
    for (const auto& n : st.per_page) var += (n - st.mean) * (n - st.mean) / 8;
    st.sigma = std::sqrt(to_double(var));
    st.ratio = st.sigma / to_double(st.mean);
    return st;
}

}  // namespace pmadesk
