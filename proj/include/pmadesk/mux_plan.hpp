#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pmadesk {

using bigint = boost::multiprecision::cpp_int;

inline bigint ipow(std::uint64_t base, unsigned n) { return boost::multiprecision::pow(bigint(base), n); }

// Digits with thousands separators, as printed in the redundancy tables.
inline std::string group_digits(const bigint& v) {
    std::string s = v.str();
    std::string out;
    int lead = static_cast<int>(s.size()) % 3;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i && (static_cast<int>(i) - lead) % 3 == 0) out += ',';
        out += s[i];
    }
    return out;
}

struct capacity_result {
    bool fits;
    bigint lhs;  // F * base_data^n
    bigint rhs;  // base_transport^n
};

inline capacity_result capacity_check(std::uint64_t F, unsigned n, std::uint64_t base_data, std::uint64_t base_transport) {
    if (F < 1 || n < 1 || base_data < 1 || base_transport < 1)
        throw std::invalid_argument("capacity_check arguments must be >= 1");
    capacity_result r{false, bigint(F) * ipow(base_data, n), ipow(base_transport, n)};
    r.fits = r.lhs <= r.rhs;
    return r;
}

// Smallest n with E * N_C^n <= N_E^n.
inline unsigned min_echo_words(std::uint64_t E, std::uint64_t N_E, std::uint64_t N_C) {
    if (N_C < 1) throw std::invalid_argument("N_C must be >= 1");
    if (N_E <= N_C) throw std::domain_error("no surplus capacity: N_E must exceed N_C");
    if (E < 2) throw std::invalid_argument("echo modulus must be >= 2");
    bigint lhs = E, rhs = 1;
    unsigned n = 0;
    while (lhs > rhs) {
        lhs *= N_C;
        rhs *= N_E;
        ++n;
    }
    return n;
}

inline unsigned min_echo_words_float(std::uint64_t E, std::uint64_t N_E, std::uint64_t N_C) {
    return static_cast<unsigned>(std::ceil(std::log(double(E)) / std::log(double(N_E) / double(N_C))));
}

inline std::uint64_t floor_pow2(std::uint64_t v) { return v ? std::uint64_t(1) << (63 - __builtin_clzll(v)) : 0; }

inline bool is_pow2(std::uint64_t v) { return v && !(v & (v - 1)); }

struct echo_entry {
    std::uint64_t E;
    std::optional<unsigned> n_e;  // empty when E > E_max
};

struct mux_variant {
    std::uint64_t N_C, N_R, N_E, gcd, E_max;
    std::vector<echo_entry> echo_table;
};

inline const std::vector<std::uint64_t> echo_moduli{2, 4, 8, 16, 32, 64};

inline mux_variant variant(std::uint64_t N_C, std::uint64_t N_R) {
    if (N_C < 1 || N_R < 1) throw std::invalid_argument("N_C and N_R must be >= 1");
    mux_variant v{N_C, N_R, N_C + N_R, std::gcd(N_C, N_R), N_C / floor_pow2(N_R), {}};
    for (auto E : echo_moduli) {
        echo_entry e{E, std::nullopt};
        if (E <= v.E_max) e.n_e = min_echo_words(E, v.N_E, N_C);
        v.echo_table.push_back(e);
    }
    return v;
}

struct round_step {
    std::uint64_t F;
    unsigned n;
};

struct round_plan {
    std::vector<round_step> rounds;
    unsigned k() const { return static_cast<unsigned>(rounds.size()); }
    unsigned total() const {
        unsigned t = 0;
        for (const auto& r : rounds) t += r.n;
        return t;
    }
    unsigned max_round() const {
        unsigned m = 0;
        for (const auto& r : rounds) m = std::max(m, r.n);
        return m;
    }
};

namespace detail {
inline void compose(unsigned remaining, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (unsigned part = 1; part <= remaining; ++part) {
        cur.push_back(part);
        compose(remaining - part, cur, out);
        cur.pop_back();
    }
}
}  // namespace detail

// Every ordered split of log2(E) halvings into rounds, each round at its minimal duration.
inline std::vector<round_plan> round_plans(std::uint64_t E, std::uint64_t N_E, std::uint64_t N_C) {
    if (!is_pow2(E) || E < 2) throw std::invalid_argument("echo modulus must be a power of two >= 2");
    unsigned halvings = static_cast<unsigned>(__builtin_ctzll(E));
    std::vector<std::vector<unsigned>> parts;
    std::vector<unsigned> cur;
    detail::compose(halvings, cur, parts);
    std::vector<round_plan> plans;
    for (const auto& p : parts) {
        round_plan plan;
        for (unsigned h : p) {
            std::uint64_t F = std::uint64_t(1) << h;
            plan.rounds.push_back({F, min_echo_words(F, N_E, N_C)});
        }
        plans.push_back(plan);
    }
    return plans;
}

struct mux_profile {
    std::uint64_t N_E, N_C, N_R;
    unsigned n_e, k;
};

// Root types: N_C -> N_E alphabets whose per-round halving fits n_e words.
inline mux_profile profile(const std::string& root_type) {
    if (root_type == "2-3") return {3, 2, 1, 2, 1};
    if (root_type == "4-5") return {5, 4, 1, 4, 2};
    if (root_type == "8-9") return {9, 8, 1, 6, 3};
    if (root_type == "16-21") return {21, 16, 5, 3, 4};
    throw std::invalid_argument("unknown root type: " + root_type);
}

inline const std::vector<std::string> root_types{"2-3", "4-5", "8-9", "16-21"};

}  // namespace pmadesk
