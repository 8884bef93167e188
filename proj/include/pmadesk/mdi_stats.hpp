#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "pmadesk/pam_core.hpp"
#include "pmadesk/stellar.hpp"

namespace pmadesk {

// PAM17 output in eighths of U_ref: out(t) = 3 a(t) + a(t-1), a in -2..2.
inline int filter_out(int a_now, int a_prev) { return 3 * a_now + a_prev; }

struct filter_level {
    int out;
    int count;  // out of 25 input pairs
    rational probability;
    rational power;  // (out/8)^2
};

inline std::vector<filter_level> filter_distribution() {
    std::array<int, 17> c{};
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) ++c[filter_out(a, b) + 8];
    std::vector<filter_level> out;
    for (int o = -8; o <= 8; ++o) out.push_back({o, c[o + 8], rational(c[o + 8], 25), rational(o * o, 64)});
    return out;
}

struct transit {
    int from, to;
    bool possible;
    int count;  // input triples (a0, a1, a2) producing it, out of 125
    rational hit_rate;
    rational hop_power;  // (|to - from| / 16)^2
};

inline std::vector<transit> transit_matrix() {
    std::array<std::array<int, 17>, 17> c{};
    for (int a0 = -2; a0 <= 2; ++a0)
        for (int a1 = -2; a1 <= 2; ++a1)
            for (int a2 = -2; a2 <= 2; ++a2) ++c[filter_out(a1, a0) + 8][filter_out(a2, a1) + 8];
    std::vector<transit> out;
    for (int i = -8; i <= 8; ++i)
        for (int j = -8; j <= 8; ++j) {
            int n = c[i + 8][j + 8];
            out.push_back({i, j, n > 0, n, rational(n, 125), rational((j - i) * (j - i), 256)});
        }
    return out;
}

struct moments {
    double mean = 0, dev = 0, min = 0, max = 0;
    double span() const { return max - min; }
};

struct stats_report {
    moments power;
    std::optional<moments> wobble;  // empty for non-hyperspherical processes
    moments change;
    std::optional<double> stderr_mean;  // Monte Carlo only
    std::optional<std::uint64_t> seed;
};

struct exact_moments {
    rational mean, var, min, max;
};

// Exact per-wire figures for the iid reference, then four independent wires averaged:
// mean and extremes carry over, variance divides by four.
struct reference_exact {
    exact_moments power, change;
};

inline reference_exact reference_exact_stats() {
    auto accumulate = [](const std::vector<std::pair<rational, rational>>& xs) {
        exact_moments m{0, 0, xs.front().first, xs.front().first};
        rational m2 = 0;
        for (auto& [v, p] : xs) {
            m.mean += p * v;
            m2 += p * v * v;
            m.min = std::min(m.min, v);
            m.max = std::max(m.max, v);
        }
        m.var = (m2 - m.mean * m.mean) / 4;
        return m;
    };
    std::vector<std::pair<rational, rational>> pw, ch;
    for (int a0 = -2; a0 <= 2; ++a0)
        for (int a1 = -2; a1 <= 2; ++a1)
            for (int a2 = -2; a2 <= 2; ++a2) {
                int o1 = filter_out(a1, a0), o2 = filter_out(a2, a1);
                pw.push_back({rational(o2 * o2, 64), rational(1, 125)});
                ch.push_back({rational((o2 - o1) * (o2 - o1), 256), rational(1, 125)});
            }
    return {accumulate(pw), accumulate(ch)};
}

inline moments to_moments(const exact_moments& e) {
    return {to_double(e.mean), std::sqrt(to_double(e.var)), to_double(e.min), to_double(e.max)};
}

inline stats_report reference_stats() {
    auto e = reference_exact_stats();
    return {to_moments(e.power), std::nullopt, to_moments(e.change), std::nullopt, std::nullopt};
}

// Monte Carlo estimate of the reference process; extremes are the observed ones.
inline stats_report reference_stats_mc(std::uint64_t samples, std::optional<std::uint64_t> seed) {
    if (!seed) throw std::invalid_argument("Monte Carlo run needs an explicit seed");
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    std::mt19937_64 rng(*seed);
    std::uniform_int_distribution<int> level(-2, 2);
    std::array<int, 4> prev_a{}, prev_o{};
    for (int w = 0; w < 4; ++w) {
        int a0 = level(rng);
        prev_a[w] = level(rng);
        prev_o[w] = filter_out(prev_a[w], a0);
    }
    double s = 0, s2 = 0, c = 0, c2 = 0;
    double pmin = 1e9, pmax = -1, cmin = 1e9, cmax = -1;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double p = 0, ch = 0;
        for (int w = 0; w < 4; ++w) {
            int a = level(rng);
            int o = filter_out(a, prev_a[w]);
            p += (o / 8.0) * (o / 8.0) / 4;
            ch += ((o - prev_o[w]) / 16.0) * ((o - prev_o[w]) / 16.0) / 4;
            prev_a[w] = a;
            prev_o[w] = o;
        }
        s += p, s2 += p * p, c += ch, c2 += ch * ch;
        pmin = std::min(pmin, p), pmax = std::max(pmax, p);
        cmin = std::min(cmin, ch), cmax = std::max(cmax, ch);
    }
    const double n = double(samples);
    stats_report r;
    r.power = {s / n, std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n))), pmin, pmax};
    r.change = {c / n, std::sqrt(std::max(0.0, c2 / n - (c / n) * (c / n))), cmin, cmax};
    r.stderr_mean = r.power.dev / std::sqrt(n);
    r.seed = seed;
    return r;
}

// Statistics of a fixed word sequence; each word holds four wire levels in units of U_ref.
inline stats_report sequence_stats(const std::vector<std::array<double, 4>>& words) {
    if (words.empty()) throw std::invalid_argument("empty sequence");
    auto summarize = [](const std::vector<double>& v) {
        moments m{0, 0, v.front(), v.front()};
        double s2 = 0;
        for (double x : v) {
            m.mean += x;
            s2 += x * x;
            m.min = std::min(m.min, x);
            m.max = std::max(m.max, x);
        }
        m.mean /= v.size();
        m.dev = std::sqrt(std::max(0.0, s2 / v.size() - m.mean * m.mean));
        return m;
    };
    std::vector<double> p, c;
    for (std::size_t i = 0; i < words.size(); ++i) {
        double w = 0;
        for (double x : words[i]) w += x * x / 4;
        p.push_back(w);
        if (i) {
            double d = 0;
            for (int k = 0; k < 4; ++k) d += (words[i][k] - words[i - 1][k]) * (words[i][k] - words[i - 1][k]) / 16;
            c.push_back(d);
        }
    }
    if (c.empty()) c.push_back(0);
    return {summarize(p), std::nullopt, summarize(c), std::nullopt, std::nullopt};
}

// Word process over a coupled stellar constellation: each word picks a view per plane and
// which plane takes the outer orbit. Successors are uniform over those the rule allows.
struct dynamic_result {
    stats_report report;
    double achieved_gain;  // dB, zero for the static rule
    int states;
    int successors;        // allowed successors per state
    double stationarity_residual;
};

inline int view_distance(int a, int b, int N) {
    int d = ((a - b) % N + N) % N;
    return std::min(d, N - d);
}

inline bool transit_allowed(int vAB, int vCD, int wAB, int wCD, int N, const jump_rule& rule) {
    const int dAB = view_distance(vAB, wAB, N), dCD = view_distance(vCD, wCD, N);
    if (rule.excluded && dAB < rule.excluded) return false;
    if (rule.excluded && rule.both && dCD < rule.excluded) return false;
    if (rule.diagonal && (2 * dAB == N || 2 * dCD == N)) return false;
    return true;
}

inline dynamic_result dynamic_stats(double p, const jump_rule& rule, std::optional<double> rho = std::nullopt) {
    const auto st = ideal_stellar_table(p);
    const int N = st.N;
    const double r = rho.value_or(st.r);
    if (!(r > 0) || r > 1) throw std::invalid_argument("orbit ratio must be in (0, 1]");
    const int S = 2 * N * N;
    auto decode = [N](int s, int& a, int& c, int& o) {
        o = s % 2;
        a = (s / 2) % N;
        c = s / (2 * N);
    };
    auto angle = [&](int v) { return st.dphi / 2 + v * st.dphi; };
    auto change = [&](int s, int t) {
        int a0, c0, o0, a1, c1, o1;
        decode(s, a0, c0, o0);
        decode(t, a1, c1, o1);
        // o = 0: AB outer, CD inner
        double rA0 = o0 ? r : 1, rC0 = o0 ? 1 : r, rA1 = o1 ? r : 1, rC1 = o1 ? 1 : r;
        double dA = rA0 * rA0 + rA1 * rA1 - 2 * rA0 * rA1 * std::cos(angle(a1) - angle(a0));
        double dC = rC0 * rC0 + rC1 * rC1 - 2 * rC0 * rC1 * std::cos(angle(c1) - angle(c0));
        return (dA + dC) / 16;
    };
    std::vector<std::vector<int>> next(S);
    for (int s = 0; s < S; ++s) {
        int a0, c0, o0;
        decode(s, a0, c0, o0);
        for (int t = 0; t < S; ++t) {
            int a1, c1, o1;
            decode(t, a1, c1, o1);
            if (transit_allowed(a0, c0, a1, c1, N, rule)) next[s].push_back(t);
        }
        if (next[s].empty()) throw std::runtime_error("disconnected transition graph: a state has no successor");
    }
    {
        std::vector<char> seen(S, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            for (int t : next[s])
                if (!seen[t]) seen[t] = 1, ++reached, stack.push_back(t);
        }
        if (reached != S) throw std::runtime_error("disconnected transition graph");
    }
    // stationary distribution by power iteration (lazy chain avoids periodicity)
    std::vector<double> pi_(S, 1.0 / S), nxt(S);
    auto step = [&](const std::vector<double>& in, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (int s = 0; s < S; ++s) {
            double w = in[s] / next[s].size();
            for (int t : next[s]) out[t] += w;
        }
    };
    double residual = 1;
    for (int it = 0; it < 10000 && residual > 1e-14; ++it) {
        step(pi_, nxt);
        residual = 0;
        for (int s = 0; s < S; ++s) {
            residual = std::max(residual, std::abs(nxt[s] - pi_[s]));
            pi_[s] = 0.5 * (pi_[s] + nxt[s]);
        }
    }
    step(pi_, nxt);
    residual = 0;
    for (int s = 0; s < S; ++s) residual = std::max(residual, std::abs(nxt[s] - pi_[s]));

    moments ch{0, 0, 1e9, -1};
    double m2 = 0;
    for (int s = 0; s < S; ++s) {
        const double w = pi_[s] / next[s].size();
        for (int t : next[s]) {
            double c = change(s, t);
            ch.mean += w * c;
            m2 += w * c * c;
            ch.min = std::min(ch.min, c);
            ch.max = std::max(ch.max, c);
        }
    }
    ch.dev = std::sqrt(std::max(0.0, m2 - ch.mean * ch.mean));
    const double W = stellar_mean_power(r);
    dynamic_result d;
    d.report = {{W, 0, W, W}, moments{}, ch, std::nullopt, std::nullopt};
    d.states = S;
    d.successors = static_cast<int>(next[0].size());
    d.stationarity_residual = residual;
    d.achieved_gain = 0;
    if (rule.excluded) {
        double delta = rule.excluded * st.dphi * (rule.both ? std::sqrt(2.0) : 1.0);
        d.achieved_gain = gain(2 * pi, delta);
    }
    return d;
}

// Wobble of an arranged outline: every word pairs an outer room on one plane with an inner
// room on the other; wobble is the deviation of the word's power from the ideal design power.
struct outline_room {
    bool outer;
    double ideal_radius;  // in grid steps
    double radius;        // as arranged
};

inline stats_report wobble_stats(const std::vector<outline_room>& rooms, double full_scale) {
    if (!(full_scale > 0)) throw std::invalid_argument("full scale must be positive");
    std::vector<const outline_room*> outer, inner;
    for (const auto& r : rooms) (r.outer ? outer : inner).push_back(&r);
    if (outer.empty() || inner.empty()) throw std::invalid_argument("outline needs rooms on both orbits");
    double Rd = 0, rd = 0;
    for (auto* r : outer) Rd += r->ideal_radius * r->ideal_radius / outer.size();
    for (auto* r : inner) rd += r->ideal_radius * r->ideal_radius / inner.size();
    const double U2 = full_scale * full_scale;
    const double design = (Rd + rd) / (4 * U2);
    moments pw{0, 0, 1e9, -1}, wb{0, 0, 1e9, -1};
    double p2 = 0, w2 = 0;
    const double n = double(outer.size() * inner.size());
    for (auto* a : outer)
        for (auto* b : inner) {
            double W = (a->radius * a->radius + b->radius * b->radius) / (4 * U2);
            double w = std::abs(W - design);
            pw.mean += W / n, p2 += W * W / n;
            wb.mean += w / n, w2 += w * w / n;
            pw.min = std::min(pw.min, W), pw.max = std::max(pw.max, W);
            wb.min = std::min(wb.min, w), wb.max = std::max(wb.max, w);
        }
    pw.dev = std::sqrt(std::max(0.0, p2 - pw.mean * pw.mean));
    wb.dev = std::sqrt(std::max(0.0, w2 - wb.mean * wb.mean));
    return {pw, wb, moments{}, std::nullopt, std::nullopt};
}

inline std::vector<outline_room> outline_rooms(const arranged_outline& o, const std::vector<room>& ideal) {
    if (o.rooms.size() != ideal.size()) throw std::invalid_argument("outline and room list differ in size");
    std::vector<outline_room> out;
    for (std::size_t i = 0; i < ideal.size(); ++i) out.push_back({ideal[i].outer, o.rooms[i].ideal_radius, o.rooms[i].radius});
    return out;
}

}  // namespace pmadesk
