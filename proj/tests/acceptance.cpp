// Acceptance suite: one PASS/FAIL line per criterion. Printed values come from the embedded
// data file; derived values are recomputed here by independent means where practical.
#include <fmt/format.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "pmadesk/echo_codec.hpp"
#include "pmadesk/report.hpp"

using namespace pmadesk;
using boost::multiprecision::cpp_int;

namespace {

// Pinned tolerances.
constexpr double tol_nap = 0.005, tol_nap_pct = 0.1;
constexpr double tol_gain_db = 0.05, tol_jump_limit_db = 1e-4;
constexpr double tol_sphere = 0.05;
constexpr double tol_ideal_mean = 0.001;
constexpr double max_radial_error = 0.4;

struct verdict {
    bool pass = true;
    std::vector<std::string> notes;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
    void info(const std::string& s) { notes.push_back(s); }
};

std::map<std::string, paper_cell> paper_of(const std::string& table) {
    std::map<std::string, paper_cell> m;
    for (const auto& p : paper_values())
        if (p.table == table) m[p.cell] = p;
    return m;
}

double num(const std::string& s) {
    auto v = as_number(s);
    if (!v) throw std::runtime_error("not numeric: " + s);
    return *v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

verdict multiplexing() {
    verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto paper = paper_of("mux.variants");
    int checked = 0;
    for (std::uint64_t nr : {1, 2, 4, 6, 8, 10, 12, 14}) {
        auto var = variant(64, nr);
        const std::string k = "N_E=" + std::to_string(var.N_E);
        v.require(std::to_string(var.gcd) == paper.at(k + " gcd").value, k + " gcd");
        v.require(std::to_string(var.E_max) == paper.at(k + " E_max").value, k + " E_max");
        for (const auto& e : var.echo_table) {
            const auto& p = paper.at(k + " n_e E=" + std::to_string(e.E));
            std::string got = e.n_e ? std::to_string(*e.n_e) : "—";
            // independent oracle: smallest n with E * 64^n <= N_E^n
            if (e.n_e) {
                cpp_int lhs = e.E, rhs = 1;
                unsigned n = 0;
                while (lhs > rhs) lhs *= 64, rhs *= var.N_E, ++n;
                v.require(n == *e.n_e, k + " oracle E=" + std::to_string(e.E));
            }
            if (p.known_discrepancy()) {
                v.require(got == "269" && p.value == "267", "flagged cell should read 269 vs printed 267");
                v.info(fmt::format("{} E={}: computed {} vs printed {}, flagged", k, e.E, got, p.value));
            } else {
                v.require(got == p.value, fmt::format("{} E={}: {} vs {}", k, e.E, got, p.value));
            }
            ++checked;
        }
    }
    const double s = seconds_since(t0);
    v.require(s < 1.0, "runtime");
    v.info(fmt::format("{} n_e cells, {:.3f} s", checked, s));
    return v;
}

verdict redundancy() {
    verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto rows = compare_table("mux.redundancy", redundancy_cells());
    for (const auto& r : rows) v.require(r.status == row_status::match, r.cell + ": " + r.computed + " vs " + r.paper.value_or("?"));
    // native-integer oracle for the two headline inequalities
    const unsigned __int128 a = 2 * 262144ull, b = 531441ull;
    v.require(a == 524288 && a < b, "2*8^6 < 9^6");
    unsigned __int128 p8 = 8, p9 = 1;
    for (int i = 0; i < 18; ++i) p8 *= 8, p9 *= 9;
    v.require(p8 < p9, "8*8^18 < 9^18");
    auto c = capacity_check(8, 18, 8, 9);
    v.require(c.fits && group_digits(c.lhs) == "144,115,188,075,855,872", "8*8^18 big integer string");
    const double s = seconds_since(t0);
    v.require(s < 1.0, "runtime");
    v.info(fmt::format("{} cells, {:.3f} s", rows.size(), s));
    return v;
}

verdict codec_round_trip() {
    verdict v;
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20261018);
    std::uniform_int_distribution<int> len(1, 1500), gap(16, 60), byte(0, 255), spacing(20, 120);
    std::vector<std::optional<std::uint8_t>> in(32, std::nullopt);
    std::size_t octets = 0;
    while (octets < 1000000) {
        int l = std::min<std::size_t>(len(rng), 1000000 - octets);
        for (int i = 0; i < l; ++i) in.push_back(std::uint8_t(byte(rng)));
        octets += l;
        in.insert(in.end(), gap(rng), std::nullopt);
    }
    std::vector<bool> ev(in.size(), false);
    for (std::size_t s = 40 + spacing(rng); s < in.size(); s += spacing(rng)) ev[s] = true;

    codec_config cfg;
    encoder enc(cfg);
    std::vector<tx_word> words;
    words.reserve(in.size() + 64);
    for (std::size_t i = 0; i < in.size(); ++i) words.push_back(enc.push(in[i], ev[i]));
    for (auto& w : enc.finish()) words.push_back(w);

    decoder dec(cfg);
    std::vector<std::uint8_t> out;
    std::vector<std::uint64_t> release, got_events;
    for (const auto& w : words) {
        auto o = dec.push(w);
        for (auto b : o.octets) out.push_back(b), release.push_back(dec.slot() - 1);
        for (auto& e : o.events) got_events.push_back(e.word_index);
    }
    auto tail = dec.finish();
    for (auto b : tail.octets) out.push_back(b), release.push_back(UINT64_MAX);
    for (auto& e : tail.events) got_events.push_back(e.word_index);

    std::vector<std::uint8_t> want;
    std::vector<std::uint64_t> in_idx, wire_idx;
    for (std::size_t i = 0; i < in.size(); ++i)
        if (in[i]) want.push_back(*in[i]), in_idx.push_back(i);
    for (std::size_t i = 0; i < words.size(); ++i)
        if (clear_kind(words[i].kind) == word_kind::data) wire_idx.push_back(i);
    v.require(out == want, "octets differ");

    const auto& acc = enc.accepted_events();
    v.require(!acc.empty(), "no events accepted");
    v.require(got_events == acc, fmt::format("events: {} accepted, {} decoded", acc.size(), got_events.size()));
    for (std::size_t i = 1; i < acc.size(); ++i) v.require(acc[i] - acc[i - 1] >= std::uint64_t(event_cycle), "event spacing");

    // clear path: octets arriving away from any echo window
    std::set<std::uint64_t> busy;
    for (auto e : acc)
        for (std::uint64_t k = e; k < e + 3 * std::uint64_t(event_cycle); ++k) busy.insert(k);
    bool enc_ok = wire_idx.size() == in_idx.size(), dec_ok = release.size() == wire_idx.size();
    std::size_t clear = 0;
    for (std::size_t i = 0; enc_ok && i < in_idx.size(); ++i) enc_ok = wire_idx[i] - in_idx[i] == 6;
    for (std::size_t i = 0; dec_ok && i < wire_idx.size(); ++i) {
        if (busy.count(wire_idx[i])) {
            dec_ok = release[i] >= wire_idx[i] + 7;
        } else {
            dec_ok = release[i] - wire_idx[i] == 7;
            ++clear;
        }
    }
    v.require(enc_ok, "encode latency not 6");
    v.require(dec_ok, "decode latency not 7");
    const double s = seconds_since(t0);
    v.require(s < 30.0, "runtime");
    v.info(fmt::format("{} octets, {} events accepted ({} dropped), {} clear-path octets, {:.1f} s", want.size(), acc.size(),
                       enc.dropped_events(), clear, s));
    return v;
}

verdict nap() {
    verdict v;
    auto paper = paper_of("nap.designs");
    for (const char* d : builtin_profiles) {
        auto s = nap_statistics(profile_by_name(d));
        const std::string k = d;
        auto near = [&](const std::string& cell, double got, double tol) {
            double p = num(paper.at(k + " " + cell).value);
            v.require(std::abs(got - p) <= tol, fmt::format("{} {}: {:.4f} vs {}", d, cell, got, p));
        };
        near("NAP P0", to_double(s.per_page[0]), tol_nap);
        near("NAP P2,4,6", to_double(s.per_page[2]), tol_nap);
        near("NAP P1,3,5,7", to_double(s.per_page[1]), tol_nap);
        near("mean", to_double(s.mean), tol_nap);
        near("sigma", s.sigma, tol_nap);
        near("sigma/mean %", 100 * s.ratio, tol_nap_pct);
    }
    auto o = nap_statistics(profile_by_name("original-1000BASE-T"));
    v.info(fmt::format("original mean {:.4f}, sigma/mean {:.2f}%", to_double(o.mean), 100 * o.ratio));
    return v;
}

verdict symmetries() {
    verdict v;
    auto cat = build_catalog();
    std::set<symbol4d> seen;
    std::size_t total = 0;
    for (const auto& m : cat.members)
        for (const auto& p : m.points) seen.insert(p), ++total;
    v.require(total == 625 && seen.size() == 625, fmt::format("catalog covers {} points, {} distinct", total, seen.size()));
    for (const auto& e : check_catalog(cat)) v.require(false, e);
    auto rows = compare_table("balance.effects", effect_cells());
    for (const auto& r : rows) v.require(r.status == row_status::match, r.cell);
    v.info(fmt::format("{} members, {} effect cells", cat.members.size(), rows.size()));
    return v;
}

verdict balancing() {
    verdict v;
    auto t0 = std::chrono::steady_clock::now();
    auto a = solve(576, 72);
    const double ta = seconds_since(t0);
    auto ra = verify(a);
    v.require(ra.ok, "576 infeasible");
    v.require(a.H_page == 72, "576 H_page");
    v.require(a.unbalance() <= 2, "576 unbalance");
    v.require(3 * a.H_y + 2 * a.H_x == 576, "576 level sum");
    t0 = std::chrono::steady_clock::now();
    auto b = solve(640, 72);
    const double tb = seconds_since(t0);
    v.require(verify(b).ok && b.H_y == 128 && b.H_x == 128, "640 not exactly balanced");
    v.require(ta < 10 && tb < 10, "runtime");
    v.info(fmt::format("576 -> ({}, {}) H_page {}; 640 -> ({}, {}); {:.2f} s / {:.2f} s", a.H_y, a.H_x, a.H_page, b.H_y, b.H_x, ta, tb));
    return v;
}

verdict subscrambler() {
    verdict v;
    auto paper = paper_of("balance.subscrambler");
    for (auto [B, k0] : {std::pair{5u, 3u}, std::pair{9u, 4u}})
        for (unsigned k = k0; k < k0 + 4; ++k) {
            // oracle: histogram of all k-bit values reduced mod B
            std::vector<double> h(B, 0);
            for (std::uint64_t x = 0; x < (1ull << k); ++x) ++h[x % B];
            double worst = 0;
            for (double c : h) worst = std::max(worst, std::abs(c * B / double(1ull << k) - 1));
            const double got = subscrambler_error(k, B);
            v.require(std::abs(got - worst) < 1e-12, fmt::format("base-{} 2^{} oracle {:.4f} vs {:.4f}", B, k, worst, got));
            const auto& p = paper.at(fmt::format("base-{} 2^{} error %", B, k)).value;
            v.require(p.starts_with("<") && 100 * got < num(p.substr(1)), fmt::format("base-{} 2^{}: {:.2f}% vs {}", B, k, 100 * got, p));
        }
    v.info(fmt::format("base-5/2^5 {:.3f}%, base-9/2^7 {:.2f}%", 100 * subscrambler_error(5, 5), 100 * subscrambler_error(7, 9)));
    return v;
}

verdict gains() {
    verdict v;
    int n = 0;
    for (const char* t : {"gains.geometric", "gains.angular", "gains.radial", "gains.schemes"}) {
        const std::string fam = std::string(t).substr(6);
        auto cells = gain_cells(fam);
        auto paper = paper_of(t);
        for (const auto& c : cells) {
            auto it = paper.find(c.cell);
            if (it == paper.end()) continue;
            const double tol = c.cell.starts_with("jump limit") ? tol_jump_limit_db : tol_gain_db;
            v.require(std::abs(num(c.value) - num(it->second.value)) <= tol, fmt::format("{} {}: {} vs {}", t, c.cell, c.value, it->second.value));
            ++n;
        }
        v.require(cells.size() >= paper.size(), std::string(t) + " has uncomputed cells");
    }
    // exact targets
    auto l = jump_gain_limits();
    v.require(std::abs(gain(2, 1) - 6.0206) < 1e-4, "6.0206");
    v.require(std::abs(l.single_plane - 2.498775) < tol_jump_limit_db, "2.498775");
    v.require(std::abs(l.double_plane - 3.789347) < tol_jump_limit_db, "3.789347");
    v.require(std::abs(ideal_stellar_table(2).G_phi - 1.1598) < tol_gain_db, "1.1598");
    v.info(fmt::format("{} gain cells; limits {:.6f} / {:.6f}", n, l.single_plane, l.double_plane));
    return v;
}

verdict cic() {
    verdict v;
    auto paper = paper_of("cic.matrix");
    int n = 0;
    for (const auto& c : cic_gain_matrix(16)) {
        const std::string k = fmt::format("AB={} CD={} gain", c.cAB, c.cCD);
        auto it = paper.find(k);
        if (it == paper.end() || it->second.value == "—") continue;
        v.require(std::abs(c.G - num(it->second.value)) <= tol_gain_db, fmt::format("{}: {:.3f} vs {}", k, c.G, it->second.value));
        ++n;
    }
    v.require(n > 0, "no gain cells");
    v.info(fmt::format("{} gain cells within {} dB", n, tol_gain_db));
    return v;
}

verdict sphere() {
    verdict v;
    auto surf = paper_of("sphere.surface");
    auto vol = paper_of("sphere.volume");
    auto check = [&](double got, const std::string& cell, const std::map<std::string, paper_cell>& m) {
        double p = num(m.at(cell).value);
        v.require(std::abs(got - p) <= tol_sphere, fmt::format("{}: {:.3f} vs {}", cell, got, p));
    };
    check(grid_surface(4, 17), "M=17 n=4", surf);  // 19.80
    check(grid_surface(7, 17), "M=17 n=7", surf);  // 33.00
    check(grid_volume(3, 17).V, "M=17 n=3", vol);  // 4.20
    check(grid_volume(5, 17).V, "M=17 n=5", vol);  // 5.28
    check(grid_volume(3, 4).V, "M=4 n=3", vol);    // 4.39
    check(grid_volume(3, 3).V, "M=3 n=3", vol);    // 4.43
    auto scan = limit_scan(17, 10);
    v.require(scan.n_tx == 7 && scan.n_rx == 5, fmt::format("peaks n_TX {} n_RX {}", scan.n_tx, scan.n_rx));
    // brute force oracle
    for (int M = 3; M <= 9; ++M)
        for (int n = 1; n <= 3; ++n) {
            auto e = grid_volume(n, M);
            std::uint64_t on = 0, inside = 0;
            int total = 1;
            for (int d = 0; d < n; ++d) total *= M;
            for (int idx = 0; idx < total; ++idx) {
                long s = 0;
                for (int d = 0, t = idx; d < n; ++d, t /= M) {
                    long lv = M % 2 ? t % M - (M - 1) / 2 : 2 * (t % M) - (M - 1);
                    s += lv * lv;
                }
                on += s == e.R2;
                inside += s < e.R2;
            }
            v.require(on == e.N_s && inside == e.N_o, fmt::format("counts n={} M={}", n, M));
        }
    auto t1 = std::chrono::steady_clock::now();
    for (int M = 2; M <= 32; ++M) limit_scan(M, 10);
    const double s = seconds_since(t1);
    v.require(s < 10, "runtime");
    v.info(fmt::format("S(7)={:.2f}, V(5)={:.2f}; full scan M<=32 n<=10 {:.2f} s", grid_surface(7, 17), grid_volume(5, 17).V, s));
    return v;
}

verdict mdi() {
    verdict v;
    auto e = reference_exact_stats();
    auto r = reference_stats();
    v.require(r.power.mean >= 0.3120 && r.power.mean <= 0.3128, fmt::format("mean {:.4f}", r.power.mean));
    v.require(r.power.dev >= 0.1505 && r.power.dev <= 0.1515, fmt::format("dev {:.4f}", r.power.dev));
    v.require(e.change.mean == rational(7, 64), "change mean not 0.109375");
    v.require(e.change.max == rational(9, 16), "change max not 0.5625");
    v.require(r.power.min == 0 && r.power.max == 1, "power range");
    auto s = dynamic_stats(4, jump_rule{}, 0.630);
    v.require(std::abs(s.report.power.mean - 0.349) <= tol_ideal_mean, fmt::format("ideal mean {:.4f}", s.report.power.mean));
    v.require(s.report.power.dev == 0, "ideal dev");
    v.require(!s.report.wobble || (s.report.wobble->max == 0 && s.report.wobble->mean == 0), "process wobble");
    // wobble oracle: ideal radii on both planes
    std::vector<outline_room> rooms;
    for (int i = 0; i < 8; ++i) rooms.push_back({i % 2 == 0, i % 2 ? 8 * 0.630 : 8.0, i % 2 ? 8 * 0.630 : 8.0});
    auto w = wobble_stats(rooms, 8);
    v.require(w.wobble && w.wobble->max == 0 && w.wobble->mean == 0, "outline wobble");
    v.info(fmt::format("mean {:.4f} dev {:.4f} change {}/{}; ideal rho .630 mean {:.4f}", r.power.mean, r.power.dev,
                       fmt::format("{:.6f}", to_double(e.change.mean)), fmt::format("{:.4f}", to_double(e.change.max)),
                       s.report.power.mean));
    return v;
}

verdict properties() {
    verdict v;
    for (double p : {4.0, 4.5, 5.0, 5.5, 6.0}) {
        auto out = grid_arrange(rooms_on_grid(ideal_rooms(p, 0)));
        v.require(out.order_kept, fmt::format("p={} angular order", p));
        v.require(out.max_radial_error < max_radial_error, fmt::format("p={} radial error {:.3f}", p, out.max_radial_error));
    }
    for (const char* rule : {"G_J", "G_J+", "G_2J", "G_2J+"}) {
        auto d = dynamic_stats(5, parse_jump_rule(rule), 0.6986);
        v.require(d.report.change.min > 0, std::string(rule) + " change min");
    }
    auto paper = paper_of("stellar.effective");
    for (const auto& c : effective_cells()) {
        auto it = paper.find(c.cell);
        if (it != paper.end()) v.require(c.value == it->second.value, c.cell + ": " + c.value + " vs " + it->second.value);
    }
    std::string ladder;
    for (const auto& [name, e] : effective_ladder(10)) ladder += (ladder.empty() ? "" : "->") + std::to_string(e.per_rp);
    v.require(ladder == "100->90->81->72->64", "5 pts ladder " + ladder);
    v.info("5 pts ladder " + ladder);
    return v;
}

}  // namespace

int main() {
    const std::pair<const char*, verdict (*)()> criteria[] = {
        {"multiplexing table", &multiplexing}, {"redundancy analysis", &redundancy}, {"codec round trip", &codec_round_trip},
        {"NAP reproduction", &nap},            {"symmetry oracle", &symmetries},     {"balancing", &balancing},
        {"sub-scrambler errors", &subscrambler}, {"gain metrics", &gains},          {"CiC matrix", &cic},
        {"sphere limits", &sphere},            {"MDI statistics", &mdi},             {"property suite", &properties},
    };
    int failed = 0, i = 0;
    for (auto [name, fn] : criteria) {
        ++i;
        verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.pass = false;
            v.notes.push_back(std::string("exception: ") + e.what());
        }
        std::string detail;
        for (const auto& n : v.notes) detail += (detail.empty() ? "" : "; ") + n;
        std::cout << fmt::format("{} {:2d} {}: {}\n", v.pass ? "PASS" : "FAIL", i, name, detail);
        failed += !v.pass;
    }
    return failed ? 1 : 0;
}
