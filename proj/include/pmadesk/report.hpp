#pragma once

#include <boost/tokenizer.hpp>
#include <fmt/format.h>

#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pmadesk/balance.hpp"
#include "pmadesk/mdi_stats.hpp"
#include "pmadesk/mux_plan.hpp"
#include "pmadesk/pam_core.hpp"
#include "pmadesk/paper_values_data.hpp"
#include "pmadesk/sphere.hpp"
#include "pmadesk/stellar.hpp"

namespace pmadesk {

// ---- plain tables and their writers

struct text_table {
    std::string name;
    std::string anchor;  // where the printed original lives, if any
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

enum class out_format { csv, json, md };

inline out_format parse_format(const std::string& s) {
    if (s == "csv") return out_format::csv;
    if (s == "json") return out_format::json;
    if (s == "md") return out_format::md;
    throw std::invalid_argument("unknown format: " + s);
}

inline const char* format_ext(out_format f) { return f == out_format::csv ? "csv" : f == out_format::json ? "json" : "md"; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline void write_table(std::ostream& os, const text_table& t, out_format f) {
    switch (f) {
        case out_format::csv: {
            os << "# " << t.name;
            if (!t.anchor.empty()) os << " (" << t.anchor << ")";
            os << '\n';
            for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
            os << '\n';
            for (const auto& r : t.rows) {
                for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
                os << '\n';
            }
            break;
        }
        case out_format::json: {
            nlohmann::ordered_json j;
            j["table"] = t.name;
            if (!t.anchor.empty()) j["anchor"] = t.anchor;
            j["rows"] = nlohmann::ordered_json::array();
            for (const auto& r : t.rows) {
                nlohmann::ordered_json o;
                for (std::size_t i = 0; i < t.columns.size() && i < r.size(); ++i) o[t.columns[i]] = r[i];
                j["rows"].push_back(o);
            }
            os << j.dump(2) << '\n';
            break;
        }
        case out_format::md: {
            os << "### " << t.name;
            if (!t.anchor.empty()) os << " (" << t.anchor << ")";
            os << "\n\n|";
            for (const auto& c : t.columns) os << ' ' << c << " |";
            os << "\n|";
            for (std::size_t i = 0; i < t.columns.size(); ++i) os << "---|";
            os << '\n';
            for (const auto& r : t.rows) {
                os << '|';
                for (const auto& c : r) os << ' ' << c << " |";
                os << '\n';
            }
            os << '\n';
            break;
        }
    }
}

// ---- embedded printed values

struct paper_cell {
    std::string table, anchor, cell, value;
    bool legible = true;
    std::string note;
    bool known_discrepancy() const { return note.starts_with("known-discrepancy"); }
};

inline std::vector<paper_cell> parse_paper_values(const std::string& text) {
    std::vector<paper_cell> out;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        boost::tokenizer<boost::escaped_list_separator<char>> tok(line);
        std::vector<std::string> f(tok.begin(), tok.end());
        if (f.size() < 5) throw std::runtime_error("bad printed value record: " + line);
        out.push_back({f[0], f[1], f[2], f[3], f[4] == "1", f.size() > 5 ? f[5] : ""});
    }
    return out;
}

inline const std::vector<paper_cell>& paper_values() {
    static const auto v = parse_paper_values(paper_values_csv);
    return v;
}

// ---- comparison rows

enum class row_status { match, mismatch, paper_illegible, derived_only };

inline const char* status_name(row_status s) {
    switch (s) {
        case row_status::match: return "match";
        case row_status::mismatch: return "mismatch";
        case row_status::paper_illegible: return "paper-illegible";
        case row_status::derived_only: return "derived-only";
    }
    return "?";
}

struct report_row {
    std::string table, anchor, cell, computed;
    std::optional<std::string> paper;
    std::optional<double> tolerance;  // empty: exact text comparison
    row_status status = row_status::derived_only;
    bool known_discrepancy = false;
    std::string note;
};

struct computed_cell {
    std::string cell, value;
    std::optional<double> tolerance;
    std::string note;
};

inline std::optional<double> as_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    try {
        double v = std::stod(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

// One unit in the last printed digit: the printed tables mix rounding and truncation.
// Integers compare exactly.
inline double printed_precision(const std::string& paper) {
    auto dot = paper.find('.');
    if (dot == std::string::npos) return 0.5;
    return std::pow(10.0, -double(paper.size() - dot - 1));
}

// A printed "<b" is an upper bound. Other numeric cells compare within the explicit
// tolerance or the printed precision; text compares exactly.
inline row_status compare_cell(const std::string& computed, const std::string& paper, std::optional<double> tol) {
    if (paper.starts_with("<")) {
        auto b = as_number(paper.substr(1)), c = as_number(computed);
        return b && c && *c < *b ? row_status::match : row_status::mismatch;
    }
    auto p = as_number(paper), c = as_number(computed);
    if (p && c) return std::abs(*c - *p) <= tol.value_or(printed_precision(paper)) + 1e-9 ? row_status::match : row_status::mismatch;
    return computed == paper ? row_status::match : row_status::mismatch;
}

inline std::vector<report_row> compare_table(const std::string& table, const std::vector<computed_cell>& cells,
                                             std::optional<double> tol_override = std::nullopt) {
    std::map<std::string, const paper_cell*> idx;
    std::string anchor;
    for (const auto& p : paper_values())
        if (p.table == table) idx[p.cell] = &p, anchor = p.anchor;
    std::vector<report_row> out;
    for (const auto& c : cells) {
        report_row r{table, anchor, c.cell, c.value, std::nullopt, c.tolerance, row_status::derived_only, false, c.note};
        if (tol_override) r.tolerance = tol_override;
        auto it = idx.find(c.cell);
        if (it != idx.end()) {
            const auto& p = *it->second;
            r.anchor = p.anchor;
            r.paper = p.value;
            r.known_discrepancy = p.known_discrepancy();
            if (!p.note.empty()) r.note = r.note.empty() ? p.note : r.note + "; " + p.note;
            r.status = p.legible ? compare_cell(c.value, p.value, r.tolerance) : row_status::paper_illegible;
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline text_table rows_to_table(const std::string& name, const std::vector<report_row>& rows) {
    text_table t{name, rows.empty() ? "" : rows.front().anchor, {"table", "anchor", "cell", "computed", "paper", "tolerance", "status", "note"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({r.table, r.anchor, r.cell, r.computed, r.paper.value_or(""),
                          r.tolerance ? fmt::format("{:g}", *r.tolerance) : r.paper && as_number(*r.paper) ? fmt::format("{:g}", printed_precision(*r.paper)) : "exact", status_name(r.status), r.note});
    return t;
}

// ---- computed tables

inline std::string fixed(double v, int digits) { return fmt::format("{:.{}f}", v, digits); }

// Printed three-decimal values drop the leading zero.
inline std::string fixed3_bare(double v) {
    auto s = fixed(v, 3);
    if (s.starts_with("0.")) s.erase(0, 1);
    if (s == ".000") s = "0";
    return s;
}

inline std::vector<computed_cell> mux_variant_cells() {
    std::vector<computed_cell> out;
    for (std::uint64_t nr : {1, 2, 4, 6, 8, 10, 12, 14}) {
        auto v = variant(64, nr);
        const std::string k = "N_E=" + std::to_string(v.N_E);
        out.push_back({k + " gcd", std::to_string(v.gcd), std::nullopt, ""});
        out.push_back({k + " E_max", std::to_string(v.E_max), std::nullopt, ""});
        for (const auto& e : v.echo_table)
            out.push_back({k + " n_e E=" + std::to_string(e.E), e.n_e ? std::to_string(*e.n_e) : "—", std::nullopt, ""});
    }
    return out;
}

inline std::vector<computed_cell> redundancy_cells() {
    std::vector<computed_cell> out;
    for (unsigned n : {4, 5, 6, 10, 11, 12, 16, 17, 18}) out.push_back({"9^" + std::to_string(n), group_digits(ipow(9, n)), std::nullopt, ""});
    const std::pair<unsigned, unsigned> checks[] = {{8, 4},  {2, 5},  {4, 5},  {4, 4},  {2, 4},  {8, 5},  {2, 6},  {4, 6},
                                                    {8, 6},  {8, 10}, {2, 11}, {4, 11}, {4, 10}, {8, 11}, {2, 12}, {4, 12},
                                                    {8, 12}, {8, 16}, {2, 17}, {4, 17}, {8, 17}, {2, 18}, {4, 18}, {8, 18}};
    for (auto [F, m] : checks) {
        auto c = capacity_check(F, m, 8, 9);
        out.push_back({fmt::format("{}x8^{}", F, m), fmt::format("{} {} 9^{}", group_digits(c.lhs), c.fits ? "<" : ">", m), std::nullopt, ""});
    }
    auto plans = round_plans(8, 72, 64);
    const char* names[] = {"path 1-1-1", "path 1-2", "path 2-1", "path 3"};
    for (std::size_t i = 0; i < plans.size() && i < 4; ++i)
        out.push_back({names[i], fmt::format("k={} max={} total={}", plans[i].k(), plans[i].max_round(), plans[i].total()), std::nullopt, ""});
    return out;
}

inline std::vector<computed_cell> nap_cells() {
    std::vector<computed_cell> out;
    for (const char* d : builtin_profiles) {
        auto s = nap_statistics(profile_by_name(d));
        const std::string k = d;
        out.push_back({k + " NAP P0", fixed(to_double(s.per_page[0]), 4), 0.005, ""});
        out.push_back({k + " NAP P2,4,6", fixed(to_double(s.per_page[2]), 4), 0.005, ""});
        out.push_back({k + " NAP P1,3,5,7", fixed(to_double(s.per_page[1]), 4), 0.005, ""});
        out.push_back({k + " mean", fixed(to_double(s.mean), 4), 0.005, ""});
        out.push_back({k + " sigma", fixed(s.sigma, 4), 0.005, ""});
        out.push_back({k + " sigma/mean %", fixed(100 * s.ratio, 2), 0.1, ""});
    }
    return out;
}

inline std::vector<computed_cell> effect_cells() {
    auto cat = build_catalog();
    const std::pair<sym_group, const char*> names[] = {{sym_group::s2, "2S"},       {sym_group::s3, "3S"},     {sym_group::s8, "8S"},
                                                       {sym_group::s16, "16S"},     {sym_group::s24_even, "24S even"},
                                                       {sym_group::s24_10, "24S 10"}, {sym_group::s24_odd, "24S odd"}};
    std::vector<computed_cell> out;
    for (auto [g, n] : names) {
        auto e = group_effect(cat, g);
        const std::string k = n;
        out.push_back({k + " dH_Y", std::to_string(e.dY), std::nullopt, ""});
        out.push_back({k + " dH_X", std::to_string(e.dX), std::nullopt, ""});
        for (int p = 0; p < 8; ++p) out.push_back({k + " dH_" + std::to_string(p), std::to_string(e.dPage[p]), std::nullopt, ""});
        out.push_back({k + " dH_Z", std::to_string(e.dZ), std::nullopt, ""});
    }
    return out;
}

inline std::vector<computed_cell> balance_cells(std::int64_t N_E = 72) {
    std::vector<computed_cell> out;
    for (std::int64_t hz : {576, 1152, 2304, 4608, 1024, 2048, 4096, 8192, 640, 1280, 2560, 5120}) {
        const std::string k = "H_z=" + std::to_string(hz);
        try {
            auto s = solve(hz, N_E);
            out.push_back({k + " H_page", std::to_string(s.H_page), std::nullopt, ""});
            out.push_back({k + " unbalance", std::to_string(s.unbalance()), std::nullopt,
                           fmt::format("H_y:H_x = {}:{}", s.H_y, s.H_x)});
        } catch (const std::exception& e) {
            out.push_back({k + " H_page", "infeasible", std::nullopt, e.what()});
        }
    }
    return out;
}

inline std::vector<computed_cell> subscrambler_cells() {
    std::vector<computed_cell> out;
    for (auto [B, k0] : {std::pair{5u, 3u}, std::pair{9u, 4u}})
        for (unsigned k = k0; k < k0 + 4; ++k)
            out.push_back({fmt::format("base-{} 2^{} error %", B, k), fixed(100 * subscrambler_error(k, B), 3), std::nullopt, ""});
    return out;
}

inline std::vector<computed_cell> gain_cells(const std::string& family) {
    std::vector<computed_cell> out;
    if (family == "schemes") {
        for (const auto& s : pam5_schemes()) {
            out.push_back({s.scheme + " G_delta", fixed(s.G_delta, 4), 0.05, ""});
            if (s.G_rho) out.push_back({s.scheme + " G_rho", fixed(*s.G_rho, 4), 0.05, ""});
            if (s.G_p) out.push_back({s.scheme + " G_p", fixed(*s.G_p, 4), 0.05, ""});
            out.push_back({s.scheme + " total", fixed(s.total, 4), 0.05, ""});
        }
        auto l = jump_gain_limits();
        out.push_back({"jump limit single plane", fixed(l.single_plane, 6), 1e-4, ""});
        out.push_back({"jump limit both planes", fixed(l.double_plane, 6), 1e-4, ""});
        return out;
    }
    for (const auto& e : analyze_2d_pam5())
        if (e.table == family) out.push_back({e.selection, fixed(e.G, 4), 0.05, ""});
    return out;
}

inline std::vector<computed_cell> ideal_stellar_cells(bool coupled) {
    std::vector<computed_cell> out;
    for (int p = 2; p <= 8; ++p) {
        auto s = ideal_stellar_table(p);
        const std::string k = "p=" + std::to_string(p) + " ";
        auto add = [&](const char* c, double v) { out.push_back({k + c, fixed(v, 4), std::nullopt, ""}); };
        if (!coupled) {
            add("r", s.r);
            add("page delta", s.page_delta);
            add("G_delta", s.G_delta);
            add("G_phi", s.G_phi);
            add("G_rho", s.G_rho);
            add("dict delta", s.dict_delta);
            add("G_dict", s.G_dict);
        } else {
            add("dphi/pi", s.c_dphi / pi);
            add("G_phi", s.c_G_phi);
            add("drho", s.c_drho);
            add("G_rho", s.c_G_rho);
            add("sum", s.c_sum);
        }
    }
    return out;
}

inline std::vector<computed_cell> effective_cells() {
    std::vector<computed_cell> out;
    for (double p : {4.0, 4.5, 5.0, 5.5, 6.0}) {
        const int N = int(std::lround(2 * p));
        for (const auto& [name, e] : effective_ladder(N))
            out.push_back({fmt::format("p={:g} {}", p, name), std::to_string(e.per_rp), std::nullopt, ""});
    }
    return out;
}

inline std::vector<computed_cell> cic_cells(int N = 16) {
    std::vector<computed_cell> out;
    for (const auto& c : cic_gain_matrix(N)) {
        const std::string k = fmt::format("AB={} CD={} ", c.cAB, c.cCD);
        out.push_back({k + "gain", c.G > 0 ? fixed(c.G, 3) : "—", 0.05, fmt::format("{} moves", c.count)});
        out.push_back({k + "invariance", invariance_name(c.inv), std::nullopt, ""});
    }
    return out;
}

inline std::vector<computed_cell> sphere_surface_cells() {
    std::vector<computed_cell> out;
    for (int M : {3, 4, 5, 6, 7, 8, 16, 17, 18, 32}) {
        auto scan = limit_scan(M, 10);
        for (const auto& r : scan.rows) {
            if (M == 17 && r.S) out.push_back({fmt::format("M=17 n={}", r.n), fixed(*r.S, 3), 0.05, ""});
            if (r.S_pct) out.push_back({fmt::format("M={} n={} %", M, r.n), fixed(*r.S_pct, 1), std::nullopt, ""});
        }
        if (M == 17) out.push_back({"M=17 n_TX", std::to_string(scan.n_tx), std::nullopt, ""});
    }
    return out;
}

inline std::vector<computed_cell> sphere_volume_cells() {
    std::vector<computed_cell> out;
    out.push_back({"M=2 n=1", fixed(grid_volume(1, 2).V, 3), 0.05, ""});
    for (int M : {3, 4, 5, 6, 7, 8, 16, 17, 18, 32})
        for (int n = 1; n <= 9; ++n) {
            auto e = grid_volume(n, M);
            out.push_back({fmt::format("M={} n={}", M, n), fixed(e.V, 3), 0.05, fmt::format("N_o={} N_s={}", e.N_o, e.N_s)});
        }
    out.push_back({"M=17 n_RX", std::to_string(limit_scan(17, 9).n_rx), std::nullopt, ""});
    return out;
}

// Ideal rows take the orbit ratio from the equal-distance placement, except where the
// printed mean power implies a different ratio (rho = sqrt(4 mu0 - 1)).
inline double printed_mean_rho(double mu0) { return std::sqrt(4 * mu0 - 1); }

inline std::vector<computed_cell> mdi_cells() {
    std::vector<computed_cell> out;
    auto add_change = [&](const std::string& k, const moments& m, bool with_min) {
        out.push_back({k + " change mean", fixed(m.mean, 4), std::nullopt, ""});
        out.push_back({k + " change dev", fixed(m.dev, 4), std::nullopt, ""});
        if (with_min) out.push_back({k + " change min", fixed(m.min, 4), std::nullopt, ""});
        out.push_back({k + " change max", fixed(m.max, 4), std::nullopt, ""});
    };
    auto ref = reference_stats();
    out.push_back({"reference mean", fixed(ref.power.mean, 4), std::nullopt, ""});
    out.push_back({"reference dev", fixed(ref.power.dev, 4), std::nullopt, ""});
    out.push_back({"reference min", fixed(ref.power.min, 4), std::nullopt, ""});
    out.push_back({"reference max", fixed(ref.power.max, 4), std::nullopt, ""});
    add_change("reference", ref.change, true);

    struct variant_row {
        const char* key;
        double p;
        const char* rule;
        std::optional<double> printed_mu0;
    };
    const variant_row rows[] = {
        {"4 pts ideal", 4, "static", std::nullopt},
        {"4.5 pts ideal", 4.5, "static", 0.357},
        {"4.5 pts G_J ideal", 4.5, "G_J", 0.357},
        {"4.5 pts G_J+ ideal", 4.5, "G_J+", 0.357},
        {"4.5 pts D ideal", 4.5, "D", 0.357},
        {"5 pts ideal", 5, "static", 0.372},
        {"5 pts G_J ideal", 5, "G_J", 0.372},
        {"5 pts G_J+ ideal", 5, "G_J+", 0.372},
        {"5 pts G_2J ideal", 5, "G_2J", 0.372},
        {"5 pts D ideal", 5, "D", 0.372},
        {"5 pts G_J+D ideal", 5, "G_J++D", 0.372},
    };
    for (const auto& r : rows) {
        std::optional<double> rho;
        if (r.printed_mu0) rho = printed_mean_rho(*r.printed_mu0);
        auto d = dynamic_stats(r.p, parse_jump_rule(r.rule), rho);
        const std::string k = r.key;
        if (std::string(r.rule) == "static") {
            std::string note = rho ? fmt::format("orbit ratio {:.4f} from the printed mean", *rho) : "";
            out.push_back({k + " mean", fixed(d.report.power.mean, 4), std::nullopt, note});
            out.push_back({k + " dev", fixed(d.report.power.dev, 4), std::nullopt, ""});
        }
        add_change(k, d.report.change, true);
    }
    return out;
}

struct report_table_def {
    std::string key;
    std::string title;
    std::vector<computed_cell> (*cells)();
};

inline const std::vector<report_table_def>& report_tables() {
    static const std::vector<report_table_def> defs{
        {"mux.variants", "multiplexing variants", &mux_variant_cells},
        {"mux.redundancy", "arithmetic redundancy", &redundancy_cells},
        {"nap.designs", "design NAP comparison", &nap_cells},
        {"balance.effects", "repeat effects", &effect_cells},
        {"balance.variants", "balance variants", [] { return balance_cells(72); }},
        {"balance.subscrambler", "sub-scrambler base conversion error", &subscrambler_cells},
        {"gains.geometric", "2D-PAM5 geometric gains", [] { return gain_cells("geometric"); }},
        {"gains.angular", "2D-PAM5 angle-bound gains", [] { return gain_cells("angular"); }},
        {"gains.radial", "2D-PAM5 radius-bound gains", [] { return gain_cells("radial"); }},
        {"gains.schemes", "2D-PAM5 coding variants and jump limits", [] { return gain_cells("schemes"); }},
        {"stellar.ideal", "ideal stellar partitioning", [] { return ideal_stellar_cells(false); }},
        {"stellar.coupled", "coupled stellar pages", [] { return ideal_stellar_cells(true); }},
        {"stellar.effective", "effective page sizes", &effective_cells},
        {"cic.matrix", "coupled jump gains", [] { return cic_cells(16); }},
        {"sphere.surface", "surface transmit limit", &sphere_surface_cells},
        {"sphere.volume", "volume receive limit", &sphere_volume_cells},
        {"mdi.stats", "MDI output statistics", &mdi_cells},
    };
    return defs;
}

// Accepts a table key or its anchor as listed in the data file.
inline const report_table_def* find_report_table(const std::string& id) {
    for (const auto& d : report_tables())
        if (d.key == id) return &d;
    for (const auto& p : paper_values())
        if (p.anchor == id)
            for (const auto& d : report_tables())
                if (d.key == p.table) return &d;
    return nullptr;
}

struct report_summary {
    int match = 0, mismatch = 0, illegible = 0, derived = 0, known = 0;
    void add(const report_row& r) {
        switch (r.status) {
            case row_status::match: ++match; break;
            case row_status::mismatch: r.known_discrepancy ? ++known : ++mismatch; break;
            case row_status::paper_illegible: ++illegible; break;
            case row_status::derived_only: ++derived; break;
        }
    }
};

}  // namespace pmadesk
