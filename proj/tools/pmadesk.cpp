#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "pmadesk/echo_codec.hpp"
#include "pmadesk/report.hpp"

using namespace pmadesk;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct common_opts {
    std::string format = "csv";
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string anchor_of(const std::string& key) {
    for (const auto& p : paper_values())
        if (p.table == key) return p.anchor;
    return "";
}

// Tables go to stdout, or to DIR/<name>.<ext> with --out.
class emitter {
public:
    explicit emitter(const common_opts& o) : fmt_(parse_format(o.format)), dir_(o.out_dir) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }

    void table(const text_table& t) {
        if (dir_.empty()) return write_table(std::cout, t, fmt_);
        std::ofstream f(fs::path(dir_) / (t.name + "." + format_ext(fmt_)));
        write_table(f, t, fmt_);
    }

    void document(const std::string& name, const json& j) {
        if (dir_.empty()) {
            std::cout << j.dump(2) << '\n';
            return;
        }
        std::ofstream f(fs::path(dir_) / (name + ".json"));
        f << j.dump(2) << '\n';
    }

private:
    out_format fmt_;
    std::string dir_;
};

std::vector<report_row> rows_for(const std::string& key, std::optional<double> tol = std::nullopt) {
    const auto* d = find_report_table(key);
    return compare_table(d->key, d->cells(), tol);
}

void emit_report_table(emitter& out, const std::string& key) { out.table(rows_to_table(key, rows_for(key))); }

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw usage_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), {}};
}

codec_config make_codec_config(bool no_scramble, const common_opts& o, int head, int tail) {
    codec_config cfg;
    cfg.scramble = !no_scramble;
    if (o.seed) cfg.seed = *o.seed;
    cfg.head_stretch = head;
    cfg.tail_stretch = tail;
    return cfg;
}

// Input timeline: a 16-slot idle lead-in, then the octets as payloads of --frame octets
// separated by --gap idle slots. Event slots index this timeline.
int codec_encode(const std::string& in, const std::string& events, const std::string& out, int frame, int gap,
                 const codec_config& cfg) {
    auto octets = read_file(in);
    std::vector<std::optional<std::uint8_t>> timeline(16, std::nullopt);
    for (std::size_t i = 0; i < octets.size(); ++i) {
        if (frame > 0 && i > 0 && i % frame == 0) timeline.insert(timeline.end(), gap, std::nullopt);
        timeline.push_back(octets[i]);
    }
    std::vector<bool> ev(timeline.size(), false);
    if (!events.empty()) {
        std::ifstream f(events);
        if (!f) throw usage_error("cannot open " + events);
        for (const auto& e : json::parse(f)) {
            auto s = e.is_object() ? e.at("slot").get<std::uint64_t>() : e.get<std::uint64_t>();
            if (s >= ev.size()) ev.resize(s + 1, false), timeline.resize(s + 1, std::nullopt);
            ev[s] = true;
        }
    }
    encoder enc(cfg);
    std::vector<tx_word> words;
    for (std::size_t i = 0; i < timeline.size(); ++i) words.push_back(enc.push(timeline[i], ev[i]));
    for (auto& w : enc.finish()) words.push_back(w);

    std::ofstream f(out);
    if (!f) throw usage_error("cannot write " + out);
    write_words(f, words);
    json side;
    side["words"] = words.size();
    side["accepted"] = json::array();
    for (auto s : enc.accepted_events()) side["accepted"].push_back({{"slot", s}});
    side["dropped"] = enc.dropped_events();
    std::ofstream(out + ".events.json") << side.dump(2) << '\n';
    std::cerr << fmt::format("{} octets -> {} words, {} events accepted, {} dropped\n", octets.size(), words.size(),
                             enc.accepted_events().size(), enc.dropped_events());
    return 0;
}

int codec_decode(const std::string& in, const std::string& events, const std::string& out, const codec_config& cfg) {
    std::ifstream f(in);
    if (!f) throw usage_error("cannot open " + in);
    auto words = read_words(f);
    decoder dec(cfg);
    decode_output all;
    auto take = [&](decode_output o) {
        all.octets.insert(all.octets.end(), o.octets.begin(), o.octets.end());
        all.events.insert(all.events.end(), o.events.begin(), o.events.end());
    };
    for (const auto& w : words) take(dec.push(w));
    take(dec.finish());
    std::ofstream o(out, std::ios::binary);
    if (!o) throw usage_error("cannot write " + out);
    o.write(reinterpret_cast<const char*>(all.octets.data()), std::streamsize(all.octets.size()));
    json ev = json::array();
    for (const auto& e : all.events) {
        json r{{"word_index", e.word_index}};
        if (e.train_type) r["train_type"] = *e.train_type;
        ev.push_back(r);
    }
    std::ofstream(events.empty() ? out + ".events.json" : events) << ev.dump(2) << '\n';
    std::cerr << fmt::format("{} words -> {} octets, {} events\n", words.size(), all.octets.size(), all.events.size());
    return 0;
}

text_table stats_table(const std::string& anchor) {
    return {"mdi.stats", anchor,
            {"process", "mean", "dev", "min", "max", "wobble max", "change mean", "change dev", "change min", "change max"}, {}};
}

void add_stats_row(text_table& t, const std::string& name, const stats_report& r) {
    auto f = [](double v) { return fmt::format("{:.4f}", v); };
    t.rows.push_back({name, f(r.power.mean), f(r.power.dev), f(r.power.min), f(r.power.max), r.wobble ? f(r.wobble->max) : "",
                      f(r.change.mean), f(r.change.dev), f(r.change.min), f(r.change.max)});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pmadesk: desk computations for multilevel PAM coding layers"};
    app.set_config("--config", "", "flat key=value config file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    common_opts o;
    app.add_option("--format", o.format, "csv, json or md")->check(CLI::IsMember({"csv", "json", "md"}));
    app.add_option("--out", o.out_dir, "write tables into DIR instead of stdout");
    app.add_option("--seed", o.seed, "seed for randomized computations and the codec scrambler");

    int exit_code = 0;
    std::function<int()> action;
    auto bind = [&](CLI::App* sub, std::function<int()> f) { sub->callback([&, f] { action = f; }); };

    auto* variants_cmd = app.add_subcommand("variants", "multiplexing variants with agreement column");
    bind(variants_cmd, [&] {
        emitter e(o);
        emit_report_table(e, "mux.variants");
        return 0;
    });
    auto* redundancy_cmd = app.add_subcommand("redundancy", "arithmetic redundancy inequalities");
    bind(redundancy_cmd, [&] {
        emitter e(o);
        emit_report_table(e, "mux.redundancy");
        return 0;
    });

    auto* codec_cmd = app.add_subcommand("codec", "echo codec encode/decode");
    codec_cmd->require_subcommand(1);
    std::string c_in, c_events, c_out;
    bool no_scramble = false;
    int head = 0, tail = 0, frame = 0, gap = 16;
    auto codec_flags = [&](CLI::App* s) {
        s->add_option("--in", c_in)->required();
        s->add_option("--events", c_events, "event JSON (encode: input slots; decode: output records)");
        s->add_option("--out", c_out)->required();
        s->add_flag("--no-scramble", no_scramble);
        s->add_option("--seed", o.seed);
        s->add_option("--stretch-head", head)->check(CLI::Range(0, 2));
        s->add_option("--stretch-tail", tail)->check(CLI::Range(0, 2));
    };
    auto* enc_cmd = codec_cmd->add_subcommand("encode", "octets file -> word stream");
    codec_flags(enc_cmd);
    enc_cmd->add_option("--frame", frame, "split the octets into payloads of this size");
    enc_cmd->add_option("--gap", gap, "idle slots between payloads")->check(CLI::PositiveNumber);
    bind(enc_cmd, [&] { return codec_encode(c_in, c_events, c_out, frame, gap, make_codec_config(no_scramble, o, head, tail)); });
    auto* dec_cmd = codec_cmd->add_subcommand("decode", "word stream -> octets file");
    codec_flags(dec_cmd);
    bind(dec_cmd, [&] { return codec_decode(c_in, c_events, c_out, make_codec_config(no_scramble, o, head, tail)); });

    auto* balance_cmd = app.add_subcommand("balance", "hit-rate balancing");
    balance_cmd->require_subcommand(1);
    std::int64_t hz = 576, ne = 72;
    auto* solve_cmd = balance_cmd->add_subcommand("solve", "solve one H_z as JSON");
    solve_cmd->add_option("--hz", hz)->check(CLI::PositiveNumber);
    solve_cmd->add_option("--ne", ne)->check(CLI::PositiveNumber);
    bind(solve_cmd, [&] {
        auto s = solve(hz, ne);
        auto v = verify(s);
        json j{{"table", "balance.variants"}, {"anchor", anchor_of("balance.variants")}, {"H_z", s.H_z}, {"N_E", s.N_E}};
        j["repeats"] = json::object();
        for (auto g : all_groups) j["repeats"][group_name(g)] = s.sums[g];
        j["H_y"] = s.H_y;
        j["H_x"] = s.H_x;
        j["H_page"] = s.H_page;
        j["unbalance"] = s.unbalance();
        j["effective"] = {{"P0", s.eff_p0}, {"P2,4,6", s.eff_even}, {"odd", s.eff_odd}};
        j["verification"] = {{"ok", v.ok}, {"violations", v.violations}, {"p_y", v.p_y}, {"p_x", v.p_x}};
        emitter(o).document("balance-solve", j);
        return v.ok ? 0 : 1;
    });
    auto* btable_cmd = balance_cmd->add_subcommand("table", "balance variants and sub-scrambler errors");
    bind(btable_cmd, [&] {
        emitter e(o);
        emit_report_table(e, "balance.variants");
        emit_report_table(e, "balance.subscrambler");
        return 0;
    });

    auto* sym_cmd = app.add_subcommand("symmetries", "symmetry catalog and repeat effects");
    bind(sym_cmd, [&] {
        auto cat = build_catalog();
        auto errs = check_catalog(cat);
        for (const auto& m : errs) std::cerr << m << '\n';
        emitter e(o);
        emit_report_table(e, "balance.effects");
        return errs.empty() ? 0 : 1;
    });

    auto* gains_cmd = app.add_subcommand("gains", "2D-PAM5 and stellar gain tables");
    bind(gains_cmd, [&] {
        emitter e(o);
        for (const char* k : {"gains.geometric", "gains.angular", "gains.radial", "gains.schemes", "stellar.ideal",
                              "stellar.coupled", "stellar.effective"})
            emit_report_table(e, k);
        return 0;
    });

    int levels = 17, max_dim = 10;
    auto* sphere_cmd = app.add_subcommand("sphere", "grid sphere surface/volume limits");
    sphere_cmd->add_option("--levels", levels)->check(CLI::Range(2, 64));
    sphere_cmd->add_option("--max-dim", max_dim)->check(CLI::Range(1, 16));
    bind(sphere_cmd, [&] {
        auto scan = limit_scan(levels, max_dim);
        text_table t{fmt::format("sphere.M{}", levels), anchor_of("sphere.surface") + " " + anchor_of("sphere.volume"),
                     {"n", "S", "V", "S %", "V %"}, {}};
        auto f = [](const std::optional<double>& v, int d) { return v ? fmt::format("{:.{}f}", *v, d) : std::string("—"); };
        for (const auto& r : scan.rows) t.rows.push_back({std::to_string(r.n), f(r.S, 2), f(r.V, 2), f(r.S_pct, 0), f(r.V_pct, 0)});
        t.rows.push_back({"n_TX", std::to_string(scan.n_tx), "", "", ""});
        t.rows.push_back({"n_RX", std::to_string(scan.n_rx), "", "", ""});
        emitter(o).table(t);
        return 0;
    });

    int views = 16;
    auto* cic_cmd = app.add_subcommand("cic", "coupled jump gain matrix");
    cic_cmd->add_option("--views", views)->check(CLI::Range(2, 256));
    bind(cic_cmd, [&] {
        text_table t{fmt::format("cic.N{}", views), anchor_of("cic.matrix"), {"AB", "CD", "gain dB", "invariance", "moves"}, {}};
        for (const auto& c : cic_gain_matrix(views))
            t.rows.push_back({std::to_string(c.cAB), std::to_string(c.cCD), c.G > 0 ? fmt::format("{:.2f}", c.G) : "—",
                              invariance_name(c.inv), std::to_string(c.count)});
        emitter(o).table(t);
        return 0;
    });

    auto* stats_cmd = app.add_subcommand("stats", "MDI output statistics");
    stats_cmd->require_subcommand(1);
    std::optional<std::uint64_t> mc_samples;
    auto* sref_cmd = stats_cmd->add_subcommand("reference", "independent PAM5 reference process");
    sref_cmd->add_option("--mc-samples", mc_samples, "Monte Carlo instead of exact enumeration (needs --seed)");
    sref_cmd->add_option("--seed", o.seed);
    bind(sref_cmd, [&] {
        auto t = stats_table(anchor_of("mdi.stats"));
        if (mc_samples) {
            if (!o.seed) throw usage_error("--mc-samples needs --seed");
            auto r = reference_stats_mc(*mc_samples, o.seed);
            add_stats_row(t, fmt::format("reference (MC {} samples, seed {})", *mc_samples, *o.seed), r);
        } else {
            add_stats_row(t, "reference", reference_stats());
        }
        emitter(o).table(t);
        return 0;
    });
    double pts = 5;
    std::string rule = "static";
    std::optional<double> ratio;
    auto* sst_cmd = stats_cmd->add_subcommand("stellar", "ideal stellar word process");
    sst_cmd->add_option("--pts", pts)->check(CLI::Range(2.0, 8.0));
    sst_cmd->add_option("--rule", rule, "static, gj, gj+, g2j, ..., with an optional d suffix");
    sst_cmd->add_option("--ratio", ratio, "orbit ratio r/R (default: equal-distance placement)");
    bind(sst_cmd, [&] {
        jump_rule jr;
        try {
            jr = parse_jump_rule(rule);
        } catch (const std::exception& ex) {
            throw usage_error(ex.what());
        }
        auto d = dynamic_stats(pts, jr, ratio);
        auto t = stats_table(anchor_of("mdi.stats"));
        add_stats_row(t, fmt::format("{:g} pts {} rho={}", pts, jr.name(), ratio ? fmt::format("{:.4f}", *ratio) : "ideal"), d.report);
        emitter(o).table(t);
        std::cerr << fmt::format("states {} successors {} achieved gain {:.3f} dB\n", d.states, d.successors, d.achieved_gain);
        return 0;
    });

    auto* report_cmd = app.add_subcommand("report", "compare computed tables with the embedded printed values");
    bool all = false, strict = false;
    std::vector<std::string> tables;
    std::optional<double> tolerance;
    report_cmd->add_flag("--all", all, "every reproducible table");
    report_cmd->add_option("--table", tables, "table key (e.g. mux.variants) or anchor");
    report_cmd->add_flag("--strict", strict, "exit 1 on any mismatch in a legible, unflagged cell");
    report_cmd->add_option("--tolerance", tolerance, "override the tolerance of numeric cells")->check(CLI::NonNegativeNumber);
    bind(report_cmd, [&] {
        std::vector<std::string> keys;
        if (all)
            for (const auto& d : report_tables()) keys.push_back(d.key);
        for (const auto& id : tables) {
            const auto* d = find_report_table(id);
            if (!d) throw usage_error("unknown table: " + id);
            keys.push_back(d->key);
        }
        if (keys.empty()) throw usage_error("report needs --all or --table");
        emitter e(o);
        report_summary total;
        text_table summary{"summary", "", {"table", "anchor", "match", "mismatch", "known discrepancy", "paper-illegible", "derived-only"}, {}};
        for (const auto& k : keys) {
            auto rows = rows_for(k, tolerance);
            report_summary s;
            for (const auto& r : rows) s.add(r), total.add(r);
            e.table(rows_to_table(k, rows));
            summary.rows.push_back({k, anchor_of(k), std::to_string(s.match), std::to_string(s.mismatch), std::to_string(s.known),
                                    std::to_string(s.illegible), std::to_string(s.derived)});
        }
        summary.rows.push_back({"total", "", std::to_string(total.match), std::to_string(total.mismatch), std::to_string(total.known),
                                std::to_string(total.illegible), std::to_string(total.derived)});
        e.table(summary);
        std::cerr << fmt::format("match {} mismatch {} known-discrepancy {} paper-illegible {} derived-only {}\n", total.match,
                                 total.mismatch, total.known, total.illegible, total.derived);
        return strict && total.mismatch > 0 ? 1 : 0;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        exit_code = action ? action() : 2;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_code;
}
