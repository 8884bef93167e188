#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "pmadesk/report.hpp"

using namespace pmadesk;

TEST(Report, ParsesQuotedValues) {
    auto v = parse_paper_values("table,anchor,cell,value,legible,note\nt,A,\"x,y\",\"1,024\",0,known-discrepancy: z\n");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].cell, "x,y");
    EXPECT_EQ(v[0].value, "1,024");
    EXPECT_FALSE(v[0].legible);
    EXPECT_TRUE(v[0].known_discrepancy());
}

TEST(Report, EmbeddedDataIsWellFormed) {
    const auto& v = paper_values();
    EXPECT_GT(v.size(), 600u);
    for (const auto& p : v) {
        EXPECT_NE(find_report_table(p.table), nullptr) << p.table;
        EXPECT_FALSE(p.anchor.empty());
    }
}

TEST(Report, CompareRules) {
    EXPECT_EQ(compare_cell("6.25", "<10", std::nullopt), row_status::match);
    EXPECT_EQ(compare_cell("10", "<10", std::nullopt), row_status::mismatch);
    EXPECT_EQ(compare_cell("3.9586", "3.958", std::nullopt), row_status::match);  // truncated print
    EXPECT_EQ(compare_cell("3.9600", "3.958", std::nullopt), row_status::mismatch);
    EXPECT_EQ(compare_cell("269", "267", std::nullopt), row_status::mismatch);
    EXPECT_EQ(compare_cell("0.4844", "0.48", 0.005), row_status::match);
    EXPECT_EQ(compare_cell("0.4900", "0.48", 0.005), row_status::mismatch);
    EXPECT_EQ(compare_cell("524,288 < 9^6", "524,288 < 9^6", std::nullopt), row_status::match);
    EXPECT_EQ(compare_cell("D-I", "I-D", std::nullopt), row_status::mismatch);
    EXPECT_DOUBLE_EQ(printed_precision(".313"), 0.001);
    EXPECT_DOUBLE_EQ(printed_precision("72"), 0.5);
}

TEST(Report, StatusesAndFlags) {
    auto rows = compare_table("mux.variants", {{"N_E=65 n_e E=64", "269", std::nullopt, ""}, {"not a cell", "1", std::nullopt, ""}});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].status, row_status::mismatch);
    EXPECT_TRUE(rows[0].known_discrepancy);
    EXPECT_EQ(rows[0].anchor, "P1.TII");
    EXPECT_EQ(rows[1].status, row_status::derived_only);
    report_summary s;
    for (auto& r : rows) s.add(r);
    EXPECT_EQ(s.mismatch, 0);
    EXPECT_EQ(s.known, 1);
    EXPECT_EQ(s.derived, 1);
}

TEST(Report, LookupByAnchor) {
    ASSERT_NE(find_report_table("P1.TII"), nullptr);
    EXPECT_EQ(find_report_table("P1.TII")->key, "mux.variants");
    EXPECT_EQ(find_report_table("nope"), nullptr);
}

TEST(Report, EveryPaperCellIsComputed) {
    for (const auto& d : report_tables()) {
        auto rows = compare_table(d.key, d.cells());
        std::set<std::string> have;
        for (auto& r : rows) have.insert(r.cell);
        for (const auto& p : paper_values()) {
            if (p.table != d.key) continue;
            EXPECT_TRUE(have.count(p.cell)) << d.key << ": " << p.cell;
        }
    }
}

TEST(Report, WritersCarryAnchor) {
    text_table t{"mux.variants", "P1.TII", {"a", "b"}, {{"1", "x,y"}}};
    std::ostringstream csv, js, md;
    write_table(csv, t, out_format::csv);
    write_table(js, t, out_format::json);
    write_table(md, t, out_format::md);
    EXPECT_EQ(csv.str(), "# mux.variants (P1.TII)\na,b\n1,\"x,y\"\n");
    EXPECT_NE(js.str().find("\"anchor\": \"P1.TII\""), std::string::npos);
    EXPECT_EQ(md.str().rfind("### mux.variants (P1.TII)", 0), 0u);
}
