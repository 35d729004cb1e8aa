#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "jumpkit/reportkit.hpp"

using namespace jumpkit;

TEST(Format, Values) {
    EXPECT_EQ(format_value(std::nullopt, ColumnKind::real), "-");
    EXPECT_EQ(format_value(std::numeric_limits<double>::quiet_NaN(), ColumnKind::real), "-");
    EXPECT_EQ(format_value(0.0123, ColumnKind::percent), "1.23%");
    EXPECT_EQ(format_value(42.0, ColumnKind::integer), "42");
    EXPECT_EQ(format_value(-0.001, ColumnKind::real), "0.00");
    EXPECT_EQ(format_value(1.9601, ColumnKind::tstat), "1.96");
}

TEST(Format, PValues) {
    EXPECT_EQ(format_value(0.0049, ColumnKind::pvalue), "<0.01");
    EXPECT_EQ(format_value(0.0, ColumnKind::pvalue), "<0.01");
    EXPECT_EQ(format_value(0.01, ColumnKind::pvalue), "0.01");
    EXPECT_EQ(format_value(0.456, ColumnKind::pvalue), "0.46");
    EXPECT_EQ(format_value(1.0, ColumnKind::pvalue), "1.00");
}

TEST(Tables, JumpSummaryShape) {
    const std::vector<double> sizes{0.02, -0.01, 0.035, 0.015};
    const auto t = jump_summary_table(jump_summary(sizes));
    ASSERT_EQ(t.columns.size(), 4u);
    EXPECT_EQ(t.columns[1], "All");
    EXPECT_EQ(t.rows[0][0].text, "N");
    EXPECT_EQ(t.rows[0][1].text, "4");
    EXPECT_EQ(t.rows[0][2].text, "3");
    EXPECT_EQ(t.rows[0][3].text, "1");
    // one negative jump: no dispersion or shape
    for (const auto& r : t.rows) {
        if (r[0].text == "Std. dev." || r[0].text == "Skewness" || r[0].text == "Kurtosis") {
            EXPECT_EQ(r[3].text, "-");
        }
    }
}

TEST(Tables, EmptyGroupRendersDashes) {
    const std::vector<double> sizes{0.02, 0.03};
    const auto t = jump_summary_table(jump_summary(sizes));
    EXPECT_EQ(t.rows[0][3].text, "0");
    for (std::size_t r = 1; r < t.rows.size(); ++r) EXPECT_EQ(t.rows[r][3].text, "-");
    const auto text = render_table(t, TableFormat::text);
    EXPECT_NE(text.find("Negative"), std::string::npos);
}

TEST(Tables, JsonRoundTripExact) {
    const std::vector<double> sizes{0.0211, -0.0133, 0.035, 0.0151, -0.07};
    const auto t = jump_summary_table(jump_summary(sizes));
    const auto back = table_from_json(nlohmann::json::parse(render_table(t, TableFormat::json)));
    EXPECT_EQ(back.title, t.title);
    EXPECT_EQ(back.columns, t.columns);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            EXPECT_EQ(back.rows[r][c].text, t.rows[r][c].text);
            EXPECT_EQ(back.rows[r][c].value, t.rows[r][c].value);
            EXPECT_EQ(back.rows[r][c].source, t.rows[r][c].source);
        }
    }
    EXPECT_EQ(render_table(back, TableFormat::text), render_table(t, TableFormat::text));
}

TEST(Tables, CsvEscapesCommas) {
    TableSpec t;
    t.title = "x";
    t.columns = {"a", "b"};
    t.rows = {{text_cell("1,2"), text_cell("say \"hi\"")}};
    EXPECT_EQ(render_table(t, TableFormat::csv), "a,b\n\"1,2\",\"say \"\"hi\"\"\"\n");
}

TEST(Tables, RaggedRowsRejected) {
    TableSpec t;
    t.columns = {"a", "b"};
    t.rows = {{text_cell("1")}};
    EXPECT_THROW(render_table(t, TableFormat::text), std::invalid_argument);
}

TEST(Tables, RunsRowMissingResult) {
    RunsTestResult r;
    r.n_jump_days = 5;
    r.n_quiet_days = 20;
    r.runs_observed = 9;
    r.expected_runs = 9.0;
    r.p_value = 0.8;
    const std::vector<RunsRow> rows{{"Full", r}, {"Sub-period 1", std::nullopt}};
    const auto t = runs_table(rows);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0].back().text, "0.80");
    for (std::size_t c = 1; c < t.columns.size(); ++c) EXPECT_EQ(t.rows[1][c].text, "-");
}

TEST(Tables, ProbitWithoutFits) {
    const auto t = probit_table("5-minute bars", std::nullopt, std::nullopt);
    EXPECT_EQ(t.columns.size(), 7u);
    for (const auto& r : t.rows) {
        for (std::size_t c = 1; c < r.size(); ++c) EXPECT_TRUE(r[c].text == "-" || r[c].text.empty());
        EXPECT_EQ(r[1].text, "-");
    }
}

TEST(Tables, ImpactOnePerSpan) {
    ImpactReport r;
    r.n_spans = 2;
    for (int s = 0; s < 2; ++s) {
        for (ImpactStat st : all_impact_stats) {
            for (SignGroup g : all_sign_groups) {
                ImpactCell c;
                c.stat = st;
                c.span = s;
                c.group = g;
                c.test = {10, 0.1, 2.5, 0.03};
                r.cells.push_back(c);
            }
        }
    }
    const auto tables = impact_tables(r);
    ASSERT_EQ(tables.size(), 2u);
    EXPECT_EQ(tables[0].title, "Panel A: 0-15 min after the jump");
    EXPECT_EQ(tables[1].title, "Panel B: 15-30 min after the jump");
    EXPECT_EQ(tables[0].rows.size(), kImpactStats);
}
