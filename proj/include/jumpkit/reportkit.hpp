#pragma once

// Table formatting for text, CSV and JSON output.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jumpkit/eventstudy.hpp"
#include "jumpkit/multiplicity.hpp"
#include "jumpkit/probit.hpp"

namespace jumpkit {

struct Cell {
    std::string text;
    std::optional<double> value;  // the number behind `text`, if any
    std::string source;           // module that produced the value
};

struct TableSpec {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string footnote;

    void validate() const;  // rows must match the column count
};

enum class TableFormat { text, csv, json };

std::string render_table(const TableSpec& t, TableFormat f);
std::string render_tables(std::span<const TableSpec> tables, TableFormat f);

nlohmann::json table_to_json(const TableSpec& t);
TableSpec table_from_json(const nlohmann::json& j);

enum class ColumnKind { text, integer, real, percent, tstat, pvalue };

// "-" for empty or non-finite values. percent multiplies by 100; pvalue
// floors at "<0.01".
std::string format_value(std::optional<double> v, ColumnKind kind, int decimals = 2);
Cell make_cell(std::optional<double> v, ColumnKind kind, std::string_view source, int decimals = 2);
Cell text_cell(std::string text);

// All / positive / negative jumps; sizes shown in percent.
TableSpec jump_summary_table(const JumpSummary& s);

struct RunsRow {
    std::string label;
    std::optional<RunsTestResult> result;  // empty: not computable
};
TableSpec runs_table(std::span<const RunsRow> rows);

// With and without fixed effects for one bar width. Missing fits render as
// dashes.
TableSpec probit_table(std::string title, const std::optional<ProbitReport>& with_fe,
                       const std::optional<ProbitReport>& without_fe);

// One table per post-jump span.
std::vector<TableSpec> impact_tables(const ImpactReport& r);

}  // namespace jumpkit
