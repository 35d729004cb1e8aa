#include "jumpkit/reportkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace jumpkit {

void TableSpec::validate() const {
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw std::invalid_argument("table '" + title + "' is not rectangular");
    }
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Display width in code points; labels may hold UTF-8.
std::size_t width_of(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80 ? 1 : 0;
    return w;
}

std::string pad(const std::string& s, std::size_t w, bool left) {
    const std::size_t have = width_of(s);
    if (have >= w) return s;
    const std::string fill(w - have, ' ');
    return left ? s + fill : fill + s;
}

}  // namespace

std::string render_table(const TableSpec& t, TableFormat f) {
    t.validate();
    switch (f) {
        case TableFormat::json: return table_to_json(t).dump(2) + "\n";
        case TableFormat::csv: {
            std::string out;
            for (std::size_t c = 0; c < t.columns.size(); ++c) {
                out += (c ? "," : "") + csv_escape(t.columns[c]);
            }
            out += "\n";
            for (const auto& r : t.rows) {
                for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + csv_escape(r[c].text);
                out += "\n";
            }
            return out;
        }
        case TableFormat::text: break;
    }
    std::vector<std::size_t> w(t.columns.size(), 0);
    for (std::size_t c = 0; c < t.columns.size(); ++c) w[c] = width_of(t.columns[c]);
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], width_of(r[c].text));
    }
    std::size_t total = 0;
    for (auto x : w) total += x;
    total += w.empty() ? 0 : 2 * (w.size() - 1);

    std::ostringstream out;
    out << t.title << "\n" << std::string(std::max(total, width_of(t.title)), '=') << "\n";
    auto line = [&](auto get) {
        std::string s;
        for (std::size_t c = 0; c < w.size(); ++c) {
            s += (c ? "  " : "") + pad(get(c), w[c], c == 0);
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        out << s << "\n";
    };
    line([&](std::size_t c) { return t.columns[c]; });
    out << std::string(total, '-') << "\n";
    for (const auto& r : t.rows) line([&](std::size_t c) { return r[c].text; });
    out << std::string(total, '-') << "\n";
    if (!t.footnote.empty()) out << t.footnote << "\n";
    return out.str();
}

std::string render_tables(std::span<const TableSpec> tables, TableFormat f) {
    if (f == TableFormat::json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : tables) arr.push_back(table_to_json(t));
        return arr.dump(2) + "\n";
    }
    std::string out;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i) out += "\n";
        out += render_table(tables[i], f);
    }
    return out;
}

nlohmann::json table_to_json(const TableSpec& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& c : r) {
            nlohmann::json cell{{"text", c.text}};
            if (c.value && std::isfinite(*c.value)) cell["value"] = *c.value;
            if (!c.source.empty()) cell["source"] = c.source;
            row.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"title", t.title}, {"columns", t.columns}, {"rows", rows}, {"footnote", t.footnote}};
}

TableSpec table_from_json(const nlohmann::json& j) {
    TableSpec t;
    t.title = j.at("title").get<std::string>();
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.footnote = j.value("footnote", std::string{});
    for (const auto& r : j.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r) {
            Cell cell;
            cell.text = c.at("text").get<std::string>();
            if (c.contains("value")) cell.value = c.at("value").get<double>();
            cell.source = c.value("source", std::string{});
            row.push_back(std::move(cell));
        }
        t.rows.push_back(std::move(row));
    }
    t.validate();
    return t;
}

std::string format_value(std::optional<double> v, ColumnKind kind, int decimals) {
    if (kind == ColumnKind::text) return v ? std::to_string(*v) : "-";
    if (!v || std::isnan(*v)) return "-";
    char buf[64];
    double x = *v;
    switch (kind) {
        case ColumnKind::integer:
            std::snprintf(buf, sizeof buf, "%.0f", x);
            return buf;
        case ColumnKind::percent:
            x *= 100.0;
            if (!std::isfinite(x)) return "-";
            std::snprintf(buf, sizeof buf, "%.*f%%", decimals, x);
            return buf;
        case ColumnKind::pvalue:
            if (x < 0.01) return "<0.01";
            std::snprintf(buf, sizeof buf, "%.2f", x);
            return buf;
        case ColumnKind::tstat:
        case ColumnKind::real:
            if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
            std::snprintf(buf, sizeof buf, "%.*f", kind == ColumnKind::tstat ? 2 : decimals, x);
            if (std::string_view(buf) == "-0.00") return "0.00";
            return buf;
        case ColumnKind::text: break;
    }
    return "-";
}

Cell make_cell(std::optional<double> v, ColumnKind kind, std::string_view source, int decimals) {
    Cell c;
    c.text = format_value(v, kind, decimals);
    if (v && std::isfinite(*v)) c.value = *v;
    c.source = std::string(source);
    return c;
}

Cell text_cell(std::string text) { return Cell{std::move(text), std::nullopt, {}}; }

TableSpec jump_summary_table(const JumpSummary& s) {
    TableSpec t;
    t.title = "Jump size summary";
    t.columns = {"", "All", "Positive", "Negative"};
    const GroupSummary* g[3] = {&s.all, &s.positive, &s.negative};
    auto row = [&](std::string label, auto field, ColumnKind kind) {
        std::vector<Cell> r{text_cell(std::move(label))};
        for (auto* x : g) r.push_back(make_cell(field(*x), kind, "multiplicity"));
        t.rows.push_back(std::move(r));
    };
    row("N", [](const GroupSummary& x) { return std::optional<double>(static_cast<double>(x.n)); },
        ColumnKind::integer);
    row("Mean", [](const GroupSummary& x) { return x.mean; }, ColumnKind::percent);
    row("Mean |size|", [](const GroupSummary& x) { return x.mean_abs; }, ColumnKind::percent);
    row("Median |size|", [](const GroupSummary& x) { return x.median_abs; }, ColumnKind::percent);
    row("Max", [](const GroupSummary& x) { return x.max; }, ColumnKind::percent);
    row("Min", [](const GroupSummary& x) { return x.min; }, ColumnKind::percent);
    row("Std. dev.", [](const GroupSummary& x) { return x.std_dev; }, ColumnKind::percent);
    row("Skewness", [](const GroupSummary& x) { return x.skewness; }, ColumnKind::real);
    row("Kurtosis", [](const GroupSummary& x) { return x.kurtosis; }, ColumnKind::real);
    t.footnote = "Sizes are log-price increments of the detected jump, in percent.";
    return t;
}

TableSpec runs_table(std::span<const RunsRow> rows) {
    TableSpec t;
    t.title = "Runs test on the daily jump indicator";
    t.columns = {"Period", "Jump days", "Quiet days", "Runs", "Expected", "z", "p-value"};
    for (const auto& r : rows) {
        std::vector<Cell> row{text_cell(r.label)};
        if (r.result) {
            const auto& x = *r.result;
            row.push_back(make_cell(static_cast<double>(x.n_jump_days), ColumnKind::integer, "multiplicity"));
            row.push_back(make_cell(static_cast<double>(x.n_quiet_days), ColumnKind::integer, "multiplicity"));
            row.push_back(make_cell(static_cast<double>(x.runs_observed), ColumnKind::integer, "multiplicity"));
            row.push_back(make_cell(x.expected_runs, ColumnKind::real, "multiplicity"));
            row.push_back(make_cell(x.z, ColumnKind::tstat, "multiplicity"));
            row.push_back(make_cell(x.p_value, ColumnKind::pvalue, "multiplicity"));
        } else {
            for (int i = 0; i < 6; ++i) row.push_back(text_cell("-"));
        }
        t.rows.push_back(std::move(row));
    }
    t.footnote = "Two-sided; exact null distribution when either category has fewer than 10 days.";
    return t;
}

TableSpec probit_table(std::string title, const std::optional<ProbitReport>& with_fe,
                       const std::optional<ProbitReport>& without_fe) {
    TableSpec t;
    t.title = std::move(title);
    t.columns = {"Variable", "Coef. (FE)", "p (FE)", "Marg. (FE)", "Coef.", "p", "Marg."};
    const std::vector<std::pair<std::string, std::string>> vars = {
        {"intercept", "Intercept"}, {"subperiod_2", "Days 297-592"}, {"subperiod_3", "Days 593-888"},
        {"ms", "Med. spread"},      {"of", "Order flow"},            {"wr", "Whales"},
        {"price", "Price"},         {"rv", "Realized var."},         {"nv", "Noise var."}};
    auto lookup = [](const std::optional<ProbitReport>& r, const std::string& name) -> std::optional<std::size_t> {
        if (!r) return std::nullopt;
        for (std::size_t i = 0; i < r->fit.names.size(); ++i) {
            if (r->fit.names[i] == name) return i;
        }
        return std::nullopt;
    };
    for (const auto& [name, label] : vars) {
        std::vector<Cell> row{text_cell(label)};
        for (const auto* r : {&with_fe, &without_fe}) {
            const auto i = lookup(*r, name);
            if (!i) {
                for (int k = 0; k < 3; ++k) row.push_back(text_cell("-"));
                continue;
            }
            const auto e = static_cast<Eigen::Index>(*i);
            row.push_back(make_cell((*r)->fit.beta[e], ColumnKind::real, "probit"));
            row.push_back(make_cell((*r)->fit.p[e], ColumnKind::pvalue, "probit"));
            if (name == "intercept") {
                row.push_back(text_cell("-"));
            } else {
                row.push_back(make_cell((*r)->marginal.at(*i), ColumnKind::percent, "probit"));
            }
        }
        t.rows.push_back(std::move(row));
    }
    auto stat_row = [&](std::string label, auto get, ColumnKind kind) {
        std::vector<Cell> row{text_cell(std::move(label))};
        for (const auto* r : {&with_fe, &without_fe}) {
            row.push_back(*r ? make_cell(get(**r), kind, "probit") : text_cell("-"));
            row.push_back(text_cell(""));
            row.push_back(text_cell(""));
        }
        t.rows.push_back(std::move(row));
    };
    stat_row("N", [](const ProbitReport& r) { return static_cast<double>(r.fit.n_obs); }, ColumnKind::integer);
    stat_row("Adj. pseudo-R2", [](const ProbitReport& r) { return r.diagnostics.adj_pseudo_r2; }, ColumnKind::real);
    stat_row("Pseudo-R2", [](const ProbitReport& r) { return r.diagnostics.pseudo_r2; }, ColumnKind::real);
    stat_row("LR stat.", [](const ProbitReport& r) { return r.diagnostics.lr_stat; }, ColumnKind::real);
    stat_row("LR p-value", [](const ProbitReport& r) { return r.diagnostics.lr_p; }, ColumnKind::pvalue);
    t.footnote = "Marginal: change in jump probability for a one standard deviation move from the sample mean.";
    return t;
}

std::vector<TableSpec> impact_tables(const ImpactReport& r) {
    std::vector<TableSpec> out;
    const auto minutes = std::chrono::duration_cast<std::chrono::minutes>(r.span_width).count();
    for (int s = 0; s < r.n_spans; ++s) {
        TableSpec t;
        t.title = "Panel " + std::string(1, static_cast<char>('A' + s % 26)) + ": " +
                  std::to_string(s * minutes) + "-" + std::to_string((s + 1) * minutes) +
                  " min after the jump";
        t.columns = {"Statistic", "t (all)", "p (all)", "N (all)", "t (pos.)", "p (pos.)", "N (pos.)",
                     "t (neg.)", "p (neg.)", "N (neg.)"};
        for (ImpactStat stat : all_impact_stats) {
            std::vector<Cell> row{text_cell(std::string(stat_label(stat)))};
            for (SignGroup g : all_sign_groups) {
                const auto& c = r.at(stat, s, g);
                const bool has = c.test.n >= 2;
                row.push_back(has ? make_cell(c.test.t, ColumnKind::tstat, "eventstudy") : text_cell("-"));
                row.push_back(has ? make_cell(c.test.p, ColumnKind::pvalue, "eventstudy") : text_cell("-"));
                row.push_back(make_cell(static_cast<double>(c.test.n), ColumnKind::integer, "eventstudy"));
            }
            t.rows.push_back(std::move(row));
        }
        t.footnote = "t-tests of mean log(post / reference); reference is the window starting one hour before the jump.";
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace jumpkit
