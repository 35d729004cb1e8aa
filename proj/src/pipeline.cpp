#include "jumpkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jumpkit/features.hpp"
#include "jumpkit/reportkit.hpp"
#include "jumpkit/series.hpp"

namespace jumpkit {

using nlohmann::json;

// --- config -------------------------------------------------------------

void PipelineConfig::validate() const {
    jump.validate();
    if (!(fdr_q > 0.0 && fdr_q < 1.0)) throw ConfigError("fdr_q must lie in (0, 1)");
    if (bar_widths_minutes.empty()) throw ConfigError("at least one bar width is required");
    for (int w : bar_widths_minutes) {
        if (w <= 0 || (24 * 60) % w != 0) throw ConfigError("bar width must divide 24 hours: " + std::to_string(w));
    }
    if (impact.n_spans < 1 || impact.span <= Micros::zero()) throw ConfigError("impact spans must be positive");
    if (impact.reference_offset < impact.span) throw ConfigError("impact reference must end before the jump");
    if (profile_minutes_before < 0 || profile_minutes_after < 0) throw ConfigError("profile range must be non-negative");
    const int w = bar_widths_minutes.front();
    if (profile_minutes_before % w || profile_minutes_after % w || profile_base_minutes % w) {
        throw ConfigError("profile offsets must be multiples of the bar width");
    }
    if (profile_base_minutes > profile_minutes_before) throw ConfigError("profile base lies outside the profile");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    if (!(cleaning.band_margin >= 0.0) || !(cleaning.min_fiat >= 0.0) || !(cleaning.max_price > 0.0)) {
        throw ConfigError("cleaning parameters out of range");
    }
    if (probit.max_iter < 1 || !(probit.grad_tol > 0.0)) throw ConfigError("probit options out of range");
    for (const auto& p : subperiods) {
        if (p.last < p.first) throw ConfigError("sub-period ends before it starts");
    }
}

ProfileConfig PipelineConfig::profile_config() const {
    const int w = bar_widths_minutes.front();
    ProfileConfig p;
    p.bar_width = std::chrono::minutes{w};
    p.bars_before = profile_minutes_before / w;
    p.bars_after = profile_minutes_after / w;
    p.base_offset = -profile_base_minutes / w;
    return p;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    try {
        if (j.contains("paths")) {
            const auto& p = j.at("paths");
            if (p.contains("inputs")) {
                for (const auto& s : p.at("inputs")) c.inputs.emplace_back(s.get<std::string>());
            }
            if (p.contains("band_file")) c.band_file = p.at("band_file").get<std::string>();
            if (p.contains("output_dir")) c.output_dir = p.at("output_dir").get<std::string>();
        }
        if (j.contains("jump_test")) {
            const auto& t = j.at("jump_test");
            c.jump.k = t.value("k", c.jump.k);
            c.jump.block_const = t.value("block_const", c.jump.block_const);
            c.jump.preavg_const = t.value("preavg_const", c.jump.preavg_const);
            c.jump.min_increments = t.value("min_increments", c.jump.min_increments);
        }
        if (j.contains("bar_widths_minutes")) c.bar_widths_minutes = j.at("bar_widths_minutes").get<std::vector<int>>();
        c.fdr_q = j.value("fdr_q", c.fdr_q);
        if (j.contains("subperiods")) {
            c.subperiods.clear();
            for (const auto& s : j.at("subperiods")) {
                c.subperiods.push_back(SubPeriod{parse_date(s.at("first").get<std::string>()),
                                                 parse_date(s.at("last").get<std::string>())});
            }
        }
        if (j.contains("impact")) {
            const auto& i = j.at("impact");
            c.impact.span = std::chrono::minutes{i.value("span_minutes", 15)};
            c.impact.n_spans = i.value("n_spans", c.impact.n_spans);
            c.impact.reference_offset = std::chrono::minutes{i.value("reference_offset_minutes", 60)};
        }
        c.impact.k = c.jump.k;
        c.impact.preavg_const = c.jump.preavg_const;
        if (j.contains("profile")) {
            const auto& p = j.at("profile");
            c.profile_minutes_before = p.value("minutes_before", c.profile_minutes_before);
            c.profile_minutes_after = p.value("minutes_after", c.profile_minutes_after);
            c.profile_base_minutes = p.value("base_minutes", c.profile_base_minutes);
        }
        if (j.contains("cleaning")) {
            const auto& p = j.at("cleaning");
            c.cleaning.min_fiat = p.value("min_fiat", c.cleaning.min_fiat);
            c.cleaning.max_price = p.value("max_price", c.cleaning.max_price);
            c.cleaning.band_margin = p.value("band_margin", c.cleaning.band_margin);
        }
        if (j.contains("bounceback")) {
            const auto& p = j.at("bounceback");
            c.bounceback.threshold_mads = p.value("threshold_mads", c.bounceback.threshold_mads);
            c.bounceback.reversion_tol = p.value("reversion_tol", c.bounceback.reversion_tol);
            c.bounceback.window = p.value("window", c.bounceback.window);
            c.bounceback.min_scale = p.value("min_scale", c.bounceback.min_scale);
        }
        if (j.contains("probit")) {
            const auto& p = j.at("probit");
            c.probit.max_iter = p.value("max_iter", c.probit.max_iter);
            c.probit.grad_tol = p.value("grad_tol", c.probit.grad_tol);
            c.probit.robust_se = p.value("robust_se", c.probit.robust_se);
        }
        if (j.contains("scenario")) c.scenario = j.at("scenario").get<SimScenario>();
        if (j.contains("panel")) c.panel = j.at("panel").get<PanelConfig>();
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const DataError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

PipelineConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config " + file.string());
    try {
        return config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + file.string() + ": " + e.what());
    }
}

void apply_env_overrides(PipelineConfig& cfg) {
    if (const char* v = std::getenv("JUMPKIT_INPUT"); v && *v) {
        cfg.inputs.clear();
        std::stringstream ss(v);
        for (std::string part; std::getline(ss, part, ',');) {
            if (!part.empty()) cfg.inputs.emplace_back(part);
        }
    }
    if (const char* v = std::getenv("JUMPKIT_OUTPUT_DIR"); v && *v) cfg.output_dir = v;
    if (const char* v = std::getenv("JUMPKIT_BAND_FILE"); v && *v) cfg.band_file = v;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const NumericalError*>(&e)) return 4;
    return 1;
}

// --- file helpers -------------------------------------------------------

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        try {
            body(out);
        } catch (...) {
            out.close();
            fs::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw DataError("write failed for " + path.string());
        }
    }
    fs::rename(tmp, path);
}

namespace {

std::ifstream open_input(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    return in;
}

fs::path artifact(const PipelineConfig& cfg, const std::string& name) { return cfg.output_dir / name; }

// The stage's primary input: the first --input, else the artifact in the
// output directory.
fs::path primary(const PipelineConfig& cfg, const std::string& name) {
    return cfg.inputs.empty() ? artifact(cfg, name) : cfg.inputs.front();
}

std::vector<TickTrade> load_ticks(const fs::path& p) {
    auto in = open_input(p);
    auto ticks = read_ticks_csv(in);
    for (std::size_t i = 1; i < ticks.size(); ++i) {
        if (ticks[i].exec_time < ticks[i - 1].exec_time) throw DataError(p.string() + ": ticks are not sorted");
    }
    return ticks;
}

std::vector<DayOutcome> load_detections(const fs::path& p) {
    auto in = open_input(p);
    return read_detections_csv(in);
}

std::vector<JumpDetection> tested(std::span<const DayOutcome> days) {
    std::vector<JumpDetection> out;
    for (const auto& d : days) {
        if (d.detection) out.push_back(*d.detection);
    }
    return out;
}

void write_json(const fs::path& p, const json& j) {
    write_atomic(p, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
}

void write_text(const fs::path& p, const std::string& s) {
    write_atomic(p, [&](std::ostream& o) { o << s; });
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

void write_detections_csv(std::ostream& out, std::span<const DayOutcome> days) {
    out << "date,n,tested,reason,statistic,p_value,loc_start_us,loc_end_us,loc_start,loc_end,"
           "jump_size,block_size,blocks,variance,sigma2T,q2\n";
    char buf[768];
    for (const auto& d : days) {
        const std::string date = format_date(d.date);
        if (!d.detection) {
            std::string reason = d.reason;
            std::replace(reason.begin(), reason.end(), ',', ';');
            std::replace(reason.begin(), reason.end(), '\n', ' ');
            out << date << ',' << d.n << ",0," << reason << ",,,,,,,,,,,,\n";
            continue;
        }
        const auto& x = *d.detection;
        std::snprintf(buf, sizeof buf,
                      "%s,%zu,1,,%.17g,%.17g,%lld,%lld,%s,%s,%.17g,%zu,%zu,%.17g,%.17g,%.17g\n",
                      date.c_str(), x.n, x.statistic_std, x.p_value,
                      static_cast<long long>(to_micros(x.loc_start)),
                      static_cast<long long>(to_micros(x.loc_end)), format_instant(x.loc_start).c_str(),
                      format_instant(x.loc_end).c_str(), x.jump_size, x.block_size, x.blocks, x.variance,
                      x.sigma2T, x.q2);
        out << buf;
    }
}

std::vector<DayOutcome> read_detections_csv(std::istream& in) {
    std::vector<DayOutcome> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (lineno == 1 && line.rfind("date,", 0) == 0)) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 16) throw DataError("detections line " + std::to_string(lineno) + ": expected 16 fields");
        try {
            DayOutcome d;
            d.date = parse_date(c[0]);
            d.n = std::stoull(c[1]);
            if (c[2] == "1") {
                JumpDetection x;
                x.date = d.date;
                x.n = d.n;
                x.statistic_std = std::stod(c[4]);
                x.p_value = std::stod(c[5]);
                x.loc_start = from_micros(std::stoll(c[6]));
                x.loc_end = from_micros(std::stoll(c[7]));
                x.jump_size = std::stod(c[10]);
                x.block_size = std::stoull(c[11]);
                x.blocks = std::stoull(c[12]);
                x.variance = std::stod(c[13]);
                x.sigma2T = std::stod(c[14]);
                x.q2 = std::stod(c[15]);
                d.detection = x;
            } else {
                d.reason = c[3];
            }
            out.push_back(std::move(d));
        } catch (const std::logic_error&) {
            throw DataError("detections line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

// --- stages -------------------------------------------------------------

Artifacts cmd_ingest(const PipelineConfig& cfg) {
    cfg.validate();
    if (cfg.inputs.empty()) throw ConfigError("ingest needs at least one --input raw trade file");
    std::vector<RawTradeRow> rows;
    std::size_t unparseable = 0;
    for (const auto& p : cfg.inputs) {
        auto in = open_input(p);
        auto r = read_raw_trades(in);
        unparseable += r.unparseable;
        std::move(r.rows.begin(), r.rows.end(), std::back_inserter(rows));
    }
    DailyBands bands;
    if (!cfg.band_file.empty()) {
        auto in = open_input(cfg.band_file);
        bands = read_daily_bands(in);
    }
    const auto result = ingest_rows(rows, bands, cfg.cleaning, cfg.bounceback);
    const auto ticks_path = artifact(cfg, "ticks.csv");
    const auto report_path = artifact(cfg, "cleaning_report.json");
    write_atomic(ticks_path, [&](std::ostream& o) { write_ticks_csv(o, result.ticks); });
    json rep = result.report;
    rep["unparseable_lines"] = unparseable;
    rep["band_days"] = bands.size();
    write_json(report_path, rep);
    return {ticks_path, report_path};
}

Artifacts cmd_detect(const PipelineConfig& cfg) {
    cfg.validate();
    const auto ticks = load_ticks(primary(cfg, "ticks.csv"));
    const auto days = split_days(ticks);
    const auto outcomes = test_days(days, cfg.jump, cfg.threads);
    const auto path = artifact(cfg, "detections.csv");
    write_atomic(path, [&](std::ostream& o) { write_detections_csv(o, outcomes); });
    return {path};
}

Artifacts cmd_fdr(const PipelineConfig& cfg) {
    cfg.validate();
    const auto days = load_detections(primary(cfg, "detections.csv"));
    std::vector<DayOutcome> tested_days;
    std::vector<double> p;
    for (const auto& d : days) {
        if (!d.detection) continue;
        tested_days.push_back(d);
        p.push_back(d.detection->p_value);
    }
    const auto res = fdr_select(p, cfg.fdr_q);
    std::vector<DayOutcome> rejected;
    for (auto i : res.rejected) rejected.push_back(tested_days[i]);
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (const auto& d : rejected) (d.detection->jump_size > 0 ? pos : neg) += 1;

    json j{{"q", res.q_target},
           {"threshold_p", res.threshold_p},
           {"days_total", days.size()},
           {"days_tested", tested_days.size()},
           {"days_rejected", rejected.size()},
           {"positive", pos},
           {"negative", neg}};
    json dates = json::array();
    for (const auto& d : rejected) dates.push_back(format_date(d.date));
    j["rejected_dates"] = dates;

    const auto fdr_path = artifact(cfg, "fdr.json");
    const auto rej_path = artifact(cfg, "rejected.csv");
    write_json(fdr_path, j);
    write_atomic(rej_path, [&](std::ostream& o) { write_detections_csv(o, rejected); });
    return {fdr_path, rej_path};
}

Artifacts cmd_features(const PipelineConfig& cfg) {
    cfg.validate();
    const auto ticks = load_ticks(primary(cfg, "ticks.csv"));
    const auto rejected = tested(load_detections(artifact(cfg, "rejected.csv")));
    Artifacts out;
    for (int w : cfg.bar_widths_minutes) {
        FeatureConfig fc;
        fc.bar_width = std::chrono::minutes{w};
        fc.k = cfg.jump.k;
        fc.preavg_const = cfg.jump.preavg_const;
        fc.subperiods = cfg.subperiods;
        const auto rows = build_features(ticks, rejected, fc);
        const auto path = artifact(cfg, "features_" + std::to_string(w) + "m.csv");
        write_atomic(path, [&](std::ostream& o) { write_features_csv(o, rows); });
        out.push_back(path);
    }
    return out;
}

Artifacts cmd_probit(const PipelineConfig& cfg) {
    cfg.validate();
    json j = json::object();
    std::vector<TableSpec> tables;
    std::size_t failures = 0;
    std::size_t attempts = 0;
    std::string last_error;
    for (std::size_t wi = 0; wi < cfg.bar_widths_minutes.size(); ++wi) {
        const int w = cfg.bar_widths_minutes[wi];
        const fs::path in_path = (cfg.inputs.size() > wi) ? cfg.inputs[wi]
                                                          : artifact(cfg, "features_" + std::to_string(w) + "m.csv");
        auto in = open_input(in_path);
        const auto rows = read_features_csv(in);
        std::optional<ProbitReport> fits[2];
        json panel = json::object();
        for (int fe = 1; fe >= 0; --fe) {
            const char* key = fe ? "with_fixed_effects" : "without_fixed_effects";
            ++attempts;
            try {
                fits[fe] = fit_probit_report(rows, fe == 1, cfg.probit);
                panel[key] = *fits[fe];
            } catch (const NumericalError& e) {
                ++failures;
                last_error = e.what();
                panel[key] = json{{"error", e.what()}};
            }
        }
        j[std::to_string(w) + "m"] = panel;
        const std::string label(1, static_cast<char>('A' + wi % 26));
        tables.push_back(probit_table("Panel " + label + ": probit of next-period jump, " + std::to_string(w) +
                                          "-minute periods",
                                      fits[1], fits[0]));
    }
    if (attempts > 0 && failures == attempts) throw NonConvergence("every probit fit failed: " + last_error);
    const auto json_path = artifact(cfg, "probit.json");
    const auto txt_path = artifact(cfg, "probit.txt");
    const auto tab_path = artifact(cfg, "probit_tables.json");
    write_json(json_path, j);
    write_text(txt_path, render_tables(tables, TableFormat::text));
    write_text(tab_path, render_tables(tables, TableFormat::json));
    return {json_path, txt_path, tab_path};
}

Artifacts cmd_impact(const PipelineConfig& cfg) {
    cfg.validate();
    const auto ticks = load_ticks(primary(cfg, "ticks.csv"));
    const auto rejected = tested(load_detections(artifact(cfg, "rejected.csv")));
    const auto quotes = build_quotes(ticks);
    ImpactConfig ic = cfg.impact;
    ic.k = cfg.jump.k;
    ic.preavg_const = cfg.jump.preavg_const;
    const auto report = impact_ttests(ticks, quotes, rejected, ic);
    const auto tables = impact_tables(report);

    Artifacts out;
    const auto json_path = artifact(cfg, "impact.json");
    write_json(json_path, json(report));
    out.push_back(json_path);
    const auto txt_path = artifact(cfg, "impact.txt");
    write_text(txt_path, render_tables(tables, TableFormat::text));
    out.push_back(txt_path);
    const auto tab_path = artifact(cfg, "impact_tables.json");
    write_text(tab_path, render_tables(tables, TableFormat::json));
    out.push_back(tab_path);

    const auto pc = cfg.profile_config();
    const auto bars = build_bars(ticks, quotes, pc.bar_width);
    for (const auto& prof : price_profiles(bars, rejected, pc)) {
        const auto path = artifact(cfg, "profile_" + std::string(group_name(prof.group)) + ".csv");
        write_atomic(path, [&](std::ostream& o) { write_profile_csv(o, prof, pc.bar_width); });
        out.push_back(path);
    }

    const int w = cfg.bar_widths_minutes.front();
    const auto feat_path = artifact(cfg, "features_" + std::to_string(w) + "m.csv");
    std::vector<FeatureRow> features;
    if (fs::exists(feat_path)) {
        auto in = open_input(feat_path);
        features = read_features_csv(in);
    } else {
        FeatureConfig fc;
        fc.bar_width = pc.bar_width;
        fc.k = cfg.jump.k;
        fc.preavg_const = cfg.jump.preavg_const;
        fc.subperiods = cfg.subperiods;
        features = build_features(ticks, rejected, fc);
    }
    const auto factors = factor_profiles(features, rejected, pc);
    const auto fac_path = artifact(cfg, "factors.csv");
    write_atomic(fac_path, [&](std::ostream& o) { write_factor_csv(o, factors, pc.bar_width); });
    out.push_back(fac_path);
    return out;
}

Artifacts cmd_simulate(const PipelineConfig& cfg) {
    cfg.validate();
    SimScenario sc = cfg.scenario;
    sc.seed = cfg.seed;
    std::vector<SimDay> days;
    if (cfg.panel.null_days + cfg.panel.jump_days > 0) {
        if (cfg.panel.jump_days > 0 && !(cfg.panel.jump_log_median > 0.0)) {
            throw ConfigError("panel.jump_log_median must be positive");
        }
        days = simulate_panel(sc, cfg.panel, cfg.threads);
    } else {
        days.push_back(simulate_day(sc));
    }
    const auto ticks_path = artifact(cfg, "ticks.csv");
    const auto truth_path = artifact(cfg, "truth.csv");
    write_atomic(ticks_path, [&](std::ostream& o) {
        o << "exec_time_us,trade_id,buyer_id,seller_id,aggressor,price,fiat_amount,btc_amount\n";
        for (const auto& d : days) {
            std::ostringstream body;
            write_ticks_csv(body, d.ticks);
            const std::string s = body.str();
            o << s.substr(s.find('\n') + 1);
        }
    });
    write_atomic(truth_path, [&](std::ostream& o) { write_truth_csv(o, days); });
    return {ticks_path, truth_path};
}

namespace {

std::vector<TableSpec> load_tables(const fs::path& p) {
    std::vector<TableSpec> out;
    if (!fs::exists(p)) return out;
    auto in = open_input(p);
    try {
        const auto j = json::parse(in);
        for (const auto& t : j) out.push_back(table_from_json(t));
    } catch (const json::exception& e) {
        throw DataError(p.string() + ": " + e.what());
    }
    return out;
}

std::optional<RunsTestResult> runs_or_empty(const std::vector<bool>& flags) {
    try {
        return runs_test(flags);
    } catch (const DegenerateSequence&) {
        return std::nullopt;
    }
}

}  // namespace

Artifacts cmd_report(const PipelineConfig& cfg) {
    cfg.validate();
    const auto days = load_detections(primary(cfg, "detections.csv"));
    const auto rejected_days = load_detections(artifact(cfg, "rejected.csv"));
    const auto rejected = tested(rejected_days);

    std::vector<double> sizes;
    for (const auto& d : rejected) sizes.push_back(d.jump_size);
    const auto summary = jump_summary(sizes);

    std::map<Date, bool> is_rejected;
    for (const auto& d : rejected) is_rejected[d.date] = true;
    std::vector<const DayOutcome*> tested_days;
    for (const auto& d : days) {
        if (d.detection) tested_days.push_back(&d);
    }
    std::sort(tested_days.begin(), tested_days.end(),
              [](const DayOutcome* a, const DayOutcome* b) { return a->date < b->date; });

    std::vector<RunsRow> runs_rows;
    {
        std::vector<bool> flags;
        for (auto* d : tested_days) flags.push_back(is_rejected.count(d->date) > 0);
        runs_rows.push_back(RunsRow{"Full sample", runs_or_empty(flags)});
        for (std::size_t s = 0; s < cfg.subperiods.size(); ++s) {
            std::vector<bool> sub;
            for (auto* d : tested_days) {
                if (subperiod_of(d->date, cfg.subperiods) == static_cast<int>(s) + 1) {
                    sub.push_back(is_rejected.count(d->date) > 0);
                }
            }
            runs_rows.push_back(RunsRow{"Sub-period " + std::to_string(s + 1) + " (" +
                                            format_date(cfg.subperiods[s].first) + " to " +
                                            format_date(cfg.subperiods[s].last) + ")",
                                        runs_or_empty(sub)});
        }
    }

    std::vector<TableSpec> tables{jump_summary_table(summary), runs_table(runs_rows)};
    for (auto& t : load_tables(artifact(cfg, "probit_tables.json"))) tables.push_back(std::move(t));
    for (auto& t : load_tables(artifact(cfg, "impact_tables.json"))) tables.push_back(std::move(t));

    std::size_t pos = 0;
    std::size_t neg = 0;
    for (double s : sizes) (s > 0 ? pos : neg) += 1;
    std::vector<double> p_values;
    for (auto* d : tested_days) p_values.push_back(d->detection->p_value);
    const auto fdr = fdr_select(p_values, cfg.fdr_q);

    json summary_json{{"days_total", days.size()},
                      {"days_tested", tested_days.size()},
                      {"days_rejected", rejected.size()},
                      {"positive", pos},
                      {"negative", neg},
                      {"fdr_q", cfg.fdr_q},
                      {"fdr_threshold_p", fdr.threshold_p}};
    if (runs_rows.front().result) {
        summary_json["runs_full_sample_p"] = runs_rows.front().result->p_value;
        summary_json["runs_full_sample_z"] = runs_rows.front().result->z;
    }

    std::ostringstream text;
    text << "Jump detection report\n"
         << "days in sample: " << days.size() << "\n"
         << "days tested: " << tested_days.size() << "\n"
         << "days with a jump at FDR " << fmt("%.2f", cfg.fdr_q) << ": " << rejected.size() << " (" << pos
         << " positive, " << neg << " negative)\n"
         << "largest rejected p-value: " << fmt("%.3g", fdr.threshold_p) << "\n\n"
         << render_tables(tables, TableFormat::text);

    Artifacts out;
    const auto txt_path = artifact(cfg, "report.txt");
    write_text(txt_path, text.str());
    out.push_back(txt_path);
    json tables_json = json::array();
    for (const auto& t : tables) tables_json.push_back(table_to_json(t));
    const auto json_path = artifact(cfg, "report.json");
    write_json(json_path, json{{"summary", summary_json}, {"tables", tables_json}});
    out.push_back(json_path);

    // p-values against the step-up line
    {
        std::vector<std::size_t> order(p_values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
        const auto path = artifact(cfg, "fig_pvalues.csv");
        write_atomic(path, [&](std::ostream& o) {
            o << "rank,date,p_value,bh_line,rejected\n";
            const double m = static_cast<double>(p_values.size());
            for (std::size_t r = 0; r < order.size(); ++r) {
                const auto* d = tested_days[order[r]];
                char buf[160];
                std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%d\n", r + 1, format_date(d->date).c_str(),
                              p_values[order[r]], static_cast<double>(r + 1) * cfg.fdr_q / m,
                              is_rejected.count(d->date) ? 1 : 0);
                o << buf;
            }
        });
        out.push_back(path);
    }
    // jump size histogram, 0.5% bins
    {
        const auto path = artifact(cfg, "fig_jump_sizes.csv");
        std::map<long, std::pair<std::size_t, std::size_t>> bins;
        const double width = 0.005;
        for (double s : sizes) {
            auto& b = bins[static_cast<long>(std::floor(s / width))];
            (s > 0 ? b.first : b.second) += 1;
        }
        write_atomic(path, [&](std::ostream& o) {
            o << "bin_lo,bin_hi,positive,negative\n";
            for (const auto& [k, c] : bins) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "%.4f,%.4f,%zu,%zu\n", static_cast<double>(k) * width,
                              static_cast<double>(k + 1) * width, c.first, c.second);
                o << buf;
            }
        });
        out.push_back(path);
    }
    // jumps per quarter
    {
        const auto path = artifact(cfg, "fig_jumps_per_quarter.csv");
        struct Q {
            std::size_t tested = 0, jumps = 0, pos = 0, neg = 0;
        };
        std::map<std::string, Q> q;
        for (auto* d : tested_days) ++q[quarter_label(d->date)].tested;
        for (const auto& d : rejected) {
            auto& e = q[quarter_label(d.date)];
            ++e.jumps;
            (d.jump_size > 0 ? e.pos : e.neg) += 1;
        }
        write_atomic(path, [&](std::ostream& o) {
            o << "quarter,tested_days,jump_days,positive,negative\n";
            for (const auto& [k, e] : q) o << k << ',' << e.tested << ',' << e.jumps << ',' << e.pos << ',' << e.neg << "\n";
        });
        out.push_back(path);
    }
    // ticks around the largest detected jump
    const auto ticks_path = artifact(cfg, "ticks.csv");
    if (!rejected.empty() && fs::exists(ticks_path)) {
        const auto ticks = load_ticks(ticks_path);
        const auto biggest = std::max_element(rejected.begin(), rejected.end(), [](const auto& a, const auto& b) {
            return std::abs(a.jump_size) < std::abs(b.jump_size);
        });
        const auto [a, b] = tick_range(ticks, biggest->loc_start - std::chrono::hours{2},
                                       biggest->loc_end + std::chrono::hours{2});
        const auto path = artifact(cfg, "fig_jump_example.csv");
        write_atomic(path, [&](std::ostream& o) {
            o << "exec_time_us,exec_time,price,in_window\n";
            for (std::size_t i = a; i < b; ++i) {
                const auto& t = ticks[i];
                const bool inside = t.exec_time >= biggest->loc_start && t.exec_time <= biggest->loc_end;
                char buf[160];
                std::snprintf(buf, sizeof buf, "%lld,%s,%.3f,%d\n", static_cast<long long>(to_micros(t.exec_time)),
                              format_instant(t.exec_time).c_str(), t.price, inside ? 1 : 0);
                o << buf;
            }
        });
        out.push_back(path);
    }
    return out;
}

}  // namespace jumpkit
