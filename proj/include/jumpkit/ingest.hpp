#pragma once

// Trade-log ingestion: leg pairing, cleaning filters and the canonical tick file.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jumpkit/core.hpp"

namespace jumpkit {

// One leg of an exchange trade as it appears in the raw log.
struct RawTradeRow {
    std::string timestamp_text;
    std::string trade_id;
    std::string user_id;
    Side side = Side::buy;
    std::string currency;
    double fiat_amount = 0.0;
    double btc_amount = 0.0;
    double fiat_fee = 0.0;
    double btc_fee = 0.0;
    // Whether this leg's user initiated the trade, when the feed records it.
    std::optional<bool> initiator;
    // Source line, used to detect byte-identical duplicates.
    std::string raw;
};

struct TickTrade {
    Instant exec_time{};
    std::uint64_t trade_id = 0;
    std::string buyer_id;
    std::string seller_id;
    Aggressor aggressor = Aggressor::bid;
    double price = 0.0;  // USD per BTC, 3 decimals
    double fiat_amount = 0.0;
    double btc_amount = 0.0;
};

// Rejection counts. `records` is the number of distinct trade IDs after
// de-duplication; every record is either accepted or counted under exactly
// one record-level reason.
struct CleaningReport {
    std::size_t input_rows = 0;
    std::size_t duplicate = 0;
    std::size_t records = 0;
    std::size_t missing_leg = 0;
    std::size_t self_trade = 0;
    std::size_t malformed = 0;
    std::size_t non_usd = 0;
    std::size_t sub_minimum_fiat = 0;
    std::size_t zero_or_extreme_price = 0;
    std::size_t outside_band = 0;
    std::size_t bounceback = 0;
    std::size_t accepted = 0;

    std::size_t rejected() const {
        return missing_leg + self_trade + malformed + non_usd + sub_minimum_fiat +
               zero_or_extreme_price + outside_band + bounceback;
    }
    bool conserved() const { return records == accepted + rejected(); }
};

void to_json(nlohmann::json& j, const CleaningReport& r);
void from_json(const nlohmann::json& j, CleaningReport& r);

// Trade IDs are a POSIX timestamp followed by six microsecond digits.
Instant parse_trade_id(std::string_view trade_id);

struct LegPair {
    std::string trade_id;
    RawTradeRow buy;
    RawTradeRow sell;
};

struct AggregateResult {
    std::vector<LegPair> records;
    CleaningReport report;
};

AggregateResult aggregate_legs(std::span<const RawTradeRow> rows);

struct PriceBand {
    double low = 0.0;
    double high = 0.0;
};
// Days absent from the map are not band-filtered.
using DailyBands = std::map<Date, PriceBand>;

struct CleanConfig {
    double min_fiat = 0.10;
    double max_price = 10'000.0;
    double band_margin = 0.20;
};

struct CleanResult {
    std::vector<TickTrade> ticks;
    CleaningReport report;
};

// Filters paired records and converts them to ticks sorted by (exec_time, trade_id).
// Aggressor comes from the legs' initiator flags when both carry one, else from
// the tick rule over the sorted sequence.
CleanResult clean_trades(std::span<const LegPair> records, const DailyBands& bands = {},
                         const CleanConfig& cfg = {});

struct BouncebackConfig {
    double threshold_mads = 5.0;
    double reversion_tol = 0.25;
    std::size_t window = 50;   // neighbouring returns on each side
    double min_scale = 1e-4;   // floor on the deviation scale, in log-return units
};

struct FilterResult {
    std::vector<TickTrade> ticks;
    std::size_t removed = 0;
};

FilterResult filter_bouncebacks(std::span<const TickTrade> ticks, const BouncebackConfig& cfg = {});

double round_price(double price);

struct IngestResult {
    std::vector<TickTrade> ticks;
    CleaningReport report;
};

// aggregate_legs -> clean_trades -> filter_bouncebacks with a merged report.
IngestResult ingest_rows(std::span<const RawTradeRow> rows, const DailyBands& bands = {},
                         const CleanConfig& clean = {}, const BouncebackConfig& bounce = {});

// --- file formats -------------------------------------------------------

// Column positions in a raw leg file; -1 marks an absent optional column.
struct ColumnMap {
    int timestamp = 0;
    int trade_id = 1;
    int user_id = 2;
    int side = 3;
    int currency = 4;
    int fiat_amount = 5;
    int btc_amount = 6;
    int fiat_fee = 7;
    int btc_fee = 8;
    int initiator = -1;

    // Recognizes common header spellings; unknown headers keep defaults.
    static ColumnMap from_header(std::span<const std::string> header);
};

struct RawReadResult {
    std::vector<RawTradeRow> rows;
    std::size_t unparseable = 0;
    bool had_header = false;
};

// Header is detected when the trade-id cell of the first line is not numeric.
// When `columns` is empty, a detected header defines the mapping.
RawReadResult read_raw_trades(std::istream& in, const std::optional<ColumnMap>& columns = {});

// date,low,high per line; header optional.
DailyBands read_daily_bands(std::istream& in);

// Canonical tick CSV, columns in this order:
// exec_time_us,trade_id,buyer_id,seller_id,aggressor,price,fiat_amount,btc_amount
void write_ticks_csv(std::ostream& out, std::span<const TickTrade> ticks);
std::vector<TickTrade> read_ticks_csv(std::istream& in);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace jumpkit
