#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jumpkit {

using Micros = std::chrono::microseconds;
using Instant = std::chrono::sys_time<Micros>;
using Date = std::chrono::sys_days;

enum class Side { buy, sell };

// bid: the buyer initiated the trade (aggressive bid lifting the ask).
// ask: the seller initiated the trade (aggressive ask hitting the bid).
enum class Aggressor { bid, ask };

// Error hierarchy. Error kinds map onto CLI exit codes in pipeline.cpp.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class MalformedTradeId : public DataError {
public:
    using DataError::DataError;
};

class InsufficientData : public DataError {
public:
    using DataError::DataError;
};

class DegenerateSequence : public DataError {
public:
    using DataError::DataError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class DegenerateVariance : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RankDeficientDesign : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Outcome is constant or perfectly separated; no finite MLE exists.
class SeparationError : public NonConvergence {
public:
    using NonConvergence::NonConvergence;
};

inline std::int64_t to_micros(Instant t) { return t.time_since_epoch().count(); }
inline Instant from_micros(std::int64_t us) { return Instant{Micros{us}}; }

inline Date day_of(Instant t) { return std::chrono::floor<std::chrono::days>(t); }
inline Instant day_start(Date d) { return Instant{d}; }

std::string format_date(Date d);
Date parse_date(std::string_view text);   // YYYY-MM-DD; throws DataError
std::string format_instant(Instant t);    // 2011-06-28T00:12:00.123456Z

// Quarter label used by per-quarter aggregates, e.g. "2013Q2".
std::string quarter_label(Date d);

}  // namespace jumpkit
