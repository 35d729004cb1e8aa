#include "jumpkit/core.hpp"

#include <charconv>
#include <cstdio>

namespace jumpkit {

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date parse_date(std::string_view text) {
    auto field = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        const char* first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, v);
        if (ec != std::errc{} || ptr != first + len) {
            throw DataError("invalid date: " + std::string(text));
        }
        return v;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw DataError("invalid date: " + std::string(text));
    }
    const std::chrono::year_month_day ymd{std::chrono::year{field(0, 4)},
                                          std::chrono::month{static_cast<unsigned>(field(5, 2))},
                                          std::chrono::day{static_cast<unsigned>(field(8, 2))}};
    if (!ymd.ok()) throw DataError("invalid date: " + std::string(text));
    return Date{ymd};
}

std::string format_instant(Instant t) {
    const Date d = day_of(t);
    const auto since = t - day_start(d);
    const auto us = since.count();
    const long long secs = us / 1'000'000;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lld.%06lldZ", format_date(d).c_str(),
                  secs / 3600, (secs / 60) % 60, secs % 60,
                  static_cast<long long>(us % 1'000'000));
    return buf;
}

std::string quarter_label(Date d) {
    const std::chrono::year_month_day ymd{d};
    const unsigned q = (static_cast<unsigned>(ymd.month()) - 1) / 3 + 1;
    return std::to_string(static_cast<int>(ymd.year())) + "Q" + std::to_string(q);
}

}  // namespace jumpkit
