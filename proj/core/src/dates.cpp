#include "sigsim/dates.hpp"

#include "sigsim/errors.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace sigsim {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y_out, unsigned& m_out, unsigned& d_out) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    y_out = static_cast<int>(y + (m <= 2));
    m_out = m;
    d_out = d;
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[static_cast<size_t>(m - 1)];
}

int parse_int_field(std::string_view text, size_t pos, size_t len, const char* what) {
    if (pos + len > text.size()) throw InputError(std::string("truncated ") + what + ": '" + std::string(text) + "'");
    int value = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        throw InputError(std::string("bad ") + what + " in '" + std::string(text) + "'");
    return value;
}

} // namespace

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        throw InputError("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                         std::to_string(day));
    return Date(static_cast<int>(days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day))));
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw InputError("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    const int y = parse_int_field(text, 0, 4, "year");
    const int m = parse_int_field(text, 5, 2, "month");
    const int d = parse_int_field(text, 8, 2, "day");
    return from_ymd(y, m, d);
}

int Date::year() const {
    int y;
    unsigned m, d;
    civil_from_days(serial_, y, m, d);
    return y;
}

int Date::month() const {
    int y;
    unsigned m, d;
    civil_from_days(serial_, y, m, d);
    return static_cast<int>(m);
}

int Date::day() const {
    int y;
    unsigned m, d;
    civil_from_days(serial_, y, m, d);
    return static_cast<int>(d);
}

int Date::weekday() const {
    // 1970-01-01 was a Thursday (=4).
    int w = (serial_ + 4) % 7;
    return w < 0 ? w + 7 : w;
}

std::string Date::to_string() const {
    int y;
    unsigned m, d;
    civil_from_days(serial_, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

DateTime DateTime::parse(std::string_view text) {
    if (text.size() != 16 || text[10] != ' ' || text[13] != ':')
        throw InputError("expected YYYY-MM-DD HH:MM, got '" + std::string(text) + "'");
    DateTime dt;
    dt.date = Date::parse(text.substr(0, 10));
    const int hh = parse_int_field(text, 11, 2, "hour");
    const int mm = parse_int_field(text, 14, 2, "minute");
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59)
        throw InputError("time of day out of range in '" + std::string(text) + "'");
    dt.minute_of_day = hh * 60 + mm;
    return dt;
}

std::string DateTime::to_string() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s %02d:%02d", date.to_string().c_str(), minute_of_day / 60, minute_of_day % 60);
    return buf;
}

Quarter Quarter::of(Date d) {
    return Quarter{d.year(), (d.month() - 1) / 3 + 1};
}

Quarter Quarter::parse(std::string_view text) {
    // "2023Q1" or "2023-Q1"
    size_t qpos = text.find('Q');
    if (qpos == std::string_view::npos) qpos = text.find('q');
    if (qpos == std::string_view::npos || qpos + 2 != text.size())
        throw InputError("expected YYYYQn, got '" + std::string(text) + "'");
    std::string_view ypart = text.substr(0, qpos);
    if (!ypart.empty() && ypart.back() == '-') ypart.remove_suffix(1);
    const int y = parse_int_field(ypart, 0, ypart.size(), "year");
    const int q = parse_int_field(text, qpos + 1, 1, "quarter");
    if (q < 1 || q > 4) throw InputError("quarter out of range in '" + std::string(text) + "'");
    return Quarter{y, q};
}

Quarter Quarter::next() const {
    return q == 4 ? Quarter{year + 1, 1} : Quarter{year, q + 1};
}

Date Quarter::first_day() const {
    return Date::from_ymd(year, 3 * (q - 1) + 1, 1);
}

Date Quarter::last_day() const {
    const int m = 3 * q;
    return Date::from_ymd(year, m, days_in_month(year, m));
}

std::string Quarter::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04dQ%d", year, q);
    return buf;
}

} // namespace sigsim
