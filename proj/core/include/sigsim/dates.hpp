#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sigsim {

// Calendar day stored as a serial day number (days since 1970-01-01).
// Proleptic Gregorian; conversions use the days-from-civil algorithm.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(int serial) : serial_(serial) {}

    static Date from_ymd(int year, int month, int day);
    static Date parse(std::string_view text); // "YYYY-MM-DD"

    int year() const;
    int month() const;
    int day() const;
    int weekday() const; // 0 = Sunday .. 6 = Saturday

    constexpr int serial() const { return serial_; }
    std::string to_string() const;

    Date plus_days(int n) const { return Date(serial_ + n); }

    auto operator<=>(const Date&) const = default;

private:
    int serial_ = 0;
};

// Minute-resolution timestamp, exchange-local, no zone arithmetic.
struct DateTime {
    Date date;
    int minute_of_day = 0; // 0..1439

    static DateTime parse(std::string_view text); // "YYYY-MM-DD HH:MM"
    std::string to_string() const;

    auto operator<=>(const DateTime&) const = default;
};

// Calendar quarter, e.g. 2023Q1.
struct Quarter {
    int year = 1970;
    int q = 1; // 1..4

    static Quarter of(Date d);
    static Quarter parse(std::string_view text); // "2023Q1" or "2023-Q1"

    Quarter next() const;
    Date first_day() const;
    Date last_day() const;
    std::string to_string() const;

    // Serial quarter index, makes quarter arithmetic trivial.
    int index() const { return year * 4 + (q - 1); }

    auto operator<=>(const Quarter&) const = default;
};

} // namespace sigsim
