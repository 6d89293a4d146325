#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace voltide {

/// A UTC calendar day, stored as days since 1970-01-01.
class Date {
public:
    Date() = default;
    explicit constexpr Date(std::int64_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, int month, int day);

    /// Parses "YYYY-MM-DD". Throws DataError on malformed input or invalid calendar day.
    static Date parse(std::string_view iso);

    [[nodiscard]] std::int64_t days_since_epoch() const { return days_; }
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] int year() const;
    [[nodiscard]] int month() const;
    [[nodiscard]] int day() const;

    Date operator+(std::int64_t days) const { return Date(days_ + days); }
    Date operator-(std::int64_t days) const { return Date(days_ - days); }
    std::int64_t operator-(Date other) const { return days_ - other.days_; }
    Date& operator++() { ++days_; return *this; }

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t days_ = 0;
};

}  // namespace voltide
