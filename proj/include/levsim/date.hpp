#pragma once

#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace levsim {

// Calendar date, ISO 8601 text form yyyy-mm-dd. Ordering is chronological.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    static bool is_valid(int y, int m, int d) {
        if (m < 1 || m > 12 || d < 1) return false;
        static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        int dim = days[m - 1];
        if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) dim = 29;
        return d <= dim;
    }

    // Parses "yyyy-mm-dd"; throws std::invalid_argument on malformed input.
    static Date parse(std::string_view s) {
        auto digits = [&](size_t pos, size_t n) -> int {
            int v = 0;
            for (size_t i = pos; i < pos + n; ++i) {
                if (i >= s.size() || s[i] < '0' || s[i] > '9')
                    throw std::invalid_argument("bad date: " + std::string(s));
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        if (s.size() != 10 || s[4] != '-' || s[7] != '-')
            throw std::invalid_argument("bad date: " + std::string(s));
        Date d{digits(0, 4), digits(5, 2), digits(8, 2)};
        if (!is_valid(d.year, d.month, d.day))
            throw std::invalid_argument("bad date: " + std::string(s));
        return d;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    // Days since 1970-01-01 (Howard Hinnant's days_from_civil).
    long serial() const {
        long y = year - (month <= 2);
        long era = (y >= 0 ? y : y - 399) / 400;
        unsigned yoe = static_cast<unsigned>(y - era * 400);
        unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
        unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<long>(doe) - 719468;
    }

    static Date from_serial(long z) {
        z += 719468;
        long era = (z >= 0 ? z : z - 146096) / 146097;
        unsigned doe = static_cast<unsigned>(z - era * 146097);
        unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        long y = static_cast<long>(yoe) + era * 400;
        unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        unsigned mp = (5 * doy + 2) / 153;
        unsigned d = doy - (153 * mp + 2) / 5 + 1;
        unsigned m = mp + (mp < 10 ? 3 : -9);
        return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
    }

    // Monday..Friday.
    bool is_weekday() const {
        long wd = ((serial() % 7) + 11) % 7;  // 0 = Sunday
        return wd >= 1 && wd <= 5;
    }
};

}  // namespace levsim
