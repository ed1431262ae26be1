#include "emospread/date.hpp"

#include <charconv>
#include <cstdio>

namespace emospread {

namespace {

std::optional<int> parse_digits(std::string_view text) {
	if (text.empty())
		return std::nullopt;
	int value = 0;
	for (char c : text) {
		if (c < '0' || c > '9')
			return std::nullopt;
		value = value * 10 + (c - '0');
	}
	return value;
}

std::optional<Date> checked_date(int y, int m, int d) {
	if (m < 1 || m > 12 || d < 1 || d > 31)
		return std::nullopt;
	std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
	                                std::chrono::day{static_cast<unsigned>(d)}};
	if (!ymd.ok())
		return std::nullopt;
	return Date{ymd};
}

} // namespace

Date make_date(int year, unsigned month, unsigned day) {
	return Date{std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}};
}

std::optional<Date> parse_iso_date(std::string_view text) {
	if (text.size() != 10 || text[4] != '-' || text[7] != '-')
		return std::nullopt;
	auto y = parse_digits(text.substr(0, 4));
	auto m = parse_digits(text.substr(5, 2));
	auto d = parse_digits(text.substr(8, 2));
	if (!y || !m || !d)
		return std::nullopt;
	return checked_date(*y, *m, *d);
}

std::string format_date(Date d) {
	std::chrono::year_month_day ymd{d};
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
	              static_cast<unsigned>(ymd.day()));
	return buf;
}

std::optional<Timestamp> parse_compact_timestamp(std::string_view text) {
	if (text.size() != 14)
		return std::nullopt;
	auto y = parse_digits(text.substr(0, 4));
	auto mo = parse_digits(text.substr(4, 2));
	auto d = parse_digits(text.substr(6, 2));
	auto h = parse_digits(text.substr(8, 2));
	auto mi = parse_digits(text.substr(10, 2));
	auto s = parse_digits(text.substr(12, 2));
	if (!y || !mo || !d || !h || !mi || !s)
		return std::nullopt;
	if (*h > 23 || *mi > 59 || *s > 59)
		return std::nullopt;
	auto date = checked_date(*y, *mo, *d);
	if (!date)
		return std::nullopt;
	return Timestamp{*date} + std::chrono::hours{*h} + std::chrono::minutes{*mi} + std::chrono::seconds{*s};
}

std::string format_compact_timestamp(Timestamp ts) {
	auto day = std::chrono::floor<std::chrono::days>(ts);
	std::chrono::year_month_day ymd{day};
	std::chrono::hh_mm_ss tod{ts - day};
	char buf[32];
	std::snprintf(buf, sizeof buf, "%04d%02u%02u%02ld%02ld%02ld", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
	              static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
	              static_cast<long>(tod.seconds().count()));
	return buf;
}

std::optional<int> parse_clock_minutes(std::string_view text) {
	if (text.size() != 5 || text[2] != ':')
		return std::nullopt;
	auto h = parse_digits(text.substr(0, 2));
	auto m = parse_digits(text.substr(3, 2));
	if (!h || !m || *h > 23 || *m > 59)
		return std::nullopt;
	return *h * 60 + *m;
}

std::string format_clock_minutes(int minutes) {
	char buf[16];
	std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
	return buf;
}

int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }

bool is_weekend(Date d) {
	std::chrono::weekday wd{d};
	return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

} // namespace emospread
