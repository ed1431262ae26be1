#pragma once

// Parsing, filtering and trading-day bucketing of GKG-style news metadata.

#include "emospread/date.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace emospread::ingest {

struct LocationMention {
	std::string country; // ISO-2 (or FIPS, whatever the feed uses)
	std::uint64_t mention_count = 0;

	bool operator==(const LocationMention &) const = default;
};

struct GkgRecord {
	std::string record_id;
	Timestamp published_at_utc{};
	std::string outlet;
	std::vector<std::string> themes;
	std::vector<LocationMention> locations; // unique countries, first-seen order
	std::map<std::string, std::uint64_t> gcam;
	std::uint64_t word_count = 0;
	bool word_count_missing = true;

	bool operator==(const GkgRecord &) const = default;
};

/// Column layout of a GKG-style TSV. Defaults follow the GKG 2.0 layout
/// (27 columns; V1 themes, V1 locations, GCAM).
struct GkgSchema {
	std::size_t column_count = 27;
	std::size_t record_id = 0;
	std::size_t date = 1;
	std::size_t source = 3;
	std::size_t themes = 7;
	std::size_t locations = 9;
	std::size_t gcam = 17;
	std::size_t location_country_subfield = 2;
	char separator = '\t';
	std::string word_count_key = "wc";

	void validate() const;
};

/// Splits `key:count` entries on the last colon; duplicate keys are summed.
std::map<std::string, std::uint64_t> parse_gcam(std::string_view blob);
std::string format_gcam(const std::map<std::string, std::uint64_t> &gcam);

GkgRecord parse_gkg_line(std::string_view line, const GkgSchema &schema);
/// Inverse of parse_gkg_line for records it produced; unused columns are empty.
std::string format_gkg_line(const GkgRecord &record, const GkgSchema &schema);

struct ParseIssue {
	std::size_t line_number = 0;
	std::string message;
};

struct GkgParseResult {
	std::vector<GkgRecord> records;
	std::size_t lines_read = 0;
	std::size_t malformed = 0;
	std::vector<ParseIssue> issues; // first few only
};

/// Parses every non-empty line. Bad lines are counted and skipped.
/// `threads` > 1 parses contiguous shards in parallel; output order is the input order.
GkgParseResult parse_gkg_lines(const std::vector<std::string> &lines, const GkgSchema &schema, unsigned threads = 1);
GkgParseResult read_gkg_stream(std::istream &in, const GkgSchema &schema, unsigned threads = 1);
GkgParseResult read_gkg_file(const std::string &path, const GkgSchema &schema, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Article selection

struct FocusMode {
	enum class Kind { Domestic, DomesticOrPaired };
	Kind kind = Kind::Domestic;
	std::string country_a;
	std::string country_b; // only for DomesticOrPaired

	static FocusMode domestic(std::string country) { return {Kind::Domestic, std::move(country), {}}; }
	static FocusMode paired(std::string a, std::string b) { return {Kind::DomesticOrPaired, std::move(a), std::move(b)}; }
	std::string label() const;
};

struct ArticleFilterConfig {
	std::uint64_t min_words = 100;
	std::vector<std::string> theme_prefixes;
	std::uint64_t min_theme_keywords = 4;
	FocusMode focus = FocusMode::domestic("IT");
	std::set<std::string> outlet_allowlist; // compared case-insensitively

	void validate() const;
};

/// Outlet names listed for the Italian ("IT") and Spanish ("ES") samples.
std::set<std::string> default_outlet_allowlist(std::string_view country);

struct TradingCalendar {
	int market_open_minutes = 9 * 60;
	int market_close_minutes = 17 * 60 + 30;
	int timezone_offset_hours = 1;
	std::set<Date> holidays;
	enum class WeekendRule { MapToMonday } weekend_rule = WeekendRule::MapToMonday;

	void validate() const;
	bool is_trading_day(Date d) const { return !is_weekend(d) && !holidays.count(d); }
	Date next_trading_day(Date d) const;
	/// Open-market days in [first, last].
	std::vector<Date> trading_days(Date first, Date last) const;
};

/// Country with strictly greatest mention count, or nullopt on a tie or no locations.
std::optional<std::string> infer_main_location(const GkgRecord &record);

bool passes_focus(const GkgRecord &record, const ArticleFilterConfig &cfg);
bool passes_theme_filter(const GkgRecord &record, const ArticleFilterConfig &cfg);
bool passes_outlet(const GkgRecord &record, const ArticleFilterConfig &cfg);
bool passes_length(const GkgRecord &record, const ArticleFilterConfig &cfg);

/// Trading date an article counts towards, or nullopt when it is omitted
/// (holiday, or weekend preceding a holiday Monday).
std::optional<Date> assign_trading_day(Timestamp published_at_utc, const TradingCalendar &cal);

struct SelectionCounts {
	std::size_t input = 0;
	std::size_t failed_length = 0;
	std::size_t failed_outlet = 0;
	std::size_t failed_theme = 0;
	std::size_t failed_focus = 0;
	std::size_t omitted = 0;
	std::size_t selected = 0;
};

struct ArticleSelection {
	std::map<Date, std::vector<GkgRecord>> buckets;
	SelectionCounts counts;

	std::map<Date, std::size_t> daily_counts() const;
};

ArticleSelection select_articles(const std::vector<GkgRecord> &records, const ArticleFilterConfig &cfg,
                                 const TradingCalendar &cal);

struct SourceGapWarning {
	Date date;
	std::size_t count = 0;
	double trailing_median = 0.0;
};

/// Flags trading days whose article count falls more than `drop_fraction`
/// below the median of the preceding `lookback` trading days.
std::vector<SourceGapWarning> detect_source_gaps(const std::vector<Date> &trading_days,
                                                 const std::map<Date, std::size_t> &daily_counts,
                                                 std::size_t lookback = 20, double drop_fraction = 0.5);

std::string format_daily_volume_csv(const std::vector<Date> &trading_days,
                                    const std::map<Date, std::size_t> &daily_counts);

} // namespace emospread::ingest
