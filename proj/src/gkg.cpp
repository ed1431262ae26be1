#include "emospread/gkg.hpp"

#include "emospread/error.hpp"
#include "emospread/parallel.hpp"
#include "emospread/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace emospread::ingest {

namespace {

constexpr std::size_t kMaxIssues = 20;

// GCAM mixes integer word counts with "v"-prefixed score dimensions (floats).
bool is_score_dimension(std::string_view key) { return !key.empty() && key.front() == 'v'; }

std::map<std::string, std::uint64_t> parse_gcam_impl(std::string_view blob, bool skip_scores) {
	std::map<std::string, std::uint64_t> out;
	blob = trim(blob);
	if (blob.empty())
		return out;
	for (auto entry : split(blob, ',')) {
		entry = trim(entry);
		if (entry.empty())
			continue;
		auto colon = entry.rfind(':');
		if (colon == std::string_view::npos)
			throw Error(ErrorCode::BadGcam, "entry without ':' in '" + std::string(entry) + "'");
		auto key = entry.substr(0, colon);
		if (key.empty())
			throw Error(ErrorCode::BadGcam, "empty key in '" + std::string(entry) + "'");
		if (skip_scores && is_score_dimension(key))
			continue;
		auto count = parse_uint(entry.substr(colon + 1));
		if (!count)
			throw Error(ErrorCode::BadGcam, "non-integer count in '" + std::string(entry) + "'");
		out[std::string(key)] += *count;
	}
	return out;
}

std::string join(const std::vector<std::string> &items, char sep) {
	std::string out;
	for (std::size_t i = 0; i < items.size(); ++i) {
		if (i)
			out.push_back(sep);
		out += items[i];
	}
	return out;
}

std::set<std::string> lowered(const std::set<std::string> &items) {
	std::set<std::string> out;
	for (const auto &s : items)
		out.insert(to_lower(trim(s)));
	return out;
}

bool outlet_in(const GkgRecord &record, const std::set<std::string> &lowered_allowlist) {
	return lowered_allowlist.count(to_lower(trim(record.outlet))) > 0;
}

std::uint64_t max_mentions(const GkgRecord &record) {
	std::uint64_t best = 0;
	for (const auto &loc : record.locations)
		best = std::max(best, loc.mention_count);
	return best;
}

} // namespace

void GkgSchema::validate() const {
	const std::size_t cols[] = {record_id, date, source, themes, locations, gcam};
	for (auto c : cols)
		if (c >= column_count)
			throw Error(ErrorCode::InvalidConfig, "GKG schema column index " + std::to_string(c) +
			                                          " outside column_count " + std::to_string(column_count));
	std::set<std::size_t> unique(std::begin(cols), std::end(cols));
	if (unique.size() != std::size(cols))
		throw Error(ErrorCode::InvalidConfig, "GKG schema maps two logical fields to one column");
	if (word_count_key.empty())
		throw Error(ErrorCode::InvalidConfig, "GKG schema word_count_key is empty");
}

std::map<std::string, std::uint64_t> parse_gcam(std::string_view blob) { return parse_gcam_impl(blob, false); }

std::string format_gcam(const std::map<std::string, std::uint64_t> &gcam) {
	std::string out;
	for (const auto &[key, count] : gcam) {
		if (!out.empty())
			out.push_back(',');
		out += key;
		out.push_back(':');
		out += std::to_string(count);
	}
	return out;
}

GkgRecord parse_gkg_line(std::string_view line, const GkgSchema &schema) {
	while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
		line.remove_suffix(1);
	auto fields = split(line, schema.separator);
	if (fields.size() != schema.column_count)
		throw Error(ErrorCode::MalformedLine, "expected " + std::to_string(schema.column_count) + " columns, got " +
		                                          std::to_string(fields.size()));

	GkgRecord rec;
	rec.record_id = std::string(trim(fields[schema.record_id]));

	auto ts = parse_compact_timestamp(trim(fields[schema.date]));
	if (!ts)
		throw Error(ErrorCode::BadTimestamp, "bad date field '" + std::string(fields[schema.date]) + "'");
	rec.published_at_utc = *ts;

	rec.outlet = std::string(trim(fields[schema.source]));

	for (auto theme : split(fields[schema.themes], ';')) {
		// V2 themes carry a ",offset" suffix
		auto comma = theme.find(',');
		if (comma != std::string_view::npos)
			theme = theme.substr(0, comma);
		theme = trim(theme);
		if (!theme.empty())
			rec.themes.emplace_back(theme);
	}

	for (auto block : split(fields[schema.locations], ';')) {
		if (trim(block).empty())
			continue;
		auto sub = split(block, '#');
		if (schema.location_country_subfield >= sub.size())
			continue;
		auto country = trim(sub[schema.location_country_subfield]);
		if (country.empty())
			continue;
		auto it = std::find_if(rec.locations.begin(), rec.locations.end(),
		                       [&](const LocationMention &m) { return m.country == country; });
		if (it == rec.locations.end())
			rec.locations.push_back({std::string(country), 1});
		else
			++it->mention_count;
	}

	rec.gcam = parse_gcam_impl(fields[schema.gcam], true);
	if (auto it = rec.gcam.find(schema.word_count_key); it != rec.gcam.end()) {
		rec.word_count = it->second;
		rec.word_count_missing = false;
	}
	return rec;
}

std::string format_gkg_line(const GkgRecord &record, const GkgSchema &schema) {
	std::vector<std::string> cols(schema.column_count);
	cols[schema.record_id] = record.record_id;
	cols[schema.date] = format_compact_timestamp(record.published_at_utc);
	cols[schema.source] = record.outlet;
	cols[schema.themes] = join(record.themes, ';');

	std::vector<std::string> blocks;
	const std::size_t width = std::max<std::size_t>(schema.location_country_subfield + 1, 3);
	for (const auto &loc : record.locations) {
		std::vector<std::string> sub(width);
		if (schema.location_country_subfield != 0)
			sub[0] = "1";
		sub[schema.location_country_subfield] = loc.country;
		auto block = join(sub, '#');
		for (std::uint64_t k = 0; k < loc.mention_count; ++k)
			blocks.push_back(block);
	}
	cols[schema.locations] = join(blocks, ';');
	cols[schema.gcam] = format_gcam(record.gcam);
	return join(cols, schema.separator);
}

GkgParseResult parse_gkg_lines(const std::vector<std::string> &lines, const GkgSchema &schema, unsigned threads) {
	schema.validate();
	struct Shard {
		std::vector<GkgRecord> records;
		std::vector<ParseIssue> issues;
		std::size_t malformed = 0;
		std::size_t lines = 0;
	};
	threads = std::max(1u, threads);
	const std::size_t shard_size = (lines.size() + threads - 1) / threads;
	std::vector<Shard> shards(threads);
	parallel_for(threads, threads, [&](std::size_t s) {
		const std::size_t begin = s * shard_size;
		const std::size_t end = std::min(lines.size(), begin + shard_size);
		for (std::size_t i = begin; i < end; ++i) {
			if (trim(lines[i]).empty())
				continue;
			++shards[s].lines;
			try {
				shards[s].records.push_back(parse_gkg_line(lines[i], schema));
			} catch (const Error &e) {
				++shards[s].malformed;
				if (shards[s].issues.size() < kMaxIssues)
					shards[s].issues.push_back({i + 1, e.what()});
			}
		}
	});

	GkgParseResult result;
	for (auto &shard : shards) {
		result.lines_read += shard.lines;
		result.malformed += shard.malformed;
		for (auto &r : shard.records)
			result.records.push_back(std::move(r));
		for (auto &issue : shard.issues)
			if (result.issues.size() < kMaxIssues)
				result.issues.push_back(std::move(issue));
	}
	return result;
}

GkgParseResult read_gkg_stream(std::istream &in, const GkgSchema &schema, unsigned threads) {
	std::vector<std::string> lines;
	std::string line;
	while (std::getline(in, line))
		lines.push_back(std::move(line));
	return parse_gkg_lines(lines, schema, threads);
}

GkgParseResult read_gkg_file(const std::string &path, const GkgSchema &schema, unsigned threads) {
	std::ifstream in(path);
	if (!in)
		throw Error(ErrorCode::IoError, "cannot open GKG file " + path);
	return read_gkg_stream(in, schema, threads);
}

// ---------------------------------------------------------------------------

std::string FocusMode::label() const {
	if (kind == Kind::Domestic)
		return "domestic_" + country_a;
	return "paired_" + country_a + "_" + country_b;
}

void ArticleFilterConfig::validate() const {
	if (min_words < 1)
		throw Error(ErrorCode::InvalidConfig, "min_words must be >= 1");
	if (min_theme_keywords < 1)
		throw Error(ErrorCode::InvalidConfig, "min_theme_keywords must be >= 1");
	if (outlet_allowlist.empty())
		throw Error(ErrorCode::InvalidConfig, "outlet allowlist is empty");
	if (focus.country_a.empty())
		throw Error(ErrorCode::InvalidConfig, "focus country is empty");
	if (focus.kind == FocusMode::Kind::DomesticOrPaired &&
	    (focus.country_b.empty() || focus.country_b == focus.country_a))
		throw Error(ErrorCode::InvalidConfig, "paired focus needs two distinct countries");
}

std::set<std::string> default_outlet_allowlist(std::string_view country) {
	if (country == "IT")
		return {"Il Sole 24 Ore",      "Borsa Italiana",       "Italia Oggi",     "Milano Finanza",
		        "Ansa",                "il Giornale",          "Finanza",         "Wall Street Italia",
		        "la Repubblica",       "Investire Oggi",       "Libero Quotidiano", "il Messaggero Economia",
		        "il Fatto Quotidiano", "il Corriere della Sera", "La Stampa Finanza", "Huffington Post Italy",
		        "La Stampa",           "trend-online.com",     "teleborsa",       "tradelink",
		        "il Tempo",            "finanza on-line",      "il Sussidiario"};
	if (country == "ES")
		return {"ABC",        "El Mundo",       "El Pais",         "El Economista",      "Cincodias",
		        "Expansion",  "Libre mercado",  "Finanzas",        "Economia Finanzas",  "Bolsa",
		        "Info Bolsa", "El Comercio",    "El dia",          "El progreso",        "El confidencial",
		        "El Confidencial Digital", "Huffington Post Spain", "La razon", "Negocios", "El Diario"};
	return {};
}

void TradingCalendar::validate() const {
	if (market_open_minutes < 0 || market_close_minutes > 24 * 60 || market_open_minutes >= market_close_minutes)
		throw Error(ErrorCode::InvalidConfig, "market_open must precede market_close");
	for (auto d : holidays)
		if (is_weekend(d))
			throw Error(ErrorCode::InvalidConfig, "holiday " + format_date(d) + " falls on a weekend");
	if (timezone_offset_hours < -14 || timezone_offset_hours > 14)
		throw Error(ErrorCode::InvalidConfig, "timezone offset out of range");
}

Date TradingCalendar::next_trading_day(Date d) const {
	do {
		d += std::chrono::days{1};
	} while (!is_trading_day(d));
	return d;
}

std::vector<Date> TradingCalendar::trading_days(Date first, Date last) const {
	std::vector<Date> out;
	for (Date d = first; d <= last; d += std::chrono::days{1})
		if (is_trading_day(d))
			out.push_back(d);
	return out;
}

std::optional<std::string> infer_main_location(const GkgRecord &record) {
	const LocationMention *best = nullptr;
	bool tie = false;
	for (const auto &loc : record.locations) {
		if (!best || loc.mention_count > best->mention_count) {
			best = &loc;
			tie = false;
		} else if (loc.mention_count == best->mention_count) {
			tie = true;
		}
	}
	if (!best || tie)
		return std::nullopt;
	return best->country;
}

bool passes_focus(const GkgRecord &record, const ArticleFilterConfig &cfg) {
	const auto &focus = cfg.focus;
	auto main = infer_main_location(record);
	if (focus.kind == FocusMode::Kind::Domestic)
		return main && *main == focus.country_a;
	if (main)
		return *main == focus.country_a || *main == focus.country_b;
	const auto top = max_mentions(record);
	if (top == 0)
		return false;
	std::set<std::string> leaders;
	for (const auto &loc : record.locations)
		if (loc.mention_count == top)
			leaders.insert(loc.country);
	return leaders == std::set<std::string>{focus.country_a, focus.country_b};
}

bool passes_theme_filter(const GkgRecord &record, const ArticleFilterConfig &cfg) {
	std::uint64_t hits = 0;
	for (const auto &theme : record.themes)
		for (const auto &prefix : cfg.theme_prefixes)
			if (theme.rfind(prefix, 0) == 0) {
				++hits;
				break;
			}
	return hits >= cfg.min_theme_keywords;
}

bool passes_outlet(const GkgRecord &record, const ArticleFilterConfig &cfg) {
	return outlet_in(record, lowered(cfg.outlet_allowlist));
}

bool passes_length(const GkgRecord &record, const ArticleFilterConfig &cfg) {
	return !record.word_count_missing && record.word_count >= cfg.min_words;
}

std::optional<Date> assign_trading_day(Timestamp published_at_utc, const TradingCalendar &cal) {
	const auto local = published_at_utc + std::chrono::hours{cal.timezone_offset_hours};
	const Date day = std::chrono::floor<std::chrono::days>(local);
	const auto seconds = (local - Timestamp{day}).count();

	if (is_weekend(day)) {
		Date monday = day;
		while (std::chrono::weekday{monday} != std::chrono::Monday)
			monday += std::chrono::days{1};
		if (cal.holidays.count(monday))
			return std::nullopt;
		return monday;
	}
	if (cal.holidays.count(day))
		return std::nullopt;
	if (seconds > static_cast<long long>(cal.market_close_minutes) * 60)
		return cal.next_trading_day(day);
	// Before the open the next session is today's.
	return day;
}

std::map<Date, std::size_t> ArticleSelection::daily_counts() const {
	std::map<Date, std::size_t> out;
	for (const auto &[day, items] : buckets)
		out[day] = items.size();
	return out;
}

ArticleSelection select_articles(const std::vector<GkgRecord> &records, const ArticleFilterConfig &cfg,
                                 const TradingCalendar &cal) {
	cfg.validate();
	cal.validate();
	const auto allow = lowered(cfg.outlet_allowlist);

	ArticleSelection out;
	out.counts.input = records.size();
	for (const auto &rec : records) {
		if (!passes_length(rec, cfg)) {
			++out.counts.failed_length;
			continue;
		}
		if (!outlet_in(rec, allow)) {
			++out.counts.failed_outlet;
			continue;
		}
		if (!passes_theme_filter(rec, cfg)) {
			++out.counts.failed_theme;
			continue;
		}
		if (!passes_focus(rec, cfg)) {
			++out.counts.failed_focus;
			continue;
		}
		auto day = assign_trading_day(rec.published_at_utc, cal);
		if (!day) {
			++out.counts.omitted;
			continue;
		}
		out.buckets[*day].push_back(rec);
		++out.counts.selected;
	}
	return out;
}

std::vector<SourceGapWarning> detect_source_gaps(const std::vector<Date> &trading_days,
                                                 const std::map<Date, std::size_t> &daily_counts,
                                                 std::size_t lookback, double drop_fraction) {
	std::vector<SourceGapWarning> out;
	if (lookback == 0)
		return out;
	std::vector<double> counts;
	counts.reserve(trading_days.size());
	for (auto d : trading_days) {
		auto it = daily_counts.find(d);
		counts.push_back(it == daily_counts.end() ? 0.0 : static_cast<double>(it->second));
	}
	std::vector<double> window(lookback);
	for (std::size_t i = lookback; i < counts.size(); ++i) {
		std::copy(counts.begin() + static_cast<std::ptrdiff_t>(i - lookback),
		          counts.begin() + static_cast<std::ptrdiff_t>(i), window.begin());
		std::sort(window.begin(), window.end());
		const double median = lookback % 2 ? window[lookback / 2]
		                                   : 0.5 * (window[lookback / 2 - 1] + window[lookback / 2]);
		if (median > 0 && counts[i] < (1.0 - drop_fraction) * median)
			out.push_back({trading_days[i], static_cast<std::size_t>(counts[i]), median});
	}
	return out;
}

std::string format_daily_volume_csv(const std::vector<Date> &trading_days,
                                    const std::map<Date, std::size_t> &daily_counts) {
	std::ostringstream out;
	out << "date,count\n";
	for (auto d : trading_days) {
		auto it = daily_counts.find(d);
		out << format_date(d) << ',' << (it == daily_counts.end() ? 0 : it->second) << '\n';
	}
	return out.str();
}

} // namespace emospread::ingest
