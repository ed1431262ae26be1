#include "emospread/emotion.hpp"

#include "emospread/error.hpp"
#include "emospread/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace emospread::emotions {

void LexiconMap::validate() const {
	if (name.empty())
		throw Error(ErrorCode::InvalidConfig, "lexicon without a name");
	if (gcam_keys.empty() && raw_words.empty())
		throw Error(ErrorCode::InvalidConfig, "lexicon '" + name + "' has neither GCAM keys nor words");
}

const LexiconMap &LexiconConfig::find(std::string_view name) const {
	for (const auto &lex : lexicons)
		if (lex.name == name)
			return lex;
	throw Error(ErrorCode::InvalidConfig, "no lexicon named '" + std::string(name) + "'");
}

void LexiconConfig::validate() const {
	std::set<std::string> seen;
	for (const auto &lex : lexicons) {
		lex.validate();
		if (!seen.insert(lex.name).second)
			throw Error(ErrorCode::InvalidConfig, "duplicate lexicon name '" + lex.name + "'");
	}
}

LexiconConfig parse_lexicon_map(std::string_view json_text, const std::string &base_dir) {
	nlohmann::json doc;
	try {
		doc = nlohmann::json::parse(json_text);
	} catch (const nlohmann::json::exception &e) {
		throw Error(ErrorCode::InvalidConfig, std::string("lexicon map is not valid JSON: ") + e.what());
	}
	if (!doc.contains("lexicons") || !doc["lexicons"].is_array())
		throw Error(ErrorCode::InvalidConfig, "lexicon map needs a 'lexicons' array");

	LexiconConfig out;
	for (const auto &item : doc["lexicons"]) {
		LexiconMap lex;
		lex.name = item.value("name", "");
		for (const auto &key : item.value("gcam_keys", std::vector<std::string>{}))
			lex.gcam_keys.insert(key);
		for (const auto &word : item.value("words", std::vector<std::string>{}))
			lex.raw_words.insert(to_lower(trim(word)));
		if (item.contains("word_list")) {
			std::filesystem::path p = item["word_list"].get<std::string>();
			if (p.is_relative())
				p = std::filesystem::path(base_dir) / p;
			std::istringstream in(read_file(p.string()));
			std::string word;
			while (std::getline(in, word)) {
				auto w = trim(word);
				if (!w.empty() && w.front() != '#')
					lex.raw_words.insert(to_lower(w));
			}
		}
		out.lexicons.push_back(std::move(lex));
	}
	out.validate();
	return out;
}

LexiconConfig load_lexicon_map(const std::string &path) {
	if (!std::filesystem::exists(path))
		throw Error(ErrorCode::InvalidConfig, "lexicon map not found: " + path);
	auto base = std::filesystem::path(path).parent_path().string();
	return parse_lexicon_map(read_file(path), base.empty() ? "." : base);
}

std::uint64_t count_lexicon_words(std::string_view text, const std::set<std::string> &words) {
	std::uint64_t hits = 0;
	std::string token;
	auto flush = [&] {
		if (!token.empty() && words.count(token))
			++hits;
		token.clear();
	};
	for (char c : text) {
		if (std::isalpha(static_cast<unsigned char>(c)) || c == '\'' || c == '-')
			token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
		else
			flush();
	}
	flush();
	return hits;
}

DailySentimentRow daily_emotion_share(const std::vector<ingest::GkgRecord> &bundle, const LexiconMap &lex, Date date) {
	if (bundle.empty())
		throw Error(ErrorCode::EmptyDay, "no articles on " + format_date(date));
	DailySentimentRow row;
	row.date = date;
	for (const auto &rec : bundle) {
		for (const auto &key : lex.gcam_keys)
			if (auto it = rec.gcam.find(key); it != rec.gcam.end())
				row.wc_emotion += it->second;
		row.wc_total += rec.word_count;
	}
	if (row.wc_total == 0)
		throw Error(ErrorCode::ZeroDenominator, "zero total word count on " + format_date(date));
	return row;
}

OptionalSeries smooth(const OptionalSeries &shares, std::size_t window, bool carry_forward) {
	if (window == 0)
		throw Error(ErrorCode::InvalidArgument, "smoothing window must be >= 1");
	if (shares.size() < window)
		throw Error(ErrorCode::WindowTooLong, "series of length " + std::to_string(shares.size()) +
		                                          " shorter than window " + std::to_string(window));
	OptionalSeries out(shares.size());
	if (!carry_forward) {
		for (std::size_t t = window - 1; t < shares.size(); ++t) {
			double sum = 0.0;
			bool complete = true;
			for (std::size_t s = t + 1 - window; s <= t; ++s) {
				if (!shares[s]) {
					complete = false;
					break;
				}
				sum += *shares[s];
			}
			if (complete)
				out[t] = sum / static_cast<double>(window);
		}
		return out;
	}
	std::vector<std::size_t> available;
	for (std::size_t t = 0; t < shares.size(); ++t) {
		if (shares[t])
			available.push_back(t);
		if (available.size() < window)
			continue;
		double sum = 0.0;
		for (std::size_t k = available.size() - window; k < available.size(); ++k)
			sum += *shares[available[k]];
		out[t] = sum / static_cast<double>(window);
	}
	return out;
}

std::string_view to_string(ScaleScope scope) {
	return scope == ScaleScope::FullSample ? "full_sample" : "estimation_window";
}

ScaleScope parse_scale_scope(std::string_view text) {
	if (text == "full_sample")
		return ScaleScope::FullSample;
	if (text == "estimation_window")
		return ScaleScope::EstimationWindow;
	throw Error(ErrorCode::InvalidConfig, "unknown scale scope '" + std::string(text) + "'");
}

Standardized standardize(const OptionalSeries &series, ScaleScope scope,
                         std::optional<std::pair<std::size_t, std::size_t>> window) {
	std::size_t first = 0;
	std::size_t last = series.size();
	if (scope == ScaleScope::EstimationWindow) {
		if (!window)
			throw Error(ErrorCode::InvalidArgument, "estimation-window scaling needs window bounds");
		first = window->first;
		last = std::min(window->second, series.size());
	}
	std::vector<double> region;
	for (std::size_t i = first; i < last; ++i)
		if (series[i])
			region.push_back(*series[i]);
	if (region.size() < 2)
		throw Error(ErrorCode::DegenerateSeries, "fewer than two values in the scaling region");
	double mean = 0.0;
	for (double v : region)
		mean += v;
	mean /= static_cast<double>(region.size());
	double ss = 0.0;
	for (double v : region)
		ss += (v - mean) * (v - mean);
	const double sd = std::sqrt(ss / static_cast<double>(region.size() - 1));
	if (!(sd > 0.0))
		throw Error(ErrorCode::DegenerateSeries, "zero variance in the scaling region");

	Standardized out;
	out.scale = sd;
	out.values.resize(series.size());
	for (std::size_t i = 0; i < series.size(); ++i)
		if (series[i])
			out.values[i] = *series[i] / sd;
	return out;
}

std::optional<double> EmotionSeries::value_at(Date d) const {
	auto it = std::lower_bound(dates.begin(), dates.end(), d);
	if (it == dates.end() || *it != d)
		return std::nullopt;
	return standardized[static_cast<std::size_t>(it - dates.begin())];
}

void recompute(EmotionSeries &series, const EmotionSeriesConfig &cfg) {
	series.window_w = cfg.window;
	series.scale_scope = cfg.scope;
	series.smoothed = smooth(series.raw_share, cfg.window, cfg.carry_forward);

	std::optional<std::pair<std::size_t, std::size_t>> bounds;
	if (cfg.scope == ScaleScope::EstimationWindow) {
		if (!cfg.estimation_window)
			throw Error(ErrorCode::InvalidConfig, "estimation-window scaling without an estimation window");
		auto lo = std::lower_bound(series.dates.begin(), series.dates.end(), cfg.estimation_window->first);
		auto hi = std::upper_bound(series.dates.begin(), series.dates.end(), cfg.estimation_window->second);
		bounds = std::make_pair(static_cast<std::size_t>(lo - series.dates.begin()),
		                        static_cast<std::size_t>(hi - series.dates.begin()));
	}
	auto st = standardize(series.smoothed, cfg.scope, bounds);
	series.standardized = std::move(st.values);
	series.scale = st.scale;
}

EmotionSeries build_emotion_series(const std::map<Date, std::vector<ingest::GkgRecord>> &bundles,
                                   const std::vector<Date> &trading_days, const LexiconMap &lex,
                                   const EmotionSeriesConfig &cfg, std::string country, std::string focus) {
	lex.validate();
	if (!std::is_sorted(trading_days.begin(), trading_days.end()))
		throw Error(ErrorCode::InvalidArgument, "trading days must be sorted");
	EmotionSeries series;
	series.emotion_name = lex.name;
	series.country = std::move(country);
	series.focus = std::move(focus);
	series.dates = trading_days;
	series.raw_share.resize(trading_days.size());
	series.wc_emotion.assign(trading_days.size(), 0);
	series.wc_total.assign(trading_days.size(), 0);
	for (std::size_t i = 0; i < trading_days.size(); ++i) {
		auto it = bundles.find(trading_days[i]);
		if (it == bundles.end() || it->second.empty())
			continue;
		try {
			auto row = daily_emotion_share(it->second, lex, trading_days[i]);
			series.wc_emotion[i] = row.wc_emotion;
			series.wc_total[i] = row.wc_total;
			series.raw_share[i] = row.share();
		} catch (const Error &e) {
			if (e.code() != ErrorCode::ZeroDenominator)
				throw;
		}
	}
	recompute(series, cfg);
	return series;
}

namespace {

void put(std::ostringstream &out, const std::optional<double> &v) {
	if (v)
		out << format_double(*v);
}

} // namespace

std::string format_emotion_csv(const EmotionSeries &series) {
	std::ostringstream out;
	out << "date,raw_share,smoothed,standardized\n";
	for (std::size_t i = 0; i < series.dates.size(); ++i) {
		out << format_date(series.dates[i]) << ',';
		put(out, series.raw_share[i]);
		out << ',';
		put(out, series.smoothed[i]);
		out << ',';
		put(out, series.standardized[i]);
		out << '\n';
	}
	return out.str();
}

EmotionSeries parse_emotion_csv(std::string_view csv_text, std::string name) {
	EmotionSeries series;
	series.emotion_name = std::move(name);
	std::istringstream in{std::string(csv_text)};
	std::string line;
	if (!std::getline(in, line))
		throw Error(ErrorCode::EmptyFile, "emotion CSV without header");
	std::size_t line_no = 1;
	auto opt = [&](std::string_view field) -> std::optional<double> {
		if (trim(field).empty())
			return std::nullopt;
		auto v = parse_double(field);
		if (!v)
			throw Error(ErrorCode::BadRow, "bad number on line " + std::to_string(line_no));
		return v;
	};
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		auto f = split(trim(line), ',');
		if (f.size() != 4)
			throw Error(ErrorCode::BadRow, "expected 4 fields on line " + std::to_string(line_no));
		auto d = parse_iso_date(trim(f[0]));
		if (!d)
			throw Error(ErrorCode::BadRow, "bad date on line " + std::to_string(line_no));
		if (!series.dates.empty() && *d <= series.dates.back())
			throw Error(ErrorCode::BadRow, "dates not strictly increasing at line " + std::to_string(line_no));
		series.dates.push_back(*d);
		series.raw_share.push_back(opt(f[1]));
		series.smoothed.push_back(opt(f[2]));
		series.standardized.push_back(opt(f[3]));
	}
	series.wc_emotion.assign(series.dates.size(), 0);
	series.wc_total.assign(series.dates.size(), 0);
	return series;
}

} // namespace emospread::emotions
