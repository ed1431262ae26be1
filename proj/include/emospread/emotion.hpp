#pragma once

// Daily emotion shares, moving-average smoothing and unit-variance rescaling.

#include "emospread/date.hpp"
#include "emospread/gkg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emospread::emotions {

using OptionalSeries = std::vector<std::optional<double>>;

/// Which GCAM dimensions (or raw words) measure one emotion.
struct LexiconMap {
	std::string name;
	std::set<std::string> gcam_keys;
	std::set<std::string> raw_words; // lowercase

	void validate() const;
};

struct LexiconConfig {
	std::vector<LexiconMap> lexicons;

	const LexiconMap &find(std::string_view name) const;
	void validate() const;
};

/// Reads a JSON lexicon map:
/// `{"lexicons": [{"name": "Distress", "gcam_keys": [...], "word_list": "path"}]}`.
/// Relative word-list paths resolve against the lexicon file's directory.
LexiconConfig load_lexicon_map(const std::string &path);
LexiconConfig parse_lexicon_map(std::string_view json_text, const std::string &base_dir = ".");

/// Counts lexicon terms in free text (lowercased alphabetic tokens).
std::uint64_t count_lexicon_words(std::string_view text, const std::set<std::string> &words);

struct DailySentimentRow {
	Date date{};
	std::uint64_t wc_emotion = 0;
	std::uint64_t wc_total = 0;

	double share() const { return static_cast<double>(wc_emotion) / static_cast<double>(wc_total); }
};

DailySentimentRow daily_emotion_share(const std::vector<ingest::GkgRecord> &bundle, const LexiconMap &lex,
                                      Date date = {});

/// Mean of the last w open-market values. Without carry_forward the w days
/// ending at t must all be present; with it, the w most recent available
/// values up to t are used. Positions without enough history are nullopt.
OptionalSeries smooth(const OptionalSeries &shares, std::size_t window, bool carry_forward = false);

enum class ScaleScope { FullSample, EstimationWindow };

std::string_view to_string(ScaleScope scope);
ScaleScope parse_scale_scope(std::string_view text);

struct Standardized {
	OptionalSeries values;
	double scale = 1.0;
};

/// Divides by the sample standard deviation of the present values in the
/// scoping region: the full series, or the index range [first, last) when
/// scope is EstimationWindow.
Standardized standardize(const OptionalSeries &series, ScaleScope scope,
                         std::optional<std::pair<std::size_t, std::size_t>> window = std::nullopt);

struct EmotionSeriesConfig {
	std::size_t window = 5;
	bool carry_forward = false;
	ScaleScope scope = ScaleScope::FullSample;
	// Inclusive date range used for the scale when scope is EstimationWindow.
	std::optional<std::pair<Date, Date>> estimation_window;
};

struct EmotionSeries {
	std::string emotion_name;
	std::string country;
	std::string focus;
	std::vector<Date> dates;
	std::vector<std::uint64_t> wc_emotion;
	std::vector<std::uint64_t> wc_total;
	OptionalSeries raw_share;
	OptionalSeries smoothed;
	OptionalSeries standardized;
	std::size_t window_w = 5;
	double scale = 1.0;
	ScaleScope scale_scope = ScaleScope::FullSample;

	std::optional<double> value_at(Date d) const;
};

EmotionSeries build_emotion_series(const std::map<Date, std::vector<ingest::GkgRecord>> &bundles,
                                   const std::vector<Date> &trading_days, const LexiconMap &lex,
                                   const EmotionSeriesConfig &cfg, std::string country = {}, std::string focus = {});

/// Negativity control: the same construction run with the LM negative lexicon.
inline EmotionSeries lm_indicator(const std::map<Date, std::vector<ingest::GkgRecord>> &bundles,
                                  const std::vector<Date> &trading_days, const LexiconMap &lm_lexicon,
                                  const EmotionSeriesConfig &cfg, std::string country = {},
                                  std::string focus = {}) {
	return build_emotion_series(bundles, trading_days, lm_lexicon, cfg, std::move(country), std::move(focus));
}

/// Rebuilds smoothed and standardized columns from raw_share (used when a
/// series is assembled outside build_emotion_series).
void recompute(EmotionSeries &series, const EmotionSeriesConfig &cfg);

/// `date,raw_share,smoothed,standardized`; missing values are empty fields.
std::string format_emotion_csv(const EmotionSeries &series);
EmotionSeries parse_emotion_csv(std::string_view csv_text, std::string name = {});

} // namespace emospread::emotions
