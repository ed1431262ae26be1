#pragma once

#include "emospread/date.hpp"
#include "emospread/emotion.hpp"
#include "emospread/gkg.hpp"
#include "emospread/market.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emospread::pipeline {

/// Environment variable that overrides output.dir.
inline constexpr const char *kOutputDirEnv = "EMOSPREAD_OUTPUT_DIR";

struct PipelineConfig {
	std::uint64_t seed = 20150302;

	// sample
	Date sample_start = make_date(2015, 3, 2);
	Date sample_end = make_date(2019, 8, 31);
	std::string country = "IT";

	// data (paths as written in the file; see resolve())
	std::string market_csv;
	std::string gkg_path;
	std::string lexicon_path;
	market::MarketCsvSchema market_schema;
	ingest::GkgSchema gkg_schema;
	unsigned parse_threads = 1;

	ingest::ArticleFilterConfig filters;
	ingest::TradingCalendar calendar;
	std::size_t gap_lookback = 20;
	double gap_drop_fraction = 0.5;

	// emotions
	std::vector<std::string> emotions{"Distress", "Panic"};
	std::string lm_lexicon = "LMNegative";
	std::size_t smoothing_window = 5;
	bool carry_forward = false;
	emotions::ScaleScope scale_scope = emotions::ScaleScope::EstimationWindow;

	// model
	double q = 0.95;
	std::vector<int> h{1};
	std::optional<std::size_t> window_T0;       // same for every h
	std::map<int, std::size_t> window_T0_by_h;  // overrides window_T0 per h
	double ci_level = 0.90;
	bool sweep = true;
	std::vector<double> sweep_grid; // empty: 0.05, 0.10, ..., 0.95
	unsigned threads = 1;

	// test
	double mu = 0.30;
	double alpha = 0.05;
	std::optional<std::size_t> hac_bandwidth;
	bool per_window_variance = false;
	bool interpolate_mu = false;

	// events: empty means the built-in list
	std::string events_csv;

	std::string output_dir = "out";
	std::string base_dir = "."; // directory of the config file

	std::string resolve(const std::string &path) const;
	std::optional<std::size_t> window_for(int lag) const;
	/// Checks values and that every referenced input exists.
	void validate() const;
	/// Every effective parameter, defaults included. Parses back to an
	/// equivalent config.
	nlohmann::ordered_json to_json(bool include_output_dir = true) const;
};

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::string &base_dir = ".");
PipelineConfig load_pipeline_config(const std::string &path);

} // namespace emospread::pipeline
