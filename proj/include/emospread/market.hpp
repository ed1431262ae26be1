#pragma once

#include "emospread/date.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace emospread::market {

/// Daily market covariates in levels. Differencing happens downstream.
struct MarketSeries {
	std::string country;
	std::vector<Date> dates;
	std::vector<double> spread; // basis points
	std::vector<double> crd;    // equity index return, percent
	std::vector<double> liq;    // 10y bid-ask spread
	std::vector<double> vstoxx; // implied volatility index

	std::size_t size() const { return dates.size(); }
	void validate() const;
};

/// Column names in the market CSV; dates are ISO-8601.
struct MarketCsvSchema {
	std::string date = "date";
	std::string spread = "spread";
	std::string crd = "crd";
	std::string liq = "liq";
	std::string vstoxx = "vstoxx";
};

MarketSeries parse_market_csv(std::string_view text, const MarketCsvSchema &schema = {}, std::string country = {});
MarketSeries load_market_csv(const std::string &path, const MarketCsvSchema &schema = {}, std::string country = {});
std::string format_market_csv(const MarketSeries &series);

std::vector<double> first_difference(const std::vector<double> &levels);

struct DescriptiveRow {
	int year = 0; // 0 when not grouped by year
	std::string variable;
	std::size_t n = 0;
	double mean = 0.0;
	double sd = 0.0;
	double p05 = 0.0;
	double p95 = 0.0;
};

/// Mean, sample s.d. and lower-vertex 5th/95th percentiles of spread,
/// d_spread, crd, d_liq and d_vstoxx.
std::vector<DescriptiveRow> descriptive_stats(const MarketSeries &series, bool by_year = true);
std::string format_descriptive_csv(const std::vector<DescriptiveRow> &rows);

} // namespace emospread::market
