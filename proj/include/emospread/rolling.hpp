#pragma once

// Emotion-augmented frames, rolling-window re-estimation and one-step
// out-of-sample check-loss evaluation against the emotion-free benchmark.

#include "emospread/emotion.hpp"
#include "emospread/market.hpp"
#include "emospread/quantreg.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emospread::rolling {

inline constexpr std::string_view kEmotion = "emotion";
inline constexpr std::string_view kLm = "lm";

/// Column order of every frame built here.
const std::vector<std::string> &frame_columns();

/// Row t targets spread[t+1] - spread[t] and carries d_spread, crd, d_liq and
/// d_vstoxx at t plus LM and emotion at t - h. Rows with any missing input
/// are absent. Both news series must be on the market calendar.
quantreg::RegressionFrame build_regression_frame(const market::MarketSeries &market,
                                                 const emotions::EmotionSeries &lm,
                                                 const emotions::EmotionSeries &emotion, double q, int h);

std::string format_frame_csv(const quantreg::RegressionFrame &frame);

struct RollingConfig {
	double q = 0.95;
	int h = 1;
	std::optional<std::size_t> window_T0; // default: half the usable frame
	double ci_level = 0.90;
	std::vector<std::string> ci_coefficients{std::string(kEmotion)};
	unsigned threads = 1;

	std::size_t window_for(std::size_t frame_rows) const;
	void validate(std::size_t frame_rows, std::size_t regressors) const;
};

struct RollingEntry {
	Date date{};                  // target date of the last row in the window
	std::size_t window_end = 0;   // frame row index
	bool ok = false;
	std::string status;           // error text when the window was skipped
	std::map<std::string, std::optional<double>> augmented;
	std::map<std::string, std::optional<double>> benchmark;
	std::map<std::string, quantreg::ConfidenceInterval> ci;
	double r1_augmented = 0.0;
	double r1_benchmark = 0.0;

	double r1_difference() const { return r1_augmented - r1_benchmark; }
};

struct RollingCoefficientPath {
	std::vector<std::string> names;
	std::vector<std::string> ci_names;
	std::size_t window_T0 = 0;
	std::vector<RollingEntry> entries;
};

struct ForecastRecord {
	Date target_date{};
	double realized = 0.0;
	double forecast_augmented = 0.0;
	double forecast_benchmark = 0.0;
	double loss_augmented = 0.0;
	double loss_benchmark = 0.0;
};

struct RollingRun {
	RollingCoefficientPath path;
	std::vector<ForecastRecord> forecasts;
	std::vector<std::string> skipped; // forecast dates whose window failed
};

/// Windows of window_T0 consecutive rows ending at rows T0-1 ... n-2.
RollingCoefficientPath rolling_fit(const quantreg::RegressionFrame &frame, const RollingConfig &cfg);

/// Forecast for row i uses the window ending at row i - max(h, 1).
std::vector<ForecastRecord> oos_forecast_errors(const quantreg::RegressionFrame &frame, const RollingConfig &cfg);

/// Both of the above sharing one set of window fits.
RollingRun run_rolling(const quantreg::RegressionFrame &frame, const RollingConfig &cfg, bool with_ci = true);

struct SweepRow {
	double q = 0.0;
	std::string coefficient;
	double estimate = 0.0;
	quantreg::ConfidenceInterval ci;
};

std::vector<double> default_quantile_grid();

std::vector<SweepRow> quantile_sweep(const quantreg::RegressionFrame &frame, const std::vector<double> &grid,
                                     const std::vector<std::string> &coefficients, double ci_level = 0.90);

std::string format_path_csv(const RollingCoefficientPath &path);
std::string format_forecasts_csv(const std::vector<ForecastRecord> &records);
std::vector<ForecastRecord> parse_forecasts_csv(std::string_view text);
std::string format_sweep_csv(const std::vector<SweepRow> &rows);

} // namespace emospread::rolling
