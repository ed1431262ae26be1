#include "emospread/rolling.hpp"

#include "emospread/error.hpp"
#include "emospread/parallel.hpp"
#include "emospread/text.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emospread::rolling {

using quantreg::QuantileFit;
using quantreg::RegressionFrame;

const std::vector<std::string> &frame_columns() {
	static const std::vector<std::string> cols = {std::string(quantreg::kIntercept), "d_spread", "crd", "d_liq",
	                                              "d_vstoxx", std::string(kLm), std::string(kEmotion)};
	return cols;
}

RegressionFrame build_regression_frame(const market::MarketSeries &market, const emotions::EmotionSeries &lm,
                                       const emotions::EmotionSeries &emotion, double q, int h) {
	market.validate();
	if (h < 0)
		throw Error(ErrorCode::InvalidArgument, "news lag h must be non-negative");
	if (lm.dates != market.dates || emotion.dates != market.dates)
		throw Error(ErrorCode::CalendarMismatch, "news series are not on the market trading calendar");

	const std::size_t N = market.size();
	const auto lag = static_cast<std::size_t>(h);
	std::vector<std::size_t> rows;
	for (std::size_t t = std::max<std::size_t>(1, lag); t + 1 < N; ++t)
		if (lm.standardized[t - lag] && emotion.standardized[t - lag])
			rows.push_back(t);

	const auto &cols = frame_columns();
	if (rows.size() <= cols.size())
		throw Error(ErrorCode::InsufficientRows,
		            "only " + std::to_string(rows.size()) + " complete rows for h=" + std::to_string(h));

	RegressionFrame f;
	f.q = q;
	f.h = h;
	f.names = cols;
	const auto n = static_cast<Eigen::Index>(rows.size());
	f.target.resize(n);
	f.design.resize(n, static_cast<Eigen::Index>(cols.size()));
	for (Eigen::Index r = 0; r < n; ++r) {
		const std::size_t t = rows[static_cast<std::size_t>(r)];
		f.target[r] = market.spread[t + 1] - market.spread[t];
		f.design(r, 0) = 1.0;
		f.design(r, 1) = market.spread[t] - market.spread[t - 1];
		f.design(r, 2) = market.crd[t];
		f.design(r, 3) = market.liq[t] - market.liq[t - 1];
		f.design(r, 4) = market.vstoxx[t] - market.vstoxx[t - 1];
		f.design(r, 5) = *lm.standardized[t - lag];
		f.design(r, 6) = *emotion.standardized[t - lag];
		f.row_dates.push_back(market.dates[t + 1]);
	}
	f.validate();
	return f;
}

std::string format_frame_csv(const RegressionFrame &frame) {
	std::ostringstream out;
	out << "date,target";
	for (const auto &n : frame.names)
		out << ',' << n;
	out << '\n';
	for (Eigen::Index r = 0; r < frame.rows(); ++r) {
		out << (frame.row_dates.empty() ? std::to_string(r) : format_date(frame.row_dates[static_cast<std::size_t>(r)]))
		    << ',' << format_double(frame.target[r]);
		for (Eigen::Index c = 0; c < frame.cols(); ++c)
			out << ',' << format_double(frame.design(r, c));
		out << '\n';
	}
	return out.str();
}

std::size_t RollingConfig::window_for(std::size_t frame_rows) const {
	return window_T0 ? *window_T0 : frame_rows / 2;
}

void RollingConfig::validate(std::size_t frame_rows, std::size_t regressors) const {
	if (!(q > 0.0 && q < 1.0))
		throw Error(ErrorCode::InvalidConfig, "q must lie in (0,1)");
	if (h < 0 || h > 5)
		throw Error(ErrorCode::InvalidConfig, "h must lie in {0,...,5}");
	if (!(ci_level > 0.0 && ci_level < 1.0))
		throw Error(ErrorCode::InvalidConfig, "ci_level must lie in (0,1)");
	const auto T0 = window_for(frame_rows);
	if (T0 <= regressors + 10)
		throw Error(ErrorCode::InvalidConfig, "window_T0=" + std::to_string(T0) + " must exceed regressors + 10");
}

namespace {

struct WindowFit {
	bool ok = false;
	std::string status;
	QuantileFit augmented;
	QuantileFit benchmark;
	std::map<std::string, quantreg::ConfidenceInterval> ci;
};

bool is_constant(const Eigen::VectorXd &v) { return v.size() == 0 || v.maxCoeff() == v.minCoeff(); }

WindowFit fit_window(const RegressionFrame &frame, std::size_t end, std::size_t T0, const RollingConfig &cfg,
                     bool with_ci) {
	WindowFit out;
	try {
		RegressionFrame aug = frame.slice(end + 1 - T0, T0);
		aug.q = cfg.q;
		// Quiet windows can flatten a column; such columns leave the model.
		for (std::size_t j = aug.names.size(); j-- > 1;)
			if (is_constant(aug.design.col(static_cast<Eigen::Index>(j))))
				aug = aug.without_column(aug.names[j]);
		RegressionFrame bench = aug.find_column(kEmotion) ? aug.without_column(kEmotion) : aug;

		out.augmented = quantreg::fit_quantile(aug);
		out.benchmark = quantreg::fit_quantile(bench);
		if (with_ci)
			for (const auto &name : cfg.ci_coefficients)
				if (aug.find_column(name)) {
					auto ci = quantreg::rank_inversion_ci(aug, out.augmented, name, cfg.ci_level);
					out.ci[name] = ci;
				}
		out.ok = true;
	} catch (const Error &e) {
		out.ok = false;
		out.status = e.what();
	}
	return out;
}

double forecast(const QuantileFit &fit, const RegressionFrame &frame, std::size_t row) {
	double acc = 0.0;
	for (std::size_t j = 0; j < fit.names.size(); ++j)
		acc += fit.coefficients[static_cast<Eigen::Index>(j)] *
		       frame.design(static_cast<Eigen::Index>(row), frame.column(fit.names[j]));
	return acc;
}

std::map<std::string, std::optional<double>> coefficient_map(const std::vector<std::string> &all,
                                                             const QuantileFit &fit) {
	std::map<std::string, std::optional<double>> out;
	for (const auto &name : all)
		out[name] = std::nullopt;
	for (std::size_t j = 0; j < fit.names.size(); ++j)
		out[fit.names[j]] = fit.coefficients[static_cast<Eigen::Index>(j)];
	return out;
}

} // namespace

RollingRun run_rolling(const RegressionFrame &frame, const RollingConfig &cfg, bool with_ci) {
	frame.validate();
	const std::size_t n = static_cast<std::size_t>(frame.rows());
	cfg.validate(n, static_cast<std::size_t>(frame.cols()));
	const std::size_t T0 = cfg.window_for(n);
	if (n < T0 + 1)
		throw Error(ErrorCode::InsufficientRows,
		            "frame has " + std::to_string(n) + " rows; need window_T0 + 1 = " + std::to_string(T0 + 1));

	const std::size_t first_end = T0 - 1;
	const std::size_t windows = n - T0; // ends T0-1 ... n-2
	std::vector<WindowFit> fits(windows);
	parallel_for(windows, cfg.threads,
	             [&](std::size_t k) { fits[k] = fit_window(frame, first_end + k, T0, cfg, with_ci); });

	RollingRun run;
	run.path.names = frame.names;
	run.path.window_T0 = T0;
	for (const auto &name : cfg.ci_coefficients)
		if (frame.find_column(name))
			run.path.ci_names.push_back(name);
	std::vector<std::string> bench_names;
	for (const auto &name : frame.names)
		if (name != kEmotion)
			bench_names.push_back(name);

	for (std::size_t k = 0; k < windows; ++k) {
		const auto &wf = fits[k];
		RollingEntry e;
		e.window_end = first_end + k;
		e.date = frame.row_dates.empty() ? Date{} : frame.row_dates[e.window_end];
		e.ok = wf.ok;
		e.status = wf.status;
		if (wf.ok) {
			e.augmented = coefficient_map(frame.names, wf.augmented);
			e.benchmark = coefficient_map(bench_names, wf.benchmark);
			e.ci = wf.ci;
			e.r1_augmented = wf.augmented.pseudo_r1;
			e.r1_benchmark = wf.benchmark.pseudo_r1;
		}
		run.path.entries.push_back(std::move(e));
	}

	const std::size_t gap = static_cast<std::size_t>(std::max(cfg.h, 1));
	for (std::size_t i = T0 + gap - 1; i < n; ++i) {
		const std::size_t end = i - gap;
		const auto &wf = fits[end - first_end];
		const std::string date = frame.row_dates.empty() ? std::to_string(i) : format_date(frame.row_dates[i]);
		if (!wf.ok) {
			run.skipped.push_back(date + ": " + wf.status);
			continue;
		}
		ForecastRecord rec;
		rec.target_date = frame.row_dates.empty() ? Date{} : frame.row_dates[i];
		rec.realized = frame.target[static_cast<Eigen::Index>(i)];
		rec.forecast_augmented = forecast(wf.augmented, frame, i);
		rec.forecast_benchmark = forecast(wf.benchmark, frame, i);
		rec.loss_augmented = quantreg::check_loss(rec.realized - rec.forecast_augmented, cfg.q);
		rec.loss_benchmark = quantreg::check_loss(rec.realized - rec.forecast_benchmark, cfg.q);
		run.forecasts.push_back(rec);
	}
	return run;
}

RollingCoefficientPath rolling_fit(const RegressionFrame &frame, const RollingConfig &cfg) {
	return run_rolling(frame, cfg, true).path;
}

std::vector<ForecastRecord> oos_forecast_errors(const RegressionFrame &frame, const RollingConfig &cfg) {
	const std::size_t n = static_cast<std::size_t>(frame.rows());
	if (n <= cfg.window_for(n) + 1)
		throw Error(ErrorCode::InsufficientRows, "frame too short for out-of-sample evaluation");
	return run_rolling(frame, cfg, false).forecasts;
}

std::vector<double> default_quantile_grid() {
	std::vector<double> grid;
	for (int k = 1; k <= 19; ++k)
		grid.push_back(k / 20.0);
	return grid;
}

std::vector<SweepRow> quantile_sweep(const RegressionFrame &frame, const std::vector<double> &grid,
                                     const std::vector<std::string> &coefficients, double ci_level) {
	std::vector<SweepRow> rows;
	for (double q : grid) {
		if (!(q > 0.0 && q < 1.0))
			throw Error(ErrorCode::InvalidArgument, "sweep quantile outside (0,1)");
		RegressionFrame f = frame;
		f.q = q;
		auto fit = quantreg::fit_quantile(f);
		for (const auto &name : coefficients) {
			SweepRow row;
			row.q = q;
			row.coefficient = name;
			row.estimate = fit.coefficient(name);
			row.ci = quantreg::rank_inversion_ci(f, fit, name, ci_level);
			rows.push_back(std::move(row));
		}
	}
	return rows;
}

namespace {

void put(std::ostringstream &out, const std::optional<double> &v) {
	out << ',';
	if (v)
		out << format_double(*v);
}

} // namespace

std::string format_path_csv(const RollingCoefficientPath &path) {
	std::vector<std::string> bench;
	for (const auto &n : path.names)
		if (n != kEmotion)
			bench.push_back(n);

	std::ostringstream out;
	out << "date,status";
	for (const auto &n : path.names)
		out << ",aug_" << n;
	for (const auto &n : path.ci_names)
		out << ',' << n << "_lower," << n << "_upper";
	for (const auto &n : bench)
		out << ",bench_" << n;
	out << ",r1_augmented,r1_benchmark,r1_diff\n";

	for (const auto &e : path.entries) {
		out << format_date(e.date) << ',' << (e.ok ? "ok" : "skipped");
		for (const auto &n : path.names) {
			auto it = e.augmented.find(n);
			put(out, it == e.augmented.end() ? std::nullopt : it->second);
		}
		for (const auto &n : path.ci_names) {
			auto it = e.ci.find(n);
			if (it == e.ci.end())
				out << ",,";
			else
				out << ',' << format_double(it->second.lower) << ',' << format_double(it->second.upper);
		}
		for (const auto &n : bench) {
			auto it = e.benchmark.find(n);
			put(out, it == e.benchmark.end() ? std::nullopt : it->second);
		}
		if (e.ok)
			out << ',' << format_double(e.r1_augmented) << ',' << format_double(e.r1_benchmark) << ','
			    << format_double(e.r1_difference()) << '\n';
		else
			out << ",,,\n";
	}
	return out.str();
}

std::string format_forecasts_csv(const std::vector<ForecastRecord> &records) {
	std::ostringstream out;
	out << "target_date,realized,forecast_augmented,forecast_benchmark,loss_augmented,loss_benchmark\n";
	for (const auto &r : records)
		out << format_date(r.target_date) << ',' << format_double(r.realized) << ','
		    << format_double(r.forecast_augmented) << ',' << format_double(r.forecast_benchmark) << ','
		    << format_double(r.loss_augmented) << ',' << format_double(r.loss_benchmark) << '\n';
	return out.str();
}

std::vector<ForecastRecord> parse_forecasts_csv(std::string_view text) {
	std::istringstream in{std::string(text)};
	std::string line;
	if (!std::getline(in, line))
		throw Error(ErrorCode::EmptyFile, "forecast CSV without header");
	std::vector<ForecastRecord> out;
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty())
			continue;
		auto f = split(trim(line), ',');
		if (f.size() != 6)
			throw Error(ErrorCode::BadRow, "forecast CSV line " + std::to_string(line_no));
		ForecastRecord r;
		auto d = parse_iso_date(f[0]);
		double v[5];
		for (int k = 0; k < 5; ++k) {
			auto x = parse_double(f[static_cast<std::size_t>(k) + 1]);
			if (!x)
				throw Error(ErrorCode::BadRow, "forecast CSV line " + std::to_string(line_no));
			v[k] = *x;
		}
		if (!d)
			throw Error(ErrorCode::BadRow, "forecast CSV line " + std::to_string(line_no) + ": bad date");
		r.target_date = *d;
		r.realized = v[0];
		r.forecast_augmented = v[1];
		r.forecast_benchmark = v[2];
		r.loss_augmented = v[3];
		r.loss_benchmark = v[4];
		out.push_back(r);
	}
	return out;
}

std::string format_sweep_csv(const std::vector<SweepRow> &rows) {
	std::ostringstream out;
	out << "q,coefficient,estimate,lower,upper\n";
	for (const auto &r : rows)
		out << format_double(r.q) << ',' << r.coefficient << ',' << format_double(r.estimate) << ','
		    << format_double(r.ci.lower) << ',' << format_double(r.ci.upper) << '\n';
	return out.str();
}

} // namespace emospread::rolling
