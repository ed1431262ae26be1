#include "emospread/pipeline.hpp"

#include "emospread/error.hpp"
#include "emospread/fluctuation.hpp"
#include "emospread/rolling.hpp"
#include "emospread/text.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

namespace emospread::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

EventCalendar EventCalendar::defaults() {
	const std::pair<const char *, const char *> rows[] = {
	    {"2015-08-29", "Greek government debt crisis"},
	    {"2016-02-24", "EU-wide stress testing"},
	    {"2016-06-23", "Brexit"},
	    {"2016-12-04", "Italian constitutional referendum"},
	    {"2017-04-23", "French political elections"},
	    {"2017-06-07", "Rumours early Italian political elections"},
	    {"2017-09-06", "Discussion on tapering"},
	    {"2017-10-01", "Catalan referendum"},
	    {"2018-02-05", "Stock market crash and increase in volatility"},
	    {"2018-03-04", "Italian political elections"},
	    {"2018-05-29", "Political crisis in Italy and in Spain"},
	    {"2018-09-06", "Fitch confirms negative Italian outlook"},
	    {"2018-10-19", "Moody's downgrade of the Italian senior unsecured bond ratings"},
	    {"2018-12-20", "Italian agreement with Brussels on the budget deficit"},
	    {"2019-02-07", "EU publishes Winter 2019 Economic Forecast"},
	    {"2019-05-26", "European parliament elections"},
	};
	EventCalendar cal;
	int id = 1;
	for (const auto &[date, label] : rows)
		cal.events.push_back({id++, *parse_iso_date(date), label});
	return cal;
}

EventCalendar EventCalendar::parse_csv(std::string_view text) {
	EventCalendar cal;
	std::size_t line_no = 0;
	for (auto raw : split(text, '\n')) {
		++line_no;
		auto line = trim(raw);
		if (line.empty() || line_no == 1)
			continue;
		// Labels may contain commas; only the first two separate fields.
		const auto c1 = line.find(',');
		const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
		if (c2 == std::string_view::npos)
			throw Error(ErrorCode::BadRow, "events line " + std::to_string(line_no));
		auto id = parse_uint(trim(line.substr(0, c1)));
		auto date = parse_iso_date(trim(line.substr(c1 + 1, c2 - c1 - 1)));
		if (!id || !date)
			throw Error(ErrorCode::BadRow, "events line " + std::to_string(line_no));
		cal.events.push_back({static_cast<int>(*id), *date, std::string(trim(line.substr(c2 + 1)))});
	}
	cal.validate();
	return cal;
}

void EventCalendar::validate() const {
	std::set<int> ids;
	for (const auto &e : events)
		if (!ids.insert(e.id).second)
			throw Error(ErrorCode::InvalidConfig, "duplicate event id " + std::to_string(e.id));
}

EventCalendar load_events(const PipelineConfig &cfg) {
	if (cfg.events_csv.empty())
		return EventCalendar::defaults();
	return EventCalendar::parse_csv(read_file(cfg.resolve(cfg.events_csv)));
}

std::string effective_output_dir(const PipelineConfig &cfg, const std::optional<std::string> &cli_override) {
	if (cli_override && !cli_override->empty())
		return *cli_override;
	if (const char *env = std::getenv(kOutputDirEnv); env && *env)
		return env;
	return cfg.resolve(cfg.output_dir);
}

namespace {

template <typename Fn>
auto stage(const std::string &name, const std::string &input, Fn &&fn) -> decltype(fn()) {
	try {
		return fn();
	} catch (const Error &e) {
		throw Error(ErrorCode::StageFailure,
		            "stage '" + name + "'" + (input.empty() ? "" : " (" + input + ")") + ": " + e.what());
	}
}

std::string file_key(const std::string &emotion) { return to_lower(emotion); }

std::string format_articles_tsv(const ingest::ArticleSelection &sel) {
	std::ostringstream out;
	out << "record_id\ttrading_date\tpublished_at_utc\toutlet\tword_count\n";
	for (const auto &[day, records] : sel.buckets)
		for (const auto &r : records)
			out << r.record_id << '\t' << format_date(day) << '\t' << format_compact_timestamp(r.published_at_utc)
			    << '\t' << r.outlet << '\t' << r.word_count << '\n';
	return out.str();
}

std::string format_gaps_csv(const std::vector<ingest::SourceGapWarning> &gaps) {
	std::ostringstream out;
	out << "date,count,trailing_median\n";
	for (const auto &g : gaps)
		out << format_date(g.date) << ',' << g.count << ',' << format_double(g.trailing_median) << '\n';
	return out.str();
}

market::MarketSeries restrict_sample(const market::MarketSeries &in, Date start, Date end) {
	market::MarketSeries out;
	out.country = in.country;
	for (std::size_t i = 0; i < in.size(); ++i) {
		if (in.dates[i] < start || end < in.dates[i])
			continue;
		out.dates.push_back(in.dates[i]);
		out.spread.push_back(in.spread[i]);
		out.crd.push_back(in.crd[i]);
		out.liq.push_back(in.liq[i]);
		out.vstoxx.push_back(in.vstoxx[i]);
	}
	if (out.size() < 3)
		throw Error(ErrorCode::InsufficientRows, "fewer than 3 market days inside the sample");
	return out;
}

// With EstimationWindow scope the scale comes from the first T0 dates that
// carry a smoothed value, mirroring the first rolling window.
emotions::EmotionSeries build_indicator(const PipelineConfig &cfg, const ingest::ArticleSelection &sel,
                                        const std::vector<Date> &dates, const emotions::LexiconMap &lex) {
	emotions::EmotionSeriesConfig ecfg;
	ecfg.window = cfg.smoothing_window;
	ecfg.carry_forward = cfg.carry_forward;
	ecfg.scope = emotions::ScaleScope::FullSample;
	const auto focus = cfg.filters.focus.label();
	auto series = emotions::build_emotion_series(sel.buckets, dates, lex, ecfg, cfg.country, focus);
	if (cfg.scale_scope == emotions::ScaleScope::EstimationWindow) {
		std::vector<Date> present;
		for (std::size_t i = 0; i < dates.size(); ++i)
			if (series.smoothed[i])
				present.push_back(dates[i]);
		if (present.empty())
			throw Error(ErrorCode::DegenerateSeries, "indicator '" + lex.name + "' has no smoothed values");
		int min_h = *std::min_element(cfg.h.begin(), cfg.h.end());
		std::size_t T0 = cfg.window_for(min_h).value_or(present.size() / 2);
		T0 = std::clamp<std::size_t>(T0, 2, present.size());
		ecfg.scope = emotions::ScaleScope::EstimationWindow;
		ecfg.estimation_window = std::make_pair(present.front(), present[T0 - 1]);
		emotions::recompute(series, ecfg);
	}
	return series;
}

} // namespace

ReportBundle run_pipeline(const PipelineConfig &cfg, Stage last) {
	stage("config", "", [&] { cfg.validate(); });

	ReportBundle bundle;
	bundle.sample_start = cfg.sample_start;
	bundle.sample_end = cfg.sample_end;
	bundle.config_echo = cfg.to_json(false);

	const auto market_path = cfg.resolve(cfg.market_csv);
	const auto gkg_path = cfg.resolve(cfg.gkg_path);
	const auto lexicon_path = cfg.resolve(cfg.lexicon_path);
	bundle.inputs["market_csv"] = {{"path", cfg.market_csv}, {"sha256", sha256_file(market_path)}};
	bundle.inputs["gkg"] = {{"path", cfg.gkg_path}, {"sha256", sha256_file(gkg_path)}};
	bundle.inputs["lexicon_map"] = {{"path", cfg.lexicon_path}, {"sha256", sha256_file(lexicon_path)}};
	if (!cfg.events_csv.empty())
		bundle.inputs["events"] = {{"path", cfg.events_csv}, {"sha256", sha256_file(cfg.resolve(cfg.events_csv))}};

	// Lexicons first: a bad map should fail before any heavy work.
	const auto lexicons = stage("emotions", lexicon_path, [&] {
		auto lex = emotions::load_lexicon_map(lexicon_path);
		lex.find(cfg.lm_lexicon);
		for (const auto &name : cfg.emotions)
			lex.find(name);
		return lex;
	});

	// Ingest --------------------------------------------------------------
	const auto market = stage("ingest", market_path, [&] {
		auto m = market::load_market_csv(market_path, cfg.market_schema, cfg.country);
		return restrict_sample(m, cfg.sample_start, cfg.sample_end);
	});
	bundle.files["descriptive_stats.csv"] = stage("ingest", market_path, [&] {
		return market::format_descriptive_csv(market::descriptive_stats(market, true));
	});

	const auto selection = stage("ingest", gkg_path, [&] {
		auto parsed = ingest::read_gkg_file(gkg_path, cfg.gkg_schema, cfg.parse_threads);
		if (parsed.malformed > 0)
			bundle.warnings.push_back(std::to_string(parsed.malformed) + " malformed GKG lines skipped");
		return ingest::select_articles(parsed.records, cfg.filters, cfg.calendar);
	});
	const auto daily = selection.daily_counts();
	bundle.files["articles.tsv"] = format_articles_tsv(selection);
	bundle.files["daily_volume.csv"] = ingest::format_daily_volume_csv(market.dates, daily);
	const auto gaps = ingest::detect_source_gaps(market.dates, daily, cfg.gap_lookback, cfg.gap_drop_fraction);
	bundle.files["source_gaps.csv"] = format_gaps_csv(gaps);
	if (!gaps.empty())
		bundle.warnings.push_back(std::to_string(gaps.size()) + " trading days look like source gaps");
	const auto &c = selection.counts;
	bundle.summary["articles"] = {{"input", c.input},
	                              {"failed_length", c.failed_length},
	                              {"failed_outlet", c.failed_outlet},
	                              {"failed_theme", c.failed_theme},
	                              {"failed_focus", c.failed_focus},
	                              {"omitted", c.omitted},
	                              {"selected", c.selected}};
	bundle.summary["market_days"] = market.size();
	if (last == Stage::Ingest)
		return bundle;

	// Indicators ----------------------------------------------------------
	const auto lm = stage("emotions", cfg.lm_lexicon,
	                      [&] { return build_indicator(cfg, selection, market.dates, lexicons.find(cfg.lm_lexicon)); });
	bundle.files["emotion_" + file_key(cfg.lm_lexicon) + ".csv"] = emotions::format_emotion_csv(lm);
	std::vector<emotions::EmotionSeries> indicators;
	for (const auto &name : cfg.emotions) {
		indicators.push_back(stage("emotions", name, [&] {
			return build_indicator(cfg, selection, market.dates, lexicons.find(name));
		}));
		bundle.files["emotion_" + file_key(name) + ".csv"] = emotions::format_emotion_csv(indicators.back());
	}
	if (last == Stage::Emotions)
		return bundle;

	// Models --------------------------------------------------------------
	bundle.summary["models"] = ordered_json::array();
	for (const auto &indicator : indicators) {
		const auto key = file_key(indicator.emotion_name);
		for (int lag : cfg.h) {
			const auto tag = key + "_h" + std::to_string(lag);
			const auto label = indicator.emotion_name + ", h=" + std::to_string(lag);
			ordered_json info;
			info["emotion"] = indicator.emotion_name;
			info["h"] = lag;

			const auto frame = stage("frame", label, [&] {
				return rolling::build_regression_frame(market, lm, indicator, cfg.q, lag);
			});
			bundle.files["frame_" + tag + ".csv"] = rolling::format_frame_csv(frame);
			info["frame_rows"] = frame.rows();
			if (last == Stage::Frame) {
				bundle.summary["models"].push_back(info);
				continue;
			}

			rolling::RollingConfig rcfg;
			rcfg.q = cfg.q;
			rcfg.h = lag;
			rcfg.window_T0 = cfg.window_for(lag);
			rcfg.ci_level = cfg.ci_level;
			rcfg.threads = cfg.threads;
			const auto run = stage("rolling", label, [&] { return rolling::run_rolling(frame, rcfg, true); });
			bundle.files["rolling_" + tag + ".csv"] = rolling::format_path_csv(run.path);
			std::size_t skipped = 0;
			for (const auto &e : run.path.entries)
				skipped += e.ok ? 0 : 1;
			if (skipped > 0)
				bundle.warnings.push_back(label + ": " + std::to_string(skipped) + " rolling windows skipped");
			info["window_T0"] = run.path.window_T0;
			info["windows"] = run.path.entries.size();
			info["skipped_windows"] = skipped;
			if (last == Stage::Rolling) {
				bundle.summary["models"].push_back(info);
				continue;
			}

			bundle.files["forecasts_" + tag + ".csv"] = rolling::format_forecasts_csv(run.forecasts);
			info["forecasts"] = run.forecasts.size();
			if (last == Stage::Forecast) {
				bundle.summary["models"].push_back(info);
				continue;
			}

			fluctuation::FluctuationConfig fcfg;
			fcfg.mu = cfg.mu;
			fcfg.alpha = cfg.alpha;
			fcfg.hac_bandwidth = cfg.hac_bandwidth;
			fcfg.per_window_variance = cfg.per_window_variance;
			fcfg.interpolate_mu = cfg.interpolate_mu;
			const auto diffs = fluctuation::loss_differentials(run.forecasts);
			fluctuation::FluctuationPath path = stage("fluctuation", label, [&] {
				try {
					return fluctuation::fluctuation_statistics(diffs, fcfg);
				} catch (const Error &e) {
					if (e.code() != ErrorCode::ZeroVariance)
						throw;
					// Identical forecasts: nothing to test.
					bundle.warnings.push_back(label + ": zero loss-differential variance, verdicts Inconclusive");
					fluctuation::FluctuationPath p;
					p.m = fcfg.window_length(diffs.n_oos());
					p.critical_value =
					    fluctuation::critical_value(fcfg.mu, fcfg.alpha, diffs.n_oos(), fcfg.interpolate_mu);
					for (std::size_t j = p.m - 1; j < diffs.n_oos(); ++j)
						p.points.push_back({diffs.dates[j], j, std::numeric_limits<double>::quiet_NaN(),
						                    fluctuation::Verdict::Inconclusive});
					return p;
				}
			});
			bundle.files["fluctuation_" + tag + ".csv"] = fluctuation::format_fluctuation_csv(path);
			std::size_t better = 0, worse = 0;
			for (const auto &p : path.points) {
				better += p.verdict == fluctuation::Verdict::AugmentedBetter;
				worse += p.verdict == fluctuation::Verdict::BenchmarkBetter;
			}
			info["m"] = path.m;
			info["hac_bandwidth"] = path.bandwidth;
			info["critical_value"] = path.critical_value;
			info["augmented_better_windows"] = better;
			info["benchmark_better_windows"] = worse;
			bundle.summary["models"].push_back(info);
		}
	}
	if (last != Stage::All)
		return bundle;

	// Exploratory sweep at h = 0 over the quantile grid.
	if (cfg.sweep) {
		const auto grid = cfg.sweep_grid.empty() ? rolling::default_quantile_grid() : cfg.sweep_grid;
		for (const auto &indicator : indicators) {
			try {
				auto frame = rolling::build_regression_frame(market, lm, indicator, cfg.q, 0);
				auto rows = rolling::quantile_sweep(frame, grid, {std::string(rolling::kEmotion)}, cfg.ci_level);
				bundle.files["sweep_" + file_key(indicator.emotion_name) + ".csv"] = rolling::format_sweep_csv(rows);
			} catch (const Error &e) {
				bundle.warnings.push_back("sweep for " + indicator.emotion_name + " skipped: " + e.what());
			}
		}
	}
	return bundle;
}

namespace {

std::string format_events_csv(const std::vector<Event> &events) {
	std::ostringstream out;
	out << "id,date,label\n";
	for (const auto &e : events)
		out << e.id << ',' << format_date(e.date) << ',' << e.label << '\n';
	return out.str();
}

ordered_json versions() {
	return {{"emospread", "0.3.0"},
	        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
	                      std::to_string(EIGEN_MINOR_VERSION)},
	        {"boost", BOOST_LIB_VERSION},
	        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
	                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
	                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

} // namespace

std::vector<std::string> emit_report(const ReportBundle &bundle, const EventCalendar &events,
                                     const std::string &out_dir) {
	events.validate();
	std::error_code ec;
	fs::create_directories(out_dir, ec);
	if (ec)
		throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir + ": " + ec.message());

	std::vector<std::string> report_warnings;
	std::vector<Event> kept;
	for (const auto &e : events.events) {
		if (e.date < bundle.sample_start || bundle.sample_end < e.date)
			report_warnings.push_back("event " + std::to_string(e.id) + " (" + format_date(e.date) +
			                          ") lies outside the sample and was excluded");
		else
			kept.push_back(e);
	}

	auto files = bundle.files;
	files["events.csv"] = format_events_csv(kept);

	ordered_json outputs = ordered_json::object();
	std::vector<std::string> written;
	for (const auto &[name, contents] : files) {
		write_file((fs::path(out_dir) / name).string(), contents);
		outputs[name] = sha256_hex(contents);
		written.push_back(name);
	}

	ordered_json manifest;
	manifest["versions"] = versions();
	manifest["config"] = bundle.config_echo;
	manifest["config_sha256"] = sha256_hex(bundle.config_echo.dump());
	manifest["inputs"] = bundle.inputs;
	manifest["outputs"] = outputs;
	manifest["summary"] = bundle.summary;
	manifest["pipeline_warnings"] = bundle.warnings;
	manifest["report_warnings"] = report_warnings;
	write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
	written.push_back("manifest.json");
	return written;
}

ReportBundle load_report_bundle(const std::string &dir) {
	const auto manifest_path = (fs::path(dir) / "manifest.json").string();
	if (!fs::is_regular_file(manifest_path))
		throw Error(ErrorCode::IoError, "no manifest.json in " + dir);
	ordered_json manifest;
	try {
		manifest = ordered_json::parse(read_file(manifest_path));
	} catch (const nlohmann::json::exception &e) {
		throw Error(ErrorCode::IoError, std::string("unreadable manifest: ") + e.what());
	}

	ReportBundle bundle;
	bundle.config_echo = manifest.value("config", ordered_json::object());
	bundle.inputs = manifest.value("inputs", ordered_json::object());
	bundle.summary = manifest.value("summary", ordered_json::object());
	bundle.warnings = manifest.value("pipeline_warnings", std::vector<std::string>{});
	const auto cfg = parse_pipeline_config(bundle.config_echo.dump());
	bundle.sample_start = cfg.sample_start;
	bundle.sample_end = cfg.sample_end;

	const auto outputs = manifest.value("outputs", ordered_json::object());
	for (const auto &[name, digest] : outputs.items()) {
		if (name == "events.csv")
			continue;
		const auto path = (fs::path(dir) / name).string();
		auto contents = read_file(path);
		if (sha256_hex(contents) != digest.get<std::string>())
			throw Error(ErrorCode::IoError, name + " does not match its manifest digest");
		bundle.files[name] = std::move(contents);
	}
	return bundle;
}

} // namespace emospread::pipeline
