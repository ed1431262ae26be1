#include "emospread/config.hpp"

#include "emospread/error.hpp"
#include "emospread/text.hpp"

#include <filesystem>

namespace emospread::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string PipelineConfig::resolve(const std::string &path) const {
	if (path.empty())
		return path;
	fs::path p(path);
	if (p.is_relative())
		p = fs::path(base_dir) / p;
	return p.lexically_normal().string();
}

std::optional<std::size_t> PipelineConfig::window_for(int lag) const {
	if (auto it = window_T0_by_h.find(lag); it != window_T0_by_h.end())
		return it->second;
	return window_T0;
}

void PipelineConfig::validate() const {
	if (!(sample_start < sample_end))
		throw Error(ErrorCode::InvalidConfig, "sample.start must precede sample.end");
	if (!(q > 0.0 && q < 1.0))
		throw Error(ErrorCode::InvalidConfig, "model.q must lie in (0,1)");
	if (h.empty())
		throw Error(ErrorCode::InvalidConfig, "model.h must list at least one lag");
	for (int lag : h)
		if (lag < 0 || lag > 5)
			throw Error(ErrorCode::InvalidConfig, "model.h entries must lie in {0,...,5}");
	if (!(ci_level > 0.0 && ci_level < 1.0))
		throw Error(ErrorCode::InvalidConfig, "model.ci_level must lie in (0,1)");
	for (double g : sweep_grid)
		if (!(g > 0.0 && g < 1.0))
			throw Error(ErrorCode::InvalidConfig, "model.sweep_grid entries must lie in (0,1)");
	if (!(mu > 0.0 && mu < 1.0))
		throw Error(ErrorCode::InvalidConfig, "test.mu must lie in (0,1)");
	if (!(alpha > 0.0 && alpha < 1.0))
		throw Error(ErrorCode::InvalidConfig, "test.alpha must lie in (0,1)");
	if (emotions.empty())
		throw Error(ErrorCode::InvalidConfig, "emotions.names must not be empty");
	if (smoothing_window == 0)
		throw Error(ErrorCode::InvalidConfig, "emotions.window must be positive");
	filters.validate();
	calendar.validate();
	gkg_schema.validate();

	const std::pair<const char *, const std::string *> inputs[] = {
	    {"data.market_csv", &market_csv}, {"data.gkg", &gkg_path}, {"data.lexicon_map", &lexicon_path}};
	for (const auto &[key, value] : inputs) {
		if (value->empty())
			throw Error(ErrorCode::InvalidConfig, std::string(key) + " is required");
		if (!fs::is_regular_file(resolve(*value)))
			throw Error(ErrorCode::InvalidConfig, std::string(key) + " not found: " + resolve(*value));
	}
	if (!events_csv.empty() && !fs::is_regular_file(resolve(events_csv)))
		throw Error(ErrorCode::InvalidConfig, "events.path not found: " + resolve(events_csv));
}

namespace {

Date date_field(const json &obj, const char *key, Date fallback) {
	if (!obj.contains(key))
		return fallback;
	auto d = parse_iso_date(obj.at(key).get<std::string>());
	if (!d)
		throw Error(ErrorCode::InvalidConfig, std::string("bad date in '") + key + "'");
	return *d;
}

int clock_field(const json &obj, const char *key, int fallback) {
	if (!obj.contains(key))
		return fallback;
	auto m = parse_clock_minutes(obj.at(key).get<std::string>());
	if (!m)
		throw Error(ErrorCode::InvalidConfig, std::string("bad clock time in '") + key + "'");
	return *m;
}

template <typename T>
void read(const json &obj, const char *key, T &target) {
	if (obj.contains(key))
		target = obj.at(key).get<T>();
}

void read_optional_size(const json &obj, const char *key, std::optional<std::size_t> &target) {
	if (!obj.contains(key))
		return;
	const auto &v = obj.at(key);
	if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto"))
		target.reset();
	else
		target = v.get<std::size_t>();
}

const json &section(const json &doc, const char *name) {
	static const json empty = json::object();
	if (!doc.contains(name))
		return empty;
	if (!doc.at(name).is_object())
		throw Error(ErrorCode::InvalidConfig, std::string("section '") + name + "' must be an object");
	return doc.at(name);
}

} // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::string &base_dir) {
	json doc;
	try {
		doc = json::parse(json_text);
	} catch (const json::exception &e) {
		throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
	}
	if (!doc.is_object())
		throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");

	PipelineConfig cfg;
	cfg.base_dir = base_dir;
	try {
		read(doc, "seed", cfg.seed);

		const auto &sample = section(doc, "sample");
		cfg.sample_start = date_field(sample, "start", cfg.sample_start);
		cfg.sample_end = date_field(sample, "end", cfg.sample_end);
		read(sample, "country", cfg.country);

		const auto &data = section(doc, "data");
		read(data, "market_csv", cfg.market_csv);
		read(data, "gkg", cfg.gkg_path);
		read(data, "lexicon_map", cfg.lexicon_path);
		read(data, "parse_threads", cfg.parse_threads);
		const auto &ms = section(data, "market_schema");
		read(ms, "date", cfg.market_schema.date);
		read(ms, "spread", cfg.market_schema.spread);
		read(ms, "crd", cfg.market_schema.crd);
		read(ms, "liq", cfg.market_schema.liq);
		read(ms, "vstoxx", cfg.market_schema.vstoxx);
		const auto &gs = section(data, "gkg_schema");
		read(gs, "column_count", cfg.gkg_schema.column_count);
		read(gs, "record_id", cfg.gkg_schema.record_id);
		read(gs, "date", cfg.gkg_schema.date);
		read(gs, "source", cfg.gkg_schema.source);
		read(gs, "themes", cfg.gkg_schema.themes);
		read(gs, "locations", cfg.gkg_schema.locations);
		read(gs, "gcam", cfg.gkg_schema.gcam);
		read(gs, "location_country_subfield", cfg.gkg_schema.location_country_subfield);
		read(gs, "word_count_key", cfg.gkg_schema.word_count_key);

		const auto &filters = section(doc, "filters");
		read(filters, "min_words", cfg.filters.min_words);
		read(filters, "theme_prefixes", cfg.filters.theme_prefixes);
		read(filters, "min_theme_keywords", cfg.filters.min_theme_keywords);
		read(filters, "gap_lookback", cfg.gap_lookback);
		read(filters, "gap_drop_fraction", cfg.gap_drop_fraction);
		cfg.filters.focus = ingest::FocusMode::domestic(cfg.country);
		if (filters.contains("focus")) {
			const auto &f = filters.at("focus");
			const auto mode = f.value("mode", std::string("domestic"));
			if (mode == "domestic") {
				cfg.filters.focus = ingest::FocusMode::domestic(f.value("country", cfg.country));
			} else if (mode == "paired") {
				auto countries = f.at("countries").get<std::vector<std::string>>();
				if (countries.size() != 2)
					throw Error(ErrorCode::InvalidConfig, "filters.focus.countries needs two entries");
				cfg.filters.focus = ingest::FocusMode::paired(countries[0], countries[1]);
			} else {
				throw Error(ErrorCode::InvalidConfig, "filters.focus.mode must be 'domestic' or 'paired'");
			}
		}
		if (filters.contains("outlets")) {
			auto outlets = filters.at("outlets").get<std::vector<std::string>>();
			cfg.filters.outlet_allowlist = {outlets.begin(), outlets.end()};
		} else {
			cfg.filters.outlet_allowlist = ingest::default_outlet_allowlist(cfg.country);
		}

		const auto &cal = section(doc, "calendar");
		cfg.calendar.market_open_minutes = clock_field(cal, "market_open", cfg.calendar.market_open_minutes);
		cfg.calendar.market_close_minutes = clock_field(cal, "market_close", cfg.calendar.market_close_minutes);
		read(cal, "timezone_offset_hours", cfg.calendar.timezone_offset_hours);
		if (cal.contains("holidays"))
			for (const auto &d : cal.at("holidays")) {
				auto parsed = parse_iso_date(d.get<std::string>());
				if (!parsed)
					throw Error(ErrorCode::InvalidConfig, "bad holiday date " + d.get<std::string>());
				cfg.calendar.holidays.insert(*parsed);
			}

		const auto &emo = section(doc, "emotions");
		read(emo, "names", cfg.emotions);
		read(emo, "lm", cfg.lm_lexicon);
		read(emo, "window", cfg.smoothing_window);
		read(emo, "carry_forward", cfg.carry_forward);
		if (emo.contains("scale_scope"))
			cfg.scale_scope = emotions::parse_scale_scope(emo.at("scale_scope").get<std::string>());

		const auto &model = section(doc, "model");
		read(model, "q", cfg.q);
		if (model.contains("h")) {
			if (model.at("h").is_array())
				cfg.h = model.at("h").get<std::vector<int>>();
			else
				cfg.h = {model.at("h").get<int>()};
		}
		if (model.contains("window_T0") && model.at("window_T0").is_object()) {
			for (const auto &[k, v] : model.at("window_T0").items())
				cfg.window_T0_by_h[std::stoi(k)] = v.get<std::size_t>();
		} else {
			read_optional_size(model, "window_T0", cfg.window_T0);
		}
		read(model, "ci_level", cfg.ci_level);
		read(model, "sweep", cfg.sweep);
		read(model, "sweep_grid", cfg.sweep_grid);
		read(model, "threads", cfg.threads);

		const auto &test = section(doc, "test");
		read(test, "mu", cfg.mu);
		read(test, "alpha", cfg.alpha);
		read_optional_size(test, "hac_bandwidth", cfg.hac_bandwidth);
		read(test, "per_window_variance", cfg.per_window_variance);
		read(test, "interpolate_mu", cfg.interpolate_mu);

		read(section(doc, "events"), "path", cfg.events_csv);
		read(section(doc, "output"), "dir", cfg.output_dir);
	} catch (const json::exception &e) {
		throw Error(ErrorCode::InvalidConfig, std::string("config field has the wrong type: ") + e.what());
	} catch (const std::invalid_argument &) {
		throw Error(ErrorCode::InvalidConfig, "model.window_T0 keys must be lags");
	}
	return cfg;
}

PipelineConfig load_pipeline_config(const std::string &path) {
	if (!fs::is_regular_file(path))
		throw Error(ErrorCode::InvalidConfig, "config file not found: " + path);
	auto base = fs::path(path).parent_path().string();
	return parse_pipeline_config(read_file(path), base.empty() ? "." : base);
}

ordered_json PipelineConfig::to_json(bool include_output_dir) const {
	ordered_json j;
	j["seed"] = seed;
	j["sample"] = {{"start", format_date(sample_start)}, {"end", format_date(sample_end)}, {"country", country}};

	ordered_json data;
	data["market_csv"] = market_csv;
	data["gkg"] = gkg_path;
	data["lexicon_map"] = lexicon_path;
	data["parse_threads"] = parse_threads;
	data["market_schema"] = {{"date", market_schema.date},
	                         {"spread", market_schema.spread},
	                         {"crd", market_schema.crd},
	                         {"liq", market_schema.liq},
	                         {"vstoxx", market_schema.vstoxx}};
	data["gkg_schema"] = {{"column_count", gkg_schema.column_count},
	                      {"record_id", gkg_schema.record_id},
	                      {"date", gkg_schema.date},
	                      {"source", gkg_schema.source},
	                      {"themes", gkg_schema.themes},
	                      {"locations", gkg_schema.locations},
	                      {"gcam", gkg_schema.gcam},
	                      {"location_country_subfield", gkg_schema.location_country_subfield},
	                      {"word_count_key", gkg_schema.word_count_key}};
	j["data"] = data;

	ordered_json focus;
	if (filters.focus.kind == ingest::FocusMode::Kind::Domestic)
		focus = {{"mode", "domestic"}, {"country", filters.focus.country_a}};
	else
		focus = {{"mode", "paired"}, {"countries", {filters.focus.country_a, filters.focus.country_b}}};
	j["filters"] = {{"min_words", filters.min_words},
	                {"theme_prefixes", filters.theme_prefixes},
	                {"min_theme_keywords", filters.min_theme_keywords},
	                {"focus", focus},
	                {"outlets", std::vector<std::string>(filters.outlet_allowlist.begin(),
	                                                     filters.outlet_allowlist.end())},
	                {"gap_lookback", gap_lookback},
	                {"gap_drop_fraction", gap_drop_fraction}};

	std::vector<std::string> holidays;
	for (auto d : calendar.holidays)
		holidays.push_back(format_date(d));
	j["calendar"] = {{"market_open", format_clock_minutes(calendar.market_open_minutes)},
	                 {"market_close", format_clock_minutes(calendar.market_close_minutes)},
	                 {"timezone_offset_hours", calendar.timezone_offset_hours},
	                 {"weekend_rule", "map_to_monday"},
	                 {"holidays", holidays}};

	j["emotions"] = {{"names", emotions},
	                 {"lm", lm_lexicon},
	                 {"window", smoothing_window},
	                 {"carry_forward", carry_forward},
	                 {"scale_scope", std::string(emotions::to_string(scale_scope))}};

	ordered_json model;
	model["q"] = q;
	model["h"] = h;
	if (!window_T0_by_h.empty()) {
		ordered_json by_h;
		for (const auto &[lag, T0] : window_T0_by_h)
			by_h[std::to_string(lag)] = T0;
		model["window_T0"] = by_h;
	} else if (window_T0) {
		model["window_T0"] = *window_T0;
	} else {
		model["window_T0"] = "auto";
	}
	model["ci_level"] = ci_level;
	model["sweep"] = sweep;
	model["sweep_grid"] = sweep_grid;
	model["threads"] = threads;
	j["model"] = model;

	ordered_json test;
	test["mu"] = mu;
	test["alpha"] = alpha;
	if (hac_bandwidth)
		test["hac_bandwidth"] = *hac_bandwidth;
	else
		test["hac_bandwidth"] = "auto";
	test["per_window_variance"] = per_window_variance;
	test["interpolate_mu"] = interpolate_mu;
	j["test"] = test;

	j["events"] = {{"path", events_csv}};
	if (include_output_dir)
		j["output"] = {{"dir", output_dir}};
	return j;
}

} // namespace emospread::pipeline
