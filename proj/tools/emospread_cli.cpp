// emospread: command-line front end for the news-emotion spread pipeline.

#include "emospread/config.hpp"
#include "emospread/error.hpp"
#include "emospread/fluctuation.hpp"
#include "emospread/pipeline.hpp"
#include "emospread/rolling.hpp"
#include "emospread/simulate.hpp"
#include "emospread/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

using namespace emospread;
namespace fs = std::filesystem;

namespace {

struct Overrides {
	std::string config;
	std::string out;
	std::optional<double> q;
	std::vector<int> h;
	std::optional<std::size_t> window;
	std::optional<double> mu;
	std::optional<double> alpha;
	std::optional<std::uint64_t> seed;
	std::optional<unsigned> threads;
};

void add_common(CLI::App *cmd, Overrides &o, bool config_required = true) {
	auto *opt = cmd->add_option("--config", o.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
	if (config_required)
		opt->required();
	cmd->add_option("--out", o.out, "Output directory (overrides config and $EMOSPREAD_OUTPUT_DIR)");
	cmd->add_option("--q", o.q, "Quantile level in (0,1)");
	cmd->add_option("--h", o.h, "News lag(s) in {0,...,5}");
	cmd->add_option("--window", o.window, "Rolling window length T0");
	cmd->add_option("--mu", o.mu, "Fluctuation window fraction");
	cmd->add_option("--alpha", o.alpha, "Nominal size of the two-sided test");
	cmd->add_option("--seed", o.seed, "Master random seed");
	cmd->add_option("--threads", o.threads, "Worker threads for rolling windows");
}

pipeline::PipelineConfig load(const Overrides &o) {
	auto cfg = pipeline::load_pipeline_config(o.config);
	if (o.q)
		cfg.q = *o.q;
	if (!o.h.empty())
		cfg.h = o.h;
	if (o.window) {
		cfg.window_T0 = *o.window;
		cfg.window_T0_by_h.clear();
	}
	if (o.mu)
		cfg.mu = *o.mu;
	if (o.alpha)
		cfg.alpha = *o.alpha;
	if (o.seed)
		cfg.seed = *o.seed;
	if (o.threads)
		cfg.threads = *o.threads;
	return cfg;
}

std::optional<std::string> out_flag(const Overrides &o) {
	return o.out.empty() ? std::nullopt : std::optional<std::string>(o.out);
}

int run_stage(const Overrides &o, pipeline::Stage last) {
	const auto cfg = load(o);
	const auto bundle = pipeline::run_pipeline(cfg, last);
	const auto dir = pipeline::effective_output_dir(cfg, out_flag(o));
	const auto files = pipeline::emit_report(bundle, pipeline::load_events(cfg), dir);
	for (const auto &w : bundle.warnings)
		std::cerr << "warning: " << w << '\n';
	std::cout << "wrote " << files.size() << " files to " << dir << '\n';
	return 0;
}

struct SimulateArgs {
	std::string out;
	std::uint64_t seed = 20150302;
	std::size_t days = 600;
	int h = 1;
	double gamma = 0.5;
	double theta = 0.0;
	double q = 0.95;
	std::string errors = "normal";
	double df = 5.0;
};

int run_simulate(const SimulateArgs &a) {
	simulate::DgpSpec spec;
	spec.days = a.days;
	spec.h = a.h;
	spec.gamma = a.gamma;
	spec.theta = a.theta;
	spec.emit_gkg = true;
	if (a.errors == "t") {
		spec.errors = simulate::ErrorDistribution::StudentT;
		spec.t_df = a.df;
	} else if (a.errors != "normal") {
		throw Error(ErrorCode::InvalidSpec, "--errors must be 'normal' or 't'");
	}
	const auto data = simulate::simulate_dgp(spec, a.seed);

	fs::create_directories(a.out);
	const fs::path dir(a.out);
	write_file((dir / "market.csv").string(), market::format_market_csv(data.market));
	ingest::GkgSchema schema;
	std::string gkg;
	for (const auto &r : data.records)
		gkg += ingest::format_gkg_line(r, schema) + "\n";
	write_file((dir / "gkg.tsv").string(), gkg);
	write_file((dir / "lexicon.json").string(), simulate::synthetic_lexicon_json(spec));

	pipeline::PipelineConfig cfg;
	cfg.seed = a.seed;
	cfg.sample_start = data.market.dates.front();
	cfg.sample_end = data.market.dates.back();
	cfg.country = spec.country;
	cfg.market_csv = "market.csv";
	cfg.gkg_path = "gkg.tsv";
	cfg.lexicon_path = "lexicon.json";
	cfg.filters = simulate::synthetic_filter_config(spec);
	cfg.emotions = {spec.emotion_name, spec.inert_emotion_name};
	cfg.lm_lexicon = spec.lm_name;
	cfg.scale_scope = emotions::ScaleScope::FullSample;
	cfg.q = a.q;
	cfg.h = {a.h};
	cfg.output_dir = "report";
	write_file((dir / "config.json").string(), cfg.to_json(true).dump(2) + "\n");

	nlohmann::ordered_json truth;
	truth["seed"] = a.seed;
	truth["q"] = a.q;
	truth["h"] = a.h;
	truth["coefficients"] = spec.true_coefficients(a.q);
	write_file((dir / "truth.json").string(), truth.dump(2) + "\n");
	std::cout << "wrote market.csv, gkg.tsv, lexicon.json, config.json, truth.json to " << a.out << '\n';
	return 0;
}

int run_fluctuation_file(const Overrides &o, const std::string &forecasts_csv) {
	fluctuation::FluctuationConfig fcfg;
	if (!o.config.empty()) {
		const auto cfg = load(o);
		fcfg.mu = cfg.mu;
		fcfg.alpha = cfg.alpha;
		fcfg.hac_bandwidth = cfg.hac_bandwidth;
		fcfg.per_window_variance = cfg.per_window_variance;
		fcfg.interpolate_mu = cfg.interpolate_mu;
	} else {
		fcfg.mu = o.mu.value_or(fcfg.mu);
		fcfg.alpha = o.alpha.value_or(fcfg.alpha);
	}
	const auto records = rolling::parse_forecasts_csv(read_file(forecasts_csv));
	const auto path = fluctuation::fluctuation_statistics(fluctuation::loss_differentials(records), fcfg);
	const auto text = fluctuation::format_fluctuation_csv(path);
	if (o.out.empty()) {
		std::cout << text;
	} else {
		fs::create_directories(o.out);
		const auto target = (fs::path(o.out) / "fluctuation.csv").string();
		write_file(target, text);
		std::cout << "wrote " << target << '\n';
	}
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Emotion indicators, quantile regressions and fluctuation tests for sovereign spreads"};
	// `--h` is the news lag, so help is long-form only.
	app.set_help_flag("--help", "Print this help message and exit");
	app.require_subcommand(1);

	Overrides o;
	struct Sub {
		const char *name;
		const char *help;
		pipeline::Stage stage;
	};
	const Sub stages[] = {
	    {"ingest", "Load market data and GKG records, filter and bucket articles", pipeline::Stage::Ingest},
	    {"emotions", "Build the daily emotion and LM indicators", pipeline::Stage::Emotions},
	    {"frame", "Write the regression frames for every (emotion, h)", pipeline::Stage::Frame},
	    {"rolling", "Rolling-window coefficient paths and pseudo-R1 differences", pipeline::Stage::Rolling},
	    {"forecast", "Out-of-sample check losses of both models", pipeline::Stage::Forecast},
	    {"run", "Full pipeline with sweep, events and manifest", pipeline::Stage::All},
	};
	std::map<CLI::App *, pipeline::Stage> stage_of;
	for (const auto &s : stages) {
		auto *cmd = app.add_subcommand(s.name, s.help);
		add_common(cmd, o);
		stage_of[cmd] = s.stage;
	}

	std::string forecasts_csv;
	auto *fluct = app.add_subcommand("fluctuation", "Fluctuation test on forecast losses");
	add_common(fluct, o, false);
	fluct->add_option("--forecasts", forecasts_csv, "Forecast CSV to test instead of running the pipeline")
	    ->check(CLI::ExistingFile);

	SimulateArgs sim;
	auto *simcmd = app.add_subcommand("simulate", "Write a synthetic market, GKG file, lexicon map and config");
	simcmd->add_option("--out", sim.out, "Directory for the synthetic inputs")->required();
	simcmd->add_option("--seed", sim.seed, "Random seed");
	simcmd->add_option("--days", sim.days, "Trading days");
	simcmd->add_option("--h", sim.h, "News lag in the data-generating process");
	simcmd->add_option("--gamma", sim.gamma, "Scale loading of the emotion indicator (>= 0)");
	simcmd->add_option("--theta", sim.theta, "Location loading of the emotion indicator");
	simcmd->add_option("--q", sim.q, "Quantile written to the config and truth file");
	simcmd->add_option("--errors", sim.errors, "Error law: normal or t");
	simcmd->add_option("--df", sim.df, "Degrees of freedom for t errors");

	std::string report_in;
	auto *report = app.add_subcommand("report", "Re-emit a report bundle with the event overlay and manifest");
	report->add_option("--in", report_in, "Directory written by an earlier run")->required();
	report->add_option("--out", o.out, "Destination directory")->required();
	report->add_option("--config", o.config, "Config supplying an events file")->check(CLI::ExistingFile);

	CLI11_PARSE(app, argc, argv);

	try {
		for (auto &[cmd, st] : stage_of)
			if (cmd->parsed())
				return run_stage(o, st);
		if (fluct->parsed()) {
			if (!forecasts_csv.empty())
				return run_fluctuation_file(o, forecasts_csv);
			if (o.config.empty())
				throw Error(ErrorCode::InvalidArgument, "fluctuation needs --config or --forecasts");
			return run_stage(o, pipeline::Stage::Fluctuation);
		}
		if (simcmd->parsed())
			return run_simulate(sim);
		if (report->parsed()) {
			auto bundle = pipeline::load_report_bundle(report_in);
			auto events = o.config.empty() ? pipeline::EventCalendar::defaults()
			                               : pipeline::load_events(pipeline::load_pipeline_config(o.config));
			auto files = pipeline::emit_report(bundle, events, o.out);
			std::cout << "wrote " << files.size() << " files to " << o.out << '\n';
			return 0;
		}
	} catch (const Error &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
