#include "emospread/error.hpp"
#include "emospread/pipeline.hpp"
#include "emospread/text.hpp"

#include "sim_inputs.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>

using namespace emospread;
using namespace emospread::pipeline;
namespace fs = std::filesystem;
using testing_support::scratch_dir;
using testing_support::write_sim_inputs;

namespace {

std::map<std::string, std::string> read_dir(const fs::path &dir) {
	std::map<std::string, std::string> out;
	for (const auto &e : fs::directory_iterator(dir))
		out[e.path().filename().string()] = read_file(e.path().string());
	return out;
}

} // namespace

TEST_CASE("config echo parses back to the same config") {
	auto dir = scratch_dir("cfg_roundtrip");
	auto cfg = write_sim_inputs(dir, 1, 120);
	cfg.h = {0, 2};
	cfg.window_T0_by_h = {{2, 40}};
	cfg.hac_bandwidth = 3;
	const auto text = cfg.to_json().dump();
	auto back = parse_pipeline_config(text, dir.string());
	CHECK(back.to_json().dump() == text);
	CHECK(back.window_for(2) == 40u);
	CHECK(!back.window_for(0).has_value());
	auto loaded = load_pipeline_config((dir / "config.json").string());
	CHECK(loaded.base_dir == dir.string());
	CHECK(loaded.resolve("market.csv") == (dir / "market.csv").string());
}

TEST_CASE("bad configs are rejected before any work") {
	auto dir = scratch_dir("cfg_bad");
	auto cfg = write_sim_inputs(dir, 2, 120);
	fs::remove(dir / "lexicon.json");
	CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("lexicon.json"), Error);
	CHECK_THROWS_AS(run_pipeline(cfg), Error);

	cfg = write_sim_inputs(dir, 2, 120);
	cfg.q = 1.0;
	CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("InvalidConfig"), Error);
	CHECK_THROWS_AS(parse_pipeline_config("{\"model\": {\"q\": \"high\"}}"), Error);
	CHECK_THROWS_AS(parse_pipeline_config("not json"), Error);
}

TEST_CASE("pipeline writes a verifiable bundle") {
	auto dir = scratch_dir("pipeline_full");
	auto cfg = write_sim_inputs(dir, 3, 300);
	auto bundle = run_pipeline(cfg);
	for (const char *name : {"descriptive_stats.csv", "articles.tsv", "daily_volume.csv", "emotion_distress.csv",
	                         "emotion_panic.csv", "frame_distress_h1.csv", "rolling_distress_h1.csv",
	                         "forecasts_distress_h1.csv", "fluctuation_panic_h1.csv"})
		CHECK_MESSAGE(bundle.files.count(name) == 1, name);

	const auto out = dir / "report";
	auto written = emit_report(bundle, load_events(cfg), out.string());
	CHECK(fs::exists(out / "manifest.json"));
	CHECK(fs::exists(out / "events.csv"));
	CHECK(written.size() == bundle.files.size() + 2);

	auto manifest = nlohmann::json::parse(read_file((out / "manifest.json").string()));
	for (const auto &[name, digest] : manifest.at("outputs").items())
		CHECK(digest.get<std::string>() == sha256_file((out / name).string()));
	CHECK(manifest.at("inputs").at("market_csv").at("sha256") == sha256_file((dir / "market.csv").string()));
	// Most default events fall after the simulated sample.
	CHECK(!manifest.at("report_warnings").empty());
	const auto events = read_file((out / "events.csv").string());
	for (const auto &e : EventCalendar::defaults().events)
		if (e.date > cfg.sample_end)
			CHECK(events.find(format_date(e.date)) == std::string::npos);

	// Re-emitting from the directory reproduces every byte.
	auto again = load_report_bundle(out.string());
	const auto re = dir / "reemit";
	emit_report(again, load_events(cfg), re.string());
	CHECK(read_dir(out) == read_dir(re));

	write_file((out / "rolling_distress_h1.csv").string(), "tampered\n");
	CHECK_THROWS_AS(load_report_bundle(out.string()), Error);
}

TEST_CASE("stages stop where asked") {
	auto dir = scratch_dir("pipeline_stage");
	auto cfg = write_sim_inputs(dir, 4, 200);
	auto ingest = run_pipeline(cfg, Stage::Ingest);
	CHECK(ingest.files.count("articles.tsv") == 1);
	CHECK(ingest.files.count("emotion_distress.csv") == 0);
	auto frames = run_pipeline(cfg, Stage::Frame);
	CHECK(frames.files.count("frame_distress_h1.csv") == 1);
	CHECK(frames.files.count("rolling_distress_h1.csv") == 0);
}

TEST_CASE("output directory precedence") {
	PipelineConfig cfg;
	cfg.output_dir = "from_config";
	unsetenv(kOutputDirEnv);
	CHECK(effective_output_dir(cfg) == "from_config");
	setenv(kOutputDirEnv, "from_env", 1);
	CHECK(effective_output_dir(cfg) == "from_env");
	CHECK(effective_output_dir(cfg, std::string("from_flag")) == "from_flag");
	unsetenv(kOutputDirEnv);
}

TEST_CASE("event calendar") {
	auto cal = EventCalendar::defaults();
	CHECK(cal.events.size() == 16);
	cal.validate();
	auto parsed = EventCalendar::parse_csv("id,date,label\n1,2018-05-29,Government crisis\n");
	REQUIRE(parsed.events.size() == 1);
	CHECK(parsed.events[0].date == make_date(2018, 5, 29));
	CHECK_THROWS_AS(EventCalendar::parse_csv("id,date,label\nx,2018-05-29,a\n"), Error);
}
