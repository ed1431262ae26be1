#pragma once

// End-to-end orchestration: ingest, indicators, frames, rolling fits,
// out-of-sample losses and fluctuation tests, then report emission.

#include "emospread/config.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emospread::pipeline {

struct Event {
	int id = 0;
	Date date{};
	std::string label;
};

struct EventCalendar {
	std::vector<Event> events;

	/// The sixteen stress events used for figure overlays.
	static EventCalendar defaults();
	/// `id,date,label`
	static EventCalendar parse_csv(std::string_view text);
	void validate() const;
};

/// Stages in execution order; a run stops after `last`.
enum class Stage { Ingest, Emotions, Frame, Rolling, Forecast, Fluctuation, All };

struct ReportBundle {
	std::map<std::string, std::string> files; // file name -> contents
	std::vector<std::string> warnings;
	nlohmann::ordered_json config_echo;
	nlohmann::ordered_json inputs;  // path and digest per input
	nlohmann::ordered_json summary; // counts and verdict tallies
	Date sample_start{};
	Date sample_end{};
};

/// Throws Error(StageFailure) naming the stage and input on fatal errors.
ReportBundle run_pipeline(const PipelineConfig &cfg, Stage last = Stage::All);

/// Writes every bundle file, events.csv and manifest.json. Events outside
/// the sample are dropped with a warning. Returns the written file names.
std::vector<std::string> emit_report(const ReportBundle &bundle, const EventCalendar &events,
                                     const std::string &out_dir);

/// Reads a previously emitted directory back into a bundle (all CSV files
/// except events.csv; config and warnings from its manifest).
ReportBundle load_report_bundle(const std::string &dir);

/// CLI flag wins, then the environment override, then the config value.
std::string effective_output_dir(const PipelineConfig &cfg, const std::optional<std::string> &cli_override = {});

EventCalendar load_events(const PipelineConfig &cfg);

} // namespace emospread::pipeline
