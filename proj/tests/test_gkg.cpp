#include "emospread/error.hpp"
#include "emospread/gkg.hpp"

#include <doctest.h>

#include <sstream>

using namespace emospread;
using namespace emospread::ingest;

namespace {

std::string line_with(const std::string &date, const std::string &source, const std::string &themes,
                      const std::string &locations, const std::string &gcam) {
	std::vector<std::string> cols(27);
	cols[0] = "20170102-1";
	cols[1] = date;
	cols[3] = source;
	cols[7] = themes;
	cols[9] = locations;
	cols[17] = gcam;
	std::string out;
	for (std::size_t i = 0; i < cols.size(); ++i)
		out += (i ? "\t" : "") + cols[i];
	return out;
}

Timestamp local_time(int y, unsigned m, unsigned d, int hh, int mm, int ss = 0, int offset = 1) {
	return Timestamp(make_date(y, m, d)) + std::chrono::hours(hh - offset) + std::chrono::minutes(mm) +
	       std::chrono::seconds(ss);
}

GkgRecord located(std::vector<LocationMention> locs) {
	GkgRecord r;
	r.locations = std::move(locs);
	return r;
}

} // namespace

TEST_CASE("GCAM blobs") {
	auto g = parse_gcam("wc:250,c9.1:3,c12.1:7,c9.1:2");
	CHECK(g.at("wc") == 250);
	CHECK(g.at("c9.1") == 5);
	CHECK(parse_gcam("").empty());
	CHECK(format_gcam(parse_gcam("c1.1:4,wc:10")) == "c1.1:4,wc:10");
	CHECK_THROWS_WITH_AS(parse_gcam("wc:ten"), doctest::Contains("BadGcam"), Error);
	CHECK_THROWS_WITH_AS(parse_gcam("wc"), doctest::Contains("BadGcam"), Error);
}

TEST_CASE("GKG line parsing") {
	GkgSchema schema;
	auto rec = parse_gkg_line(line_with("20170102103000", "Ansa", "ECON_BONDS,12;ECON_DEBT;;TAX_FNCACT,88",
	                                    "1#Rome#IT#IT;1#Milan#IT#IT;1#Berlin#GM#DE",
	                                    "wc:320,c9.1:4,v10.1:0.53"),
	                          schema);
	CHECK(rec.outlet == "Ansa");
	CHECK(rec.themes == std::vector<std::string>{"ECON_BONDS", "ECON_DEBT", "TAX_FNCACT"});
	REQUIRE(rec.locations.size() == 2);
	CHECK(rec.locations[0] == LocationMention{"IT", 2});
	CHECK(rec.word_count == 320);
	CHECK(!rec.word_count_missing);
	CHECK(rec.gcam.count("v10.1") == 0);

	auto no_wc = parse_gkg_line(line_with("20170102103000", "Ansa", "", "", "c9.1:4"), schema);
	CHECK(no_wc.word_count_missing);

	CHECK_THROWS_WITH_AS(parse_gkg_line("a\tb", schema), doctest::Contains("MalformedLine"), Error);
	CHECK_THROWS_WITH_AS(parse_gkg_line(line_with("2017010210", "Ansa", "", "", ""), schema),
	                     doctest::Contains("BadTimestamp"), Error);
}

TEST_CASE("format and parse are inverse") {
	GkgSchema schema;
	GkgRecord r;
	r.record_id = "x-1";
	r.published_at_utc = local_time(2018, 5, 29, 12, 0);
	r.outlet = "Il Sole 24 Ore";
	r.themes = {"ECON_BONDS", "ECON_DEBT"};
	r.locations = {{"IT", 3}, {"ES", 1}};
	r.gcam = {{"wc", 400}, {"c9.1", 7}};
	r.word_count = 400;
	r.word_count_missing = false;
	CHECK(parse_gkg_line(format_gkg_line(r, schema), schema) == r);
}

TEST_CASE("stream parsing counts malformed lines and keeps order across shards") {
	GkgSchema schema;
	std::ostringstream text;
	for (int i = 0; i < 20; ++i) {
		if (i % 7 == 3)
			text << "broken line\n";
		else
			text << line_with("20170102103000", "S" + std::to_string(i), "", "", "wc:100") << "\n";
	}
	std::istringstream a(text.str()), b(text.str());
	auto one = read_gkg_stream(a, schema, 1);
	auto four = read_gkg_stream(b, schema, 4);
	CHECK(one.malformed == 3);
	CHECK(one.records.size() == 17);
	CHECK(one.records == four.records);
	CHECK(four.issues.size() == 3);
}

TEST_CASE("main location needs strict dominance") {
	CHECK(infer_main_location(located({{"IT", 3}, {"ES", 1}})) == "IT");
	CHECK(!infer_main_location(located({{"IT", 2}, {"ES", 2}})));
	CHECK(!infer_main_location(located({})));

	ArticleFilterConfig dom;
	dom.outlet_allowlist = {"x"};
	dom.theme_prefixes = {"ECON_"};
	ArticleFilterConfig paired = dom;
	paired.focus = FocusMode::paired("IT", "ES");
	CHECK(passes_focus(located({{"IT", 3}}), dom));
	CHECK(!passes_focus(located({{"ES", 3}}), dom));
	CHECK(passes_focus(located({{"ES", 3}}), paired));
	CHECK(passes_focus(located({{"IT", 2}, {"ES", 2}}), paired));
	CHECK(!passes_focus(located({{"IT", 2}, {"ES", 2}}), dom));
	CHECK(!passes_focus(located({{"IT", 2}, {"FR", 2}}), paired));
	CHECK(!passes_focus(located({{"IT", 2}, {"ES", 2}, {"FR", 2}}), paired));
}

TEST_CASE("length, outlet and theme rules") {
	ArticleFilterConfig cfg;
	cfg.outlet_allowlist = {"Il Sole 24 Ore"};
	cfg.theme_prefixes = {"ECON_", "WB_1104"};
	GkgRecord r;
	r.word_count_missing = false;
	r.word_count = 100;
	CHECK(passes_length(r, cfg));
	r.word_count = 99;
	CHECK(!passes_length(r, cfg));
	r.word_count = 500;
	r.word_count_missing = true;
	CHECK(!passes_length(r, cfg));

	r.outlet = "IL SOLE 24 ORE ";
	CHECK(passes_outlet(r, cfg));
	r.outlet = "Il Sole";
	CHECK(!passes_outlet(r, cfg));

	r.themes = {"ECON_BONDS", "ECON_BONDS", "WB_1104_MACRO", "TAX_X"};
	CHECK(!passes_theme_filter(r, cfg));
	r.themes.push_back("ECON_DEBT");
	CHECK(passes_theme_filter(r, cfg));
}

TEST_CASE("trading-day assignment") {
	TradingCalendar cal;
	cal.holidays = {make_date(2017, 4, 17), make_date(2016, 12, 26)};
	// Wednesday within hours, before the open, at and after the close.
	CHECK(assign_trading_day(local_time(2017, 3, 1, 12, 0), cal) == make_date(2017, 3, 1));
	CHECK(assign_trading_day(local_time(2017, 3, 1, 7, 0), cal) == make_date(2017, 3, 1));
	CHECK(assign_trading_day(local_time(2017, 3, 1, 17, 30, 0), cal) == make_date(2017, 3, 1));
	CHECK(assign_trading_day(local_time(2017, 3, 1, 17, 30, 1), cal) == make_date(2017, 3, 2));
	// Friday evening and the weekend go to Monday.
	CHECK(assign_trading_day(local_time(2017, 3, 3, 20, 0), cal) == make_date(2017, 3, 6));
	CHECK(assign_trading_day(local_time(2017, 3, 4, 10, 0), cal) == make_date(2017, 3, 6));
	CHECK(assign_trading_day(local_time(2017, 3, 5, 23, 0), cal) == make_date(2017, 3, 6));
	// UTC late Sunday is already Monday locally.
	CHECK(assign_trading_day(Timestamp(make_date(2017, 3, 5)) + std::chrono::hours(23) + std::chrono::minutes(30),
	                         cal) == make_date(2017, 3, 6));
	// Holidays and weekends before a holiday Monday are dropped.
	CHECK(!assign_trading_day(local_time(2017, 4, 17, 11, 0), cal));
	CHECK(!assign_trading_day(local_time(2017, 4, 15, 11, 0), cal));
	// Thursday after the close skips a Friday holiday.
	cal.holidays.insert(make_date(2017, 3, 10));
	CHECK(assign_trading_day(local_time(2017, 3, 9, 18, 0), cal) == make_date(2017, 3, 13));
}

TEST_CASE("calendar validation") {
	TradingCalendar cal;
	cal.market_open_minutes = 18 * 60;
	CHECK_THROWS_AS(cal.validate(), Error);
	TradingCalendar weekend;
	weekend.holidays = {make_date(2017, 3, 4)};
	CHECK_THROWS_AS(weekend.validate(), Error);
	TradingCalendar ok;
	CHECK(ok.trading_days(make_date(2017, 3, 1), make_date(2017, 3, 7)).size() == 5);
}

TEST_CASE("filter config validation") {
	ArticleFilterConfig cfg;
	cfg.theme_prefixes = {"ECON_"};
	CHECK_THROWS_AS(cfg.validate(), Error); // empty allow-list
	cfg.outlet_allowlist = default_outlet_allowlist("IT");
	CHECK_NOTHROW(cfg.validate());
	cfg.min_words = 0;
	CHECK_THROWS_AS(cfg.validate(), Error);
	CHECK(!default_outlet_allowlist("ES").empty());
}

TEST_CASE("source gaps flag collapses against the trailing median") {
	TradingCalendar cal;
	auto days = cal.trading_days(make_date(2017, 1, 2), make_date(2017, 2, 28));
	std::map<Date, std::size_t> counts;
	for (auto d : days)
		counts[d] = 10;
	counts[days[30]] = 2;
	counts.erase(days[35]);
	auto gaps = detect_source_gaps(days, counts, 20, 0.5);
	REQUIRE(gaps.size() == 2);
	CHECK(gaps[0].date == days[30]);
	CHECK(gaps[1].count == 0);
	CHECK(format_daily_volume_csv(days, counts).rfind("date,count\n", 0) == 0);
}
