#include "emospread/emotion.hpp"
#include "emospread/error.hpp"
#include "emospread/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace emospread;
using namespace emospread::emotions;
using ingest::GkgRecord;

namespace {

GkgRecord article(std::uint64_t words, std::map<std::string, std::uint64_t> gcam) {
	GkgRecord r;
	r.word_count = words;
	r.word_count_missing = false;
	r.gcam = std::move(gcam);
	r.gcam["wc"] = words;
	return r;
}

LexiconMap lexicon(std::string name, std::set<std::string> keys) {
	LexiconMap lex;
	lex.name = std::move(name);
	lex.gcam_keys = std::move(keys);
	return lex;
}

OptionalSeries random_shares(Rng &rng, std::size_t n, double missing = 0.0) {
	std::uniform_real_distribution<double> u(0.0, 0.1);
	std::bernoulli_distribution gap(missing);
	OptionalSeries out(n);
	for (auto &x : out)
		if (!gap(rng))
			x = u(rng);
	return out;
}

} // namespace

TEST_CASE("daily share is summed emotion words over summed words") {
	std::vector<GkgRecord> day = {article(100, {{"c9.1", 3}}), article(150, {{"c9.1", 2}})};
	auto row = daily_emotion_share(day, lexicon("Distress", {"c9.1"}));
	CHECK(row.wc_emotion == 5);
	CHECK(row.wc_total == 250);
	CHECK(row.share() == doctest::Approx(0.02));
	CHECK(daily_emotion_share(day, lexicon("Other", {"c1.1"})).share() == 0.0);
}

TEST_CASE("daily share against a flattened recount") {
	Rng rng(17);
	std::uniform_int_distribution<std::uint64_t> words(100, 900), hits(0, 20);
	const std::vector<std::string> keys = {"c1.1", "c1.2", "c2.7", "c9.9"};
	auto lex = lexicon("L", {"c1.1", "c2.7"});
	for (int rep = 0; rep < 30; ++rep) {
		std::vector<GkgRecord> day;
		std::uint64_t e = 0, t = 0;
		for (int k = 0; k < 1 + rep % 7; ++k) {
			std::map<std::string, std::uint64_t> g;
			for (const auto &key : keys)
				g[key] = hits(rng);
			auto r = article(words(rng), g);
			day.push_back(r);
			for (const auto &[key, count] : r.gcam)
				if (key == "c1.1" || key == "c2.7")
					e += count;
			t += r.word_count;
		}
		auto row = daily_emotion_share(day, lex);
		CHECK(row.wc_emotion == e);
		CHECK(row.wc_total == t);
	}
}

TEST_CASE("empty and wordless days are errors") {
	auto lex = lexicon("L", {"c1.1"});
	CHECK_THROWS_WITH_AS(daily_emotion_share({}, lex), doctest::Contains("EmptyDay"), Error);
	CHECK_THROWS_WITH_AS(daily_emotion_share({article(0, {})}, lex), doctest::Contains("ZeroDenominator"), Error);
}

TEST_CASE("LM key set containing the emotion keys never gives a smaller share") {
	Rng rng(23);
	std::uniform_int_distribution<std::uint64_t> hits(0, 10);
	auto emo = lexicon("E", {"c9.1"});
	auto lm = lexicon("LM", {"c9.1", "c6.4"});
	for (int rep = 0; rep < 40; ++rep) {
		std::vector<GkgRecord> day = {article(200, {{"c9.1", hits(rng)}, {"c6.4", hits(rng)}}),
		                              article(300, {{"c9.1", hits(rng)}, {"c6.4", hits(rng)}})};
		CHECK(daily_emotion_share(day, lm).share() >= daily_emotion_share(day, emo).share());
	}
}

TEST_CASE("smoothing matches window means") {
	OptionalSeries five = {0.01, 0.02, 0.03, 0.04, 0.05};
	auto s = smooth(five, 5);
	CHECK(!s[3]);
	CHECK(*s[4] == doctest::Approx(0.03));
	OptionalSeries constant(12, 0.4);
	for (auto v : smooth(constant, 4))
		if (v)
			CHECK(*v == doctest::Approx(0.4));
	CHECK_THROWS_WITH_AS(smooth(five, 6), doctest::Contains("WindowTooLong"), Error);
}

TEST_CASE("missing days drop windows unless carried forward") {
	OptionalSeries x = {1.0, 2.0, std::nullopt, 4.0, 5.0, 6.0};
	auto strict = smooth(x, 2);
	CHECK(*strict[1] == doctest::Approx(1.5));
	CHECK(!strict[2]);
	CHECK(!strict[3]);
	CHECK(*strict[4] == doctest::Approx(4.5));
	auto carried = smooth(x, 2, true);
	CHECK(*carried[2] == doctest::Approx(1.5)); // the gap day reuses the last two values
	CHECK(*carried[3] == doctest::Approx(3.0)); // mean of 2 and 4
}

TEST_CASE("smoothing is linear") {
	Rng rng(29);
	auto a = random_shares(rng, 60, 0.0);
	auto b = random_shares(rng, 60, 0.0);
	OptionalSeries mix(60);
	for (std::size_t i = 0; i < 60; ++i)
		mix[i] = 2.0 * *a[i] - 0.5 * *b[i];
	auto sa = smooth(a, 5), sb = smooth(b, 5), sm = smooth(mix, 5);
	for (std::size_t i = 4; i < 60; ++i)
		CHECK(*sm[i] == doctest::Approx(2.0 * *sa[i] - 0.5 * *sb[i]).epsilon(1e-12));
}

TEST_CASE("standardize divides by the sample sd of the scope") {
	OptionalSeries x = {1.0, 3.0, std::nullopt, 5.0, 7.0};
	auto full = standardize(x, ScaleScope::FullSample);
	CHECK(full.scale == doctest::Approx(oracle::sample_sd({1, 3, 5, 7})));
	CHECK(!full.values[2]);
	CHECK(*full.values[3] == doctest::Approx(5.0 / full.scale));

	auto est = standardize(x, ScaleScope::EstimationWindow, std::make_pair<std::size_t, std::size_t>(0, 2));
	CHECK(est.scale == doctest::Approx(oracle::sample_sd({1, 3})));
	CHECK(*est.values[4] == doctest::Approx(7.0 / est.scale));

	OptionalSeries doubled = {0.0, 4.0, 0.0, 4.0};
	auto d = standardize(doubled, ScaleScope::FullSample);
	std::vector<double> vals;
	for (auto v : d.values)
		vals.push_back(*v);
	CHECK(oracle::sample_sd(vals) == doctest::Approx(1.0).epsilon(1e-12));
	CHECK_THROWS_WITH_AS(standardize(OptionalSeries(5, 2.0), ScaleScope::FullSample),
	                     doctest::Contains("DegenerateSeries"), Error);
}

TEST_CASE("standardization preserves sign and order") {
	Rng rng(31);
	auto x = random_shares(rng, 40);
	auto s = standardize(x, ScaleScope::FullSample);
	for (std::size_t i = 1; i < x.size(); ++i)
		CHECK((*x[i] < *x[i - 1]) == (*s.values[i] < *s.values[i - 1]));
}

TEST_CASE("series build over trading days with a missing day") {
	const Date d0 = make_date(2017, 1, 2);
	std::vector<Date> days;
	for (int k = 0; k < 8; ++k)
		days.push_back(d0 + std::chrono::days(k));
	std::map<Date, std::vector<GkgRecord>> bundles;
	for (int k = 0; k < 8; ++k)
		if (k != 5)
			bundles[days[static_cast<std::size_t>(k)]] = {article(100, {{"c9.1", static_cast<std::uint64_t>(k + 1)}})};
	EmotionSeriesConfig cfg;
	cfg.window = 3;
	auto s = build_emotion_series(bundles, days, lexicon("Distress", {"c9.1"}), cfg, "IT", "domestic_IT");
	CHECK(!s.raw_share[5]);
	CHECK(*s.smoothed[4] == doctest::Approx((0.03 + 0.04 + 0.05) / 3));
	CHECK(!s.smoothed[5]);
	CHECK(!s.smoothed[7]);
	CHECK(s.value_at(days[4]).has_value());

	auto csv = format_emotion_csv(s);
	auto back = parse_emotion_csv(csv, "Distress");
	CHECK(back.dates == s.dates);
	CHECK(back.raw_share == s.raw_share);
	CHECK(back.standardized == s.standardized);
}

TEST_CASE("lexicon map parsing and raw word counting") {
	auto cfg = parse_lexicon_map(R"({"lexicons": [{"name": "Panic", "gcam_keys": ["c9.2"]},
	                                              {"name": "LMNegative", "words": ["Loss", "default"]}]})");
	CHECK(cfg.find("Panic").gcam_keys.count("c9.2") == 1);
	CHECK(count_lexicon_words("A loss, then DEFAULT and losses.", cfg.find("LMNegative").raw_words) == 2);
	CHECK_THROWS_AS(cfg.find("Missing"), Error);
	CHECK_THROWS_AS(parse_lexicon_map("{}"), Error);
	CHECK_THROWS_AS(parse_lexicon_map(R"({"lexicons": [{"name": "Empty"}]})"), Error);
	CHECK_THROWS_AS(load_lexicon_map("/nonexistent/lexicon.json"), Error);
}
