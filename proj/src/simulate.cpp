#include "emospread/simulate.hpp"

#include "emospread/error.hpp"
#include "emospread/random.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace emospread::simulate {

void DgpSpec::validate() const {
	if (days < 50)
		throw Error(ErrorCode::InvalidSpec, "need at least 50 simulated days");
	if (h < 0 || h > 5)
		throw Error(ErrorCode::InvalidSpec, "h must lie in {0,...,5}");
	if (gamma < 0.0)
		throw Error(ErrorCode::InvalidSpec, "gamma < 0 lets the noise scale 1 + gamma E turn non-positive");
	if (!(noise_scale > 0.0))
		throw Error(ErrorCode::InvalidSpec, "noise_scale must be positive");
	if (errors == ErrorDistribution::StudentT && !(t_df > 2.0))
		throw Error(ErrorCode::InvalidSpec, "Student-t errors need df > 2");
	for (const auto *p : {&emotion, &lm})
		if (!(std::abs(p->persistence) < 1.0) || p->innovation_sd < 0.0)
			throw Error(ErrorCode::InvalidSpec, "indicator process must be stationary");
	if (smoothing_window == 0)
		throw Error(ErrorCode::InvalidSpec, "smoothing window must be positive");
}

double DgpSpec::error_quantile(double q) const {
	if (!(q > 0.0 && q < 1.0))
		throw Error(ErrorCode::InvalidArgument, "quantile level outside (0,1)");
	if (errors == ErrorDistribution::StudentT)
		return boost::math::quantile(boost::math::students_t(t_df), q);
	return boost::math::quantile(boost::math::normal(), q);
}

std::map<std::string, double> DgpSpec::true_coefficients(double q) const {
	const double Q = noise_scale * error_quantile(q);
	return {{"intercept", intercept + Q}, {"d_spread", ar},       {"crd", beta_crd}, {"d_liq", beta_liq},
	        {"d_vstoxx", beta_vstoxx},   {"lm", lambda},          {"emotion", theta + gamma * Q}};
}

namespace {

std::vector<Date> simulated_calendar(const DgpSpec &spec) {
	ingest::TradingCalendar cal;
	std::vector<Date> out;
	Date d = spec.start;
	if (!cal.is_trading_day(d))
		d = cal.next_trading_day(d);
	while (out.size() < spec.days) {
		out.push_back(d);
		d = cal.next_trading_day(d);
	}
	return out;
}

std::vector<double> latent_shares(const IndicatorProcess &p, std::size_t n, Rng &rng) {
	std::normal_distribution<double> normal(0.0, 1.0);
	const double stationary_sd = p.innovation_sd / std::sqrt(1.0 - p.persistence * p.persistence);
	double x = stationary_sd * normal(rng);
	std::vector<double> out(n);
	for (std::size_t t = 0; t < n; ++t) {
		if (t > 0)
			x = p.persistence * x + p.innovation_sd * normal(rng);
		out[t] = std::min(1.0, std::exp(p.log_mean + x));
	}
	return out;
}

emotions::EmotionSeries direct_series(const std::string &name, const std::vector<Date> &dates,
                                      const std::vector<double> &shares, const emotions::EmotionSeriesConfig &cfg) {
	emotions::EmotionSeries s;
	s.emotion_name = name;
	s.dates = dates;
	s.wc_emotion.assign(dates.size(), 0);
	s.wc_total.assign(dates.size(), 0);
	s.raw_share.assign(shares.begin(), shares.end());
	emotions::recompute(s, cfg);
	return s;
}

std::uint64_t stochastic_round(double x, Rng &rng) {
	std::uniform_real_distribution<double> u(0.0, 1.0);
	return static_cast<std::uint64_t>(std::floor(x + u(rng)));
}

// Valid domestic articles carry the day's latent shares; decoys fail exactly
// one filter each and must not move the indicators.
std::vector<ingest::GkgRecord> emit_records(const DgpSpec &spec, const std::vector<Date> &days,
                                            const std::vector<double> &emo, const std::vector<double> &inert,
                                            const std::vector<double> &lm, Rng &rng) {
	using ingest::GkgRecord;
	const ingest::TradingCalendar cal;
	const auto outlets_set = ingest::default_outlet_allowlist(spec.country);
	const std::vector<std::string> outlets(outlets_set.begin(), outlets_set.end());
	const std::vector<std::string> themes = {"ECON_BONDS", "ECON_DEBT", "ECON_INTEREST_RATES", "ECON_STOCKMARKET",
	                                         "ECON_CENTRALBANK", "ECON_INFLATION", "ECON_TAXATION"};
	std::uniform_int_distribution<int> article_count(3, 6);
	std::uniform_int_distribution<int> decoy_count(0, 2);
	std::uniform_int_distribution<std::uint64_t> words(150, 900);
	std::uniform_int_distribution<int> minutes_open(cal.market_open_minutes, cal.market_close_minutes - 1);
	std::uniform_int_distribution<int> slot(0, 3);
	std::uniform_int_distribution<std::size_t> pick_outlet(0, outlets.size() - 1);
	std::uniform_int_distribution<int> theme_total(4, 7);

	const auto offset = std::chrono::hours(cal.timezone_offset_hours);
	std::vector<GkgRecord> out;
	for (std::size_t t = 0; t < days.size(); ++t) {
		const Date d = days[t];
		const int n_valid = article_count(rng);
		const int n_decoy = decoy_count(rng);
		for (int k = 0; k < n_valid + n_decoy; ++k) {
			GkgRecord r;
			r.record_id = "sim-" + format_date(d) + "-" + std::to_string(k);
			// Local publication time: mostly during market hours on d, else
			// after the previous close (or the weekend for Mondays).
			std::chrono::sys_seconds local;
			if (slot(rng) == 0) {
				const Date prev = d - std::chrono::days(1);
				local = std::chrono::sys_seconds(prev) + std::chrono::minutes(18 * 60 + 15);
			} else {
				local = std::chrono::sys_seconds(d) + std::chrono::minutes(minutes_open(rng));
			}
			r.published_at_utc = local - offset;
			r.outlet = outlets[pick_outlet(rng)];
			const int nt = theme_total(rng);
			for (int j = 0; j < nt; ++j)
				r.themes.push_back(themes[static_cast<std::size_t>(j)]);
			r.themes.push_back("TAX_FNCACT");
			r.locations = {{spec.country, 4}, {"DE", 1}};
			r.word_count = words(rng);
			r.word_count_missing = false;

			if (k >= n_valid) {
				switch ((t + static_cast<std::size_t>(k)) % 4) {
				case 0:
					r.word_count = 60;
					break;
				case 1:
					r.outlet = "Unlisted Daily";
					break;
				case 2:
					r.locations = {{spec.country, 1}, {"DE", 5}};
					break;
				default:
					r.themes = {"ECON_BONDS", "ECON_DEBT", "TAX_FNCACT"};
					break;
				}
			}
			const auto wc = static_cast<double>(r.word_count);
			r.gcam["wc"] = r.word_count;
			r.gcam[SyntheticVocabulary::emotion_key] = std::min(r.word_count, stochastic_round(emo[t] * wc, rng));
			r.gcam[SyntheticVocabulary::inert_key] = std::min(r.word_count, stochastic_round(inert[t] * wc, rng));
			r.gcam[SyntheticVocabulary::lm_key] = std::min(r.word_count, stochastic_round(lm[t] * wc, rng));
			out.push_back(std::move(r));
		}
	}
	return out;
}

} // namespace

std::string synthetic_lexicon_json(const DgpSpec &spec) {
	nlohmann::ordered_json j;
	j["lexicons"] = nlohmann::ordered_json::array(
	    {{{"name", spec.emotion_name}, {"gcam_keys", {SyntheticVocabulary::emotion_key}}},
	     {{"name", spec.inert_emotion_name}, {"gcam_keys", {SyntheticVocabulary::inert_key}}},
	     {{"name", spec.lm_name}, {"gcam_keys", {SyntheticVocabulary::lm_key}}}});
	return j.dump(2) + "\n";
}

ingest::ArticleFilterConfig synthetic_filter_config(const DgpSpec &spec) {
	ingest::ArticleFilterConfig cfg;
	cfg.theme_prefixes = {SyntheticVocabulary::theme_prefix};
	cfg.focus = ingest::FocusMode::domestic(spec.country);
	cfg.outlet_allowlist = ingest::default_outlet_allowlist(spec.country);
	return cfg;
}

SimulatedData simulate_dgp(const DgpSpec &spec, std::uint64_t seed) {
	spec.validate();
	const auto days = simulated_calendar(spec);
	const std::size_t n = days.size();

	Rng emo_rng = make_rng(seed, "emotion");
	Rng inert_rng = make_rng(seed, "inert");
	Rng lm_rng = make_rng(seed, "lm");
	const auto emo = latent_shares(spec.emotion, n, emo_rng);
	const auto inert = latent_shares(spec.emotion, n, inert_rng);
	const auto lm = latent_shares(spec.lm, n, lm_rng);

	emotions::EmotionSeriesConfig ecfg;
	ecfg.window = spec.smoothing_window;
	ecfg.scope = emotions::ScaleScope::FullSample;

	SimulatedData out;
	if (spec.emit_gkg) {
		Rng gkg_rng = make_rng(seed, "gkg");
		out.records = emit_records(spec, days, emo, inert, lm, gkg_rng);
		const auto selection = ingest::select_articles(out.records, synthetic_filter_config(spec), {});
		const auto lexicons = emotions::parse_lexicon_map(synthetic_lexicon_json(spec));
		const auto focus = ingest::FocusMode::domestic(spec.country).label();
		out.emotion = emotions::build_emotion_series(selection.buckets, days, lexicons.find(spec.emotion_name), ecfg,
		                                             spec.country, focus);
		out.inert_emotion = emotions::build_emotion_series(
		    selection.buckets, days, lexicons.find(spec.inert_emotion_name), ecfg, spec.country, focus);
		out.lm = emotions::build_emotion_series(selection.buckets, days, lexicons.find(spec.lm_name), ecfg,
		                                        spec.country, focus);
	} else {
		out.emotion = direct_series(spec.emotion_name, days, emo, ecfg);
		out.inert_emotion = direct_series(spec.inert_emotion_name, days, inert, ecfg);
		out.lm = direct_series(spec.lm_name, days, lm, ecfg);
	}

	auto &m = out.market;
	m.country = spec.country;
	m.dates = days;
	m.spread.resize(n);
	m.crd.resize(n);
	m.liq.resize(n);
	m.vstoxx.resize(n);

	Rng mkt = make_rng(seed, "market");
	Rng err = make_rng(seed, "errors");
	std::normal_distribution<double> normal(0.0, 1.0);
	std::student_t_distribution<double> student(spec.t_df);
	auto draw_error = [&] { return spec.errors == ErrorDistribution::StudentT ? student(err) : normal(err); };

	double liq = 0.3, vstoxx = 20.0;
	for (std::size_t t = 0; t < n; ++t) {
		m.crd[t] = 1.2 * normal(mkt);
		liq = 0.3 + 0.95 * (liq - 0.3) + 0.02 * normal(mkt);
		vstoxx = 20.0 + 0.97 * (vstoxx - 20.0) + normal(mkt);
		m.liq[t] = liq;
		m.vstoxx[t] = vstoxx;
	}

	const auto lag = static_cast<std::size_t>(spec.h);
	auto lagged = [&](const emotions::EmotionSeries &s, std::size_t t) {
		return t >= lag && s.standardized[t - lag] ? *s.standardized[t - lag] : 0.0;
	};
	m.spread[0] = 150.0;
	m.spread[1] = m.spread[0] + spec.intercept + spec.noise_scale * draw_error();
	for (std::size_t t = 1; t + 1 < n; ++t) {
		const double e = lagged(out.emotion, t);
		const double scale = 1.0 + spec.gamma * e;
		if (!(scale > 0.0))
			throw Error(ErrorCode::InvalidSpec, "noise scale became non-positive");
		const double ds = m.spread[t] - m.spread[t - 1];
		const double loc = spec.intercept + spec.ar * ds + spec.beta_crd * m.crd[t] +
		                   spec.beta_liq * (m.liq[t] - m.liq[t - 1]) +
		                   spec.beta_vstoxx * (m.vstoxx[t] - m.vstoxx[t - 1]) + spec.theta * e +
		                   spec.lambda * lagged(out.lm, t);
		m.spread[t + 1] = m.spread[t] + loc + scale * spec.noise_scale * draw_error();
	}
	return out;
}

} // namespace emospread::simulate
