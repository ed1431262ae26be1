#pragma once

// Synthetic markets and news with a known conditional-quantile structure:
//
//   dS[t+1] = a + d0 dS[t] + d1 crd[t] + d2 dLiq[t] + d3 dVstoxx[t]
//             + theta E[t-h] + lambda LM[t-h] + (1 + gamma E[t-h]) eps[t+1]
//
// so the q-quantile coefficient on E is theta + gamma Q_eps(q).

#include "emospread/emotion.hpp"
#include "emospread/gkg.hpp"
#include "emospread/market.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace emospread::simulate {

enum class ErrorDistribution { Normal, StudentT };

struct IndicatorProcess {
	double log_mean = -4.0; // mean of the log share
	double persistence = 0.9;
	double innovation_sd = 0.3;
};

struct DgpSpec {
	std::size_t days = 1000; // trading days
	Date start = make_date(2015, 3, 2);
	int h = 1;

	double intercept = 0.0;
	double ar = 0.1;
	double beta_crd = -0.5;
	double beta_liq = 0.3;
	double beta_vstoxx = 0.2;
	double theta = 0.0;
	double lambda = 0.0;
	double gamma = 0.5;
	double noise_scale = 1.0;
	ErrorDistribution errors = ErrorDistribution::Normal;
	double t_df = 5.0;

	IndicatorProcess emotion;
	IndicatorProcess lm{-3.0, 0.9, 0.2};
	std::size_t smoothing_window = 5;

	/// Route the indicators through synthetic GKG records, article
	/// selection and the daily share formula instead of building them directly.
	bool emit_gkg = false;
	std::string country = "IT";
	std::string emotion_name = "Distress";
	std::string inert_emotion_name = "Panic"; // present in the news, absent from the DGP
	std::string lm_name = "LMNegative";

	void validate() const;
	/// Q_eps(q) for the declared error law, before noise_scale.
	double error_quantile(double q) const;
	/// Conditional q-quantile coefficients keyed by frame column name.
	std::map<std::string, double> true_coefficients(double q) const;
};

struct SimulatedData {
	market::MarketSeries market;
	emotions::EmotionSeries emotion;
	emotions::EmotionSeries inert_emotion;
	emotions::EmotionSeries lm;
	std::vector<ingest::GkgRecord> records; // only with emit_gkg
};

SimulatedData simulate_dgp(const DgpSpec &spec, std::uint64_t seed);

/// GCAM keys and theme codes written by the GKG emitter.
struct SyntheticVocabulary {
	static constexpr const char *emotion_key = "c9.1";
	static constexpr const char *inert_key = "c9.2";
	static constexpr const char *lm_key = "c6.4";
	static constexpr const char *theme_prefix = "ECON_";
};

/// Lexicon map matching the emitter's GCAM keys.
std::string synthetic_lexicon_json(const DgpSpec &spec);
/// Filter config that the emitted domestic articles satisfy.
ingest::ArticleFilterConfig synthetic_filter_config(const DgpSpec &spec);

} // namespace emospread::simulate
