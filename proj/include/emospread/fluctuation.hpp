#pragma once

// Rolling Diebold-Mariano (fluctuation) test on check-loss differentials.

#include "emospread/date.hpp"
#include "emospread/rolling.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emospread::fluctuation {

struct LrvEstimate {
	double value = 0.0;
	bool non_positive = false; // raw Bartlett sum was <= 0 and got truncated
};

/// Newey-West long-run variance with Bartlett weights; autocovariances are
/// taken about the sample mean with denominator n.
LrvEstimate hac_lrv(const std::vector<double> &series, std::size_t bandwidth);

/// floor(1.3 m^(1/3))
std::size_t auto_bandwidth(std::size_t m);

/// mean(d) / sqrt(lrv / n). Throws ZeroVariance when lrv <= 0.
double dm_statistic(const std::vector<double> &d, double lrv);

struct LossDifferentialSeries {
	std::vector<Date> dates;
	std::vector<double> d; // loss_augmented - loss_benchmark

	std::size_t n_oos() const { return d.size(); }
};

LossDifferentialSeries loss_differentials(const std::vector<rolling::ForecastRecord> &records);

enum class Verdict { AugmentedBetter, BenchmarkBetter, Inconclusive };
std::string_view to_string(Verdict v);

struct FluctuationConfig {
	double mu = 0.30;
	std::optional<std::size_t> hac_bandwidth; // nullopt: auto rule on m
	double alpha = 0.05;
	std::optional<double> critical_value; // nullopt: bundled table
	bool per_window_variance = false;
	bool interpolate_mu = false;

	std::size_t window_length(std::size_t n_oos) const;
	std::size_t bandwidth(std::size_t m) const;
	void validate(std::size_t n_oos) const;
};

struct FluctuationPoint {
	Date date{};
	std::size_t window_end = 0; // index into the differential series
	double statistic = 0.0;
	Verdict verdict = Verdict::Inconclusive;
};

struct FluctuationPath {
	std::size_t m = 0;
	std::size_t bandwidth = 0;
	double sigma = 0.0;
	double critical_value = 0.0;
	bool sigma_truncated = false;
	std::vector<FluctuationPoint> points;

	bool any(Verdict v) const;
};

/// F_j = sum of the m differentials ending at j, over sigma * sqrt(m).
/// Throws ZeroVariance when sigma is zero.
FluctuationPath fluctuation_statistics(const LossDifferentialSeries &d, const FluctuationConfig &cfg);

/// Swaps verdicts as if the two models had been exchanged.
Verdict mirrored(Verdict v);

std::string format_fluctuation_csv(const FluctuationPath &path);

// Critical values ------------------------------------------------------

/// Rows with n == kAsymptoticLength hold the long-sample values, simulated
/// with known unit variance. Other rows estimate sigma as the test does.
inline constexpr std::size_t kAsymptoticLength = 10000;

struct CriticalValueRow {
	double mu = 0.0;
	double alpha = 0.0;
	std::size_t n = 0;
	double cv = 0.0;
};

struct CriticalValueTable {
	std::vector<std::string> header_comments;
	std::vector<CriticalValueRow> rows;

	static CriticalValueTable parse(std::string_view csv_text);
	/// The table compiled into the library.
	static const CriticalValueTable &bundled();

	/// Exact-n rows win; otherwise the asymptotic row. Off-grid mu is
	/// interpolated linearly when allowed, else UnsupportedMu.
	double lookup(double mu, double alpha, std::size_t n_oos, bool interpolate = false) const;
	std::string format() const;
};

double critical_value(double mu, double alpha, std::size_t n_oos, bool interpolate = false);

struct SupSimulation {
	double mu = 0.30;
	std::size_t n = kAsymptoticLength;
	std::size_t paths = 100000;
	std::uint64_t seed = 0;
	bool known_variance = true;
	unsigned threads = 1;
};

/// Sup over windows of |F_j| for iid N(0,1) paths, one reproducible stream
/// per path.
std::vector<double> simulate_sup_statistics(const SupSimulation &sim);

/// (1 - alpha) lower empirical quantile of simulated sup statistics.
double monte_carlo_critical_value(const SupSimulation &sim, double alpha);

/// Same statistic for several mu values sharing each simulated path.
/// Result is indexed [mu][path].
std::vector<std::vector<double>> simulate_sup_statistics(const std::vector<double> &mus, std::size_t n,
                                                         std::size_t paths, std::uint64_t seed,
                                                         bool known_variance, unsigned threads = 1);

} // namespace emospread::fluctuation
