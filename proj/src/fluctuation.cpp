#include "emospread/fluctuation.hpp"

#include "emospread/error.hpp"
#include "emospread/parallel.hpp"
#include "emospread/quantreg.hpp"
#include "emospread/random.hpp"
#include "emospread/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace emospread::fluctuation {

LrvEstimate hac_lrv(const std::vector<double> &series, std::size_t bandwidth) {
	const std::size_t n = series.size();
	if (n < 2)
		throw Error(ErrorCode::TooShort, "long-run variance needs at least 2 observations");
	double mean = 0.0;
	for (double x : series)
		mean += x;
	mean /= static_cast<double>(n);
	std::vector<double> z(n);
	for (std::size_t i = 0; i < n; ++i)
		z[i] = series[i] - mean;

	const std::size_t L = std::min(bandwidth, n - 1);
	double lrv = 0.0;
	for (std::size_t j = 0; j <= L; ++j) {
		double g = 0.0;
		for (std::size_t t = j; t < n; ++t)
			g += z[t] * z[t - j];
		g /= static_cast<double>(n);
		lrv += j == 0 ? g : 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(bandwidth + 1)) * g;
	}
	if (lrv <= 0.0)
		return {0.0, true};
	return {lrv, false};
}

std::size_t auto_bandwidth(std::size_t m) {
	return static_cast<std::size_t>(std::floor(1.3 * std::cbrt(static_cast<double>(m))));
}

double dm_statistic(const std::vector<double> &d, double lrv) {
	if (d.empty())
		throw Error(ErrorCode::TooShort, "empty loss differential");
	if (!(lrv > 0.0))
		throw Error(ErrorCode::ZeroVariance, "loss differential has zero long-run variance");
	double mean = 0.0;
	for (double x : d)
		mean += x;
	mean /= static_cast<double>(d.size());
	return mean / std::sqrt(lrv / static_cast<double>(d.size()));
}

LossDifferentialSeries loss_differentials(const std::vector<rolling::ForecastRecord> &records) {
	LossDifferentialSeries out;
	for (const auto &r : records) {
		const double d = r.loss_augmented - r.loss_benchmark;
		if (!std::isfinite(d))
			throw Error(ErrorCode::InvalidArgument, "non-finite loss differential on " + format_date(r.target_date));
		out.dates.push_back(r.target_date);
		out.d.push_back(d);
	}
	return out;
}

std::string_view to_string(Verdict v) {
	switch (v) {
	case Verdict::AugmentedBetter:
		return "AugmentedBetter";
	case Verdict::BenchmarkBetter:
		return "BenchmarkBetter";
	case Verdict::Inconclusive:
		return "Inconclusive";
	}
	return "Inconclusive";
}

Verdict mirrored(Verdict v) {
	if (v == Verdict::AugmentedBetter)
		return Verdict::BenchmarkBetter;
	if (v == Verdict::BenchmarkBetter)
		return Verdict::AugmentedBetter;
	return v;
}

std::size_t FluctuationConfig::window_length(std::size_t n_oos) const {
	return static_cast<std::size_t>(std::llround(mu * static_cast<double>(n_oos)));
}

std::size_t FluctuationConfig::bandwidth(std::size_t m) const {
	return hac_bandwidth ? *hac_bandwidth : auto_bandwidth(m);
}

void FluctuationConfig::validate(std::size_t n_oos) const {
	if (!(mu > 0.0 && mu < 1.0))
		throw Error(ErrorCode::InvalidConfig, "mu must lie in (0,1)");
	if (!(alpha > 0.0 && alpha < 1.0))
		throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0,1)");
	if (critical_value && !(*critical_value > 0.0))
		throw Error(ErrorCode::InvalidConfig, "critical value must be positive");
	const auto m = window_length(n_oos);
	if (m < 5)
		throw Error(ErrorCode::TooShort, "evaluation window m=" + std::to_string(m) + " is below 5");
	if (m > n_oos)
		throw Error(ErrorCode::TooShort, "evaluation window longer than the series");
}

bool FluctuationPath::any(Verdict v) const {
	return std::any_of(points.begin(), points.end(), [v](const auto &p) { return p.verdict == v; });
}

FluctuationPath fluctuation_statistics(const LossDifferentialSeries &d, const FluctuationConfig &cfg) {
	const std::size_t n = d.n_oos();
	cfg.validate(n);
	FluctuationPath path;
	path.m = cfg.window_length(n);
	path.bandwidth = cfg.bandwidth(path.m);
	path.critical_value = cfg.critical_value ? *cfg.critical_value
	                                         : critical_value(cfg.mu, cfg.alpha, n, cfg.interpolate_mu);

	const std::size_t m = path.m;
	const double root_m = std::sqrt(static_cast<double>(m));
	if (!cfg.per_window_variance) {
		const auto lrv = hac_lrv(d.d, path.bandwidth);
		path.sigma_truncated = lrv.non_positive;
		path.sigma = std::sqrt(lrv.value);
		if (!(path.sigma > 0.0))
			throw Error(ErrorCode::ZeroVariance, "loss differential has zero long-run variance");
	}

	for (std::size_t j = m - 1; j < n; ++j) {
		double sigma = path.sigma;
		if (cfg.per_window_variance) {
			std::vector<double> w(d.d.begin() + static_cast<std::ptrdiff_t>(j + 1 - m),
			                      d.d.begin() + static_cast<std::ptrdiff_t>(j + 1));
			sigma = std::sqrt(hac_lrv(w, path.bandwidth).value);
			if (!(sigma > 0.0))
				throw Error(ErrorCode::ZeroVariance, "zero long-run variance in window ending at index " +
				                                         std::to_string(j));
		}
		// Summed afresh per window: no drift from a running update, and
		// negating d negates F exactly.
		double window_sum = 0.0;
		for (std::size_t i = j + 1 - m; i <= j; ++i)
			window_sum += d.d[i];

		FluctuationPoint p;
		p.window_end = j;
		p.date = j < d.dates.size() ? d.dates[j] : Date{};
		p.statistic = window_sum / (sigma * root_m);
		if (p.statistic < -path.critical_value)
			p.verdict = Verdict::AugmentedBetter;
		else if (p.statistic > path.critical_value)
			p.verdict = Verdict::BenchmarkBetter;
		path.points.push_back(p);
	}
	return path;
}

std::string format_fluctuation_csv(const FluctuationPath &path) {
	std::ostringstream out;
	out << "date,F,cv_lower,cv_upper,verdict\n";
	const auto lo = format_double(-path.critical_value);
	const auto hi = format_double(path.critical_value);
	for (const auto &p : path.points)
		out << format_date(p.date) << ',' << format_double(p.statistic) << ',' << lo << ',' << hi << ','
		    << to_string(p.verdict) << '\n';
	return out.str();
}

// Critical values ------------------------------------------------------

namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

} // namespace

CriticalValueTable CriticalValueTable::parse(std::string_view csv_text) {
	CriticalValueTable table;
	bool header_seen = false;
	std::size_t line_no = 0;
	for (auto raw : split(csv_text, '\n')) {
		++line_no;
		auto line = trim(raw);
		if (line.empty())
			continue;
		if (line.front() == '#') {
			table.header_comments.emplace_back(trim(line.substr(1)));
			continue;
		}
		if (!header_seen) {
			if (line != "mu,alpha,n,cv")
				throw Error(ErrorCode::BadRow, "critical-value table header must be mu,alpha,n,cv");
			header_seen = true;
			continue;
		}
		auto f = split(line, ',');
		std::optional<double> mu, alpha, cv;
		std::optional<std::uint64_t> n;
		if (f.size() == 4) {
			mu = parse_double(f[0]);
			alpha = parse_double(f[1]);
			n = parse_uint(f[2]);
			cv = parse_double(f[3]);
		}
		if (!mu || !alpha || !n || !cv)
			throw Error(ErrorCode::BadRow, "critical-value table line " + std::to_string(line_no));
		table.rows.push_back({*mu, *alpha, static_cast<std::size_t>(*n), *cv});
	}
	if (table.rows.empty())
		throw Error(ErrorCode::EmptyFile, "critical-value table has no rows");
	return table;
}

double CriticalValueTable::lookup(double mu, double alpha, std::size_t n_oos, bool interpolate) const {
	std::vector<const CriticalValueRow *> by_alpha;
	for (const auto &r : rows)
		if (near(r.alpha, alpha))
			by_alpha.push_back(&r);
	if (by_alpha.empty())
		throw Error(ErrorCode::InvalidArgument, "alpha " + format_double(alpha) + " is not tabulated");

	const bool exact_n = std::any_of(by_alpha.begin(), by_alpha.end(), [&](auto *r) { return r->n == n_oos; });
	const std::size_t n = exact_n ? n_oos : kAsymptoticLength;
	std::vector<const CriticalValueRow *> grid;
	for (auto *r : by_alpha)
		if (r->n == n)
			grid.push_back(r);
	if (grid.empty())
		throw Error(ErrorCode::UnsupportedMu, "no asymptotic rows for alpha " + format_double(alpha));
	std::sort(grid.begin(), grid.end(), [](auto *a, auto *b) { return a->mu < b->mu; });

	for (auto *r : grid)
		if (near(r->mu, mu))
			return r->cv;
	if (interpolate && mu > grid.front()->mu && mu < grid.back()->mu) {
		for (std::size_t k = 1; k < grid.size(); ++k)
			if (mu < grid[k]->mu) {
				const auto *a = grid[k - 1];
				const auto *b = grid[k];
				const double t = (mu - a->mu) / (b->mu - a->mu);
				return a->cv + t * (b->cv - a->cv);
			}
	}
	throw Error(ErrorCode::UnsupportedMu, "mu " + format_double(mu) + " is not on the critical-value grid" +
	                                          (interpolate ? "" : " (interpolation disabled)"));
}

std::string CriticalValueTable::format() const {
	std::ostringstream out;
	for (const auto &c : header_comments)
		out << "# " << c << '\n';
	out << "mu,alpha,n,cv\n";
	for (const auto &r : rows)
		out << format_double(r.mu) << ',' << format_double(r.alpha) << ',' << r.n << ',' << format_double(r.cv)
		    << '\n';
	return out.str();
}

extern const char *const kBundledCriticalValues;

const CriticalValueTable &CriticalValueTable::bundled() {
	static const CriticalValueTable table = parse(kBundledCriticalValues);
	return table;
}

double critical_value(double mu, double alpha, std::size_t n_oos, bool interpolate) {
	return CriticalValueTable::bundled().lookup(mu, alpha, n_oos, interpolate);
}

std::vector<std::vector<double>> simulate_sup_statistics(const std::vector<double> &mus, std::size_t n,
                                                         std::size_t paths, std::uint64_t seed,
                                                         bool known_variance, unsigned threads) {
	if (mus.empty() || paths == 0)
		throw Error(ErrorCode::InvalidArgument, "simulation needs at least one mu and one path");
	std::vector<std::size_t> ms;
	for (double mu : mus) {
		if (!(mu > 0.0 && mu < 1.0))
			throw Error(ErrorCode::UnsupportedMu, "mu must lie in (0,1)");
		const auto m = static_cast<std::size_t>(std::llround(mu * static_cast<double>(n)));
		if (m < 5 || m > n)
			throw Error(ErrorCode::TooShort, "path length too short for mu " + format_double(mu));
		ms.push_back(m);
	}

	std::vector<std::vector<double>> out(mus.size(), std::vector<double>(paths));
	parallel_for(paths, threads, [&](std::size_t path) {
		Rng rng = make_rng(seed, "cv", path);
		std::normal_distribution<double> normal(0.0, 1.0);
		std::vector<double> x(n);
		std::vector<double> cum(n + 1, 0.0);
		for (std::size_t i = 0; i < n; ++i) {
			x[i] = normal(rng);
			cum[i + 1] = cum[i] + x[i];
		}
		for (std::size_t k = 0; k < ms.size(); ++k) {
			const std::size_t m = ms[k];
			double sigma = 1.0;
			if (!known_variance)
				sigma = std::sqrt(hac_lrv(x, auto_bandwidth(m)).value);
			double sup = 0.0;
			for (std::size_t j = m; j <= n; ++j)
				sup = std::max(sup, std::abs(cum[j] - cum[j - m]));
			out[k][path] = sup / (sigma * std::sqrt(static_cast<double>(m)));
		}
	});
	return out;
}

std::vector<double> simulate_sup_statistics(const SupSimulation &sim) {
	return std::move(simulate_sup_statistics({sim.mu}, sim.n, sim.paths, sim.seed, sim.known_variance,
	                                         sim.threads)[0]);
}

double monte_carlo_critical_value(const SupSimulation &sim, double alpha) {
	return quantreg::lower_empirical_quantile(simulate_sup_statistics(sim), 1.0 - alpha);
}

} // namespace emospread::fluctuation
