#include "emospread/error.hpp"
#include "emospread/fluctuation.hpp"
#include "emospread/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace emospread;
using namespace emospread::fluctuation;

namespace {

// Double sum over all pairs with Bartlett weights; equals the usual
// gamma_0 + 2 sum w_l gamma_l form.
double naive_lrv(const std::vector<double> &d, std::size_t L) {
	const double n = static_cast<double>(d.size());
	const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
	double s = 0.0;
	for (std::size_t i = 0; i < d.size(); ++i)
		for (std::size_t j = 0; j < d.size(); ++j) {
			const std::size_t lag = i > j ? i - j : j - i;
			if (lag > L)
				continue;
			s += (1.0 - static_cast<double>(lag) / static_cast<double>(L + 1)) * (d[i] - mean) * (d[j] - mean);
		}
	return s / n;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
	auto rng = make_rng(seed, "test");
	std::normal_distribution<double> z;
	std::vector<double> v(n);
	for (auto &x : v)
		x = z(rng);
	return v;
}

LossDifferentialSeries series(std::vector<double> d) {
	LossDifferentialSeries s;
	for (std::size_t i = 0; i < d.size(); ++i)
		s.dates.push_back(make_date(2019, 1, 1) + std::chrono::days(i));
	s.d = std::move(d);
	return s;
}

} // namespace

TEST_CASE("HAC with bandwidth 0 is the biased sample variance") {
	auto d = normals(200, 1);
	const double mean = std::accumulate(d.begin(), d.end(), 0.0) / 200.0;
	double v = 0.0;
	for (double x : d)
		v += (x - mean) * (x - mean);
	CHECK(hac_lrv(d, 0).value == doctest::Approx(v / 200.0).epsilon(1e-12));
}

TEST_CASE("HAC agrees with the pairwise form") {
	auto d = normals(150, 2);
	for (std::size_t L : {1, 3, 7, 20})
		CHECK(hac_lrv(d, L).value == doctest::Approx(naive_lrv(d, L)).epsilon(1e-10));
}

TEST_CASE("HAC truncation and degenerate input") {
	std::vector<double> c(40, 2.5);
	CHECK(hac_lrv(c, 3).value == 0.0);
	CHECK_THROWS_WITH_AS(dm_statistic(c, hac_lrv(c, 3).value), doctest::Contains("ZeroVariance"), Error);
	CHECK_THROWS_AS(hac_lrv({1.0}, 0), Error);
	CHECK(auto_bandwidth(150) == 6);
	CHECK(auto_bandwidth(1000) == 13);
}

TEST_CASE("DM statistic matches its definition") {
	std::vector<double> d{0.4, -0.1, 0.3, 0.2, -0.2, 0.5, 0.1, 0.0, 0.3, -0.1};
	const double lrv = naive_lrv(d, 2);
	const double mean = 0.14;
	CHECK(dm_statistic(d, lrv) == doctest::Approx(mean / std::sqrt(lrv / 10.0)).epsilon(1e-12));
}

TEST_CASE("fluctuation path length and construction") {
	auto d = normals(100, 3);
	FluctuationConfig cfg;
	cfg.mu = 0.3;
	cfg.hac_bandwidth = 4;
	auto path = fluctuation_statistics(series(d), cfg);
	CHECK(path.m == 30);
	CHECK(path.bandwidth == 4);
	REQUIRE(path.points.size() == 100 - 30 + 1);
	const double sigma = std::sqrt(naive_lrv(d, 4));
	CHECK(path.sigma == doctest::Approx(sigma).epsilon(1e-10));
	for (std::size_t k : {0, 17, 70}) {
		double s = 0.0;
		for (std::size_t i = k; i < k + 30; ++i)
			s += d[i];
		CHECK(path.points[k].statistic == doctest::Approx(s / (sigma * std::sqrt(30.0))).epsilon(1e-10));
		CHECK(path.points[k].window_end == k + 29);
		CHECK(path.points[k].date == make_date(2019, 1, 1) + std::chrono::days(k + 29));
	}
	CHECK(path.critical_value == critical_value(0.3, 0.05, 100));
}

TEST_CASE("hand example with a fixed critical value") {
	// m = 5 windows over d = 1..10 shifted by its mean; bandwidth 0.
	std::vector<double> d{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
	for (auto &x : d)
		x -= 5.5;
	FluctuationConfig cfg;
	cfg.mu = 0.5;
	cfg.hac_bandwidth = 0;
	cfg.critical_value = 1.5;
	auto path = fluctuation_statistics(series(d), cfg);
	// Biased variance of 1..10 is 8.25.
	CHECK(path.sigma == doctest::Approx(std::sqrt(8.25)));
	REQUIRE(path.points.size() == 6);
	CHECK(path.points[0].statistic == doctest::Approx(-12.5 / (std::sqrt(8.25) * std::sqrt(5.0))));
	CHECK(path.points[5].statistic == doctest::Approx(12.5 / (std::sqrt(8.25) * std::sqrt(5.0))));
	CHECK(path.points[0].verdict == Verdict::AugmentedBetter);
	CHECK(path.points[5].verdict == Verdict::BenchmarkBetter);
	CHECK(path.points[2].verdict == Verdict::Inconclusive);
	CHECK(format_fluctuation_csv(path).rfind("date,F,cv_lower,cv_upper,verdict\n2019-01-05,", 0) == 0);
}

TEST_CASE("swapping the models negates the path") {
	auto d = normals(300, 4);
	for (std::size_t i = 0; i < 100; ++i)
		d[i] -= 1.0;
	auto neg = d;
	for (auto &x : neg)
		x = -x;
	FluctuationConfig cfg;
	auto a = fluctuation_statistics(series(d), cfg);
	auto b = fluctuation_statistics(series(neg), cfg);
	REQUIRE(a.points.size() == b.points.size());
	for (std::size_t k = 0; k < a.points.size(); ++k) {
		CHECK(a.points[k].statistic == -b.points[k].statistic);
		CHECK(a.points[k].verdict == mirrored(b.points[k].verdict));
	}
	CHECK(a.any(Verdict::AugmentedBetter));
	CHECK(b.any(Verdict::BenchmarkBetter));
}

TEST_CASE("path is invariant to rescaling the losses") {
	auto d = normals(250, 5);
	auto scaled = d;
	for (auto &x : scaled)
		x *= 37.5;
	FluctuationConfig cfg;
	auto a = fluctuation_statistics(series(d), cfg);
	auto b = fluctuation_statistics(series(scaled), cfg);
	for (std::size_t k = 0; k < a.points.size(); ++k)
		CHECK(a.points[k].statistic == doctest::Approx(b.points[k].statistic).epsilon(1e-10));
}

TEST_CASE("per-window variance and zero variance") {
	auto d = normals(120, 6);
	FluctuationConfig cfg;
	cfg.per_window_variance = true;
	cfg.hac_bandwidth = 2;
	auto path = fluctuation_statistics(series(d), cfg);
	std::vector<double> w(d.begin(), d.begin() + 36);
	double s = std::accumulate(w.begin(), w.end(), 0.0);
	CHECK(path.points[0].statistic == doctest::Approx(s / std::sqrt(naive_lrv(w, 2) * 36.0)).epsilon(1e-10));
	CHECK_THROWS_WITH_AS(fluctuation_statistics(series(std::vector<double>(50, 0.0)), FluctuationConfig{}),
	                     doctest::Contains("ZeroVariance"), Error);
}

TEST_CASE("window length must be usable") {
	FluctuationConfig cfg;
	cfg.mu = 0.01;
	CHECK_THROWS_AS(fluctuation_statistics(series(normals(100, 7)), cfg), Error);
	cfg.mu = 1.2;
	CHECK_THROWS_AS(fluctuation_statistics(series(normals(100, 7)), cfg), Error);
}

TEST_CASE("bundled critical values") {
	const auto &t = CriticalValueTable::bundled();
	CHECK(!t.rows.empty());
	for (double alpha : {0.01, 0.05, 0.10}) {
		double prev = 1e9;
		for (double mu : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
			const double cv = critical_value(mu, alpha, 5000);
			CHECK(cv <= prev);
			prev = cv;
		}
	}
	for (double mu : {0.1, 0.3, 0.5, 0.9}) {
		CHECK(critical_value(mu, 0.01, 5000) > critical_value(mu, 0.05, 5000));
		CHECK(critical_value(mu, 0.05, 5000) > critical_value(mu, 0.10, 5000));
		CHECK(critical_value(mu, 0.05, 5000) > 1.96);
	}
	CHECK(critical_value(0.3, 0.05, 777) == critical_value(0.3, 0.05, kAsymptoticLength));
	CHECK(critical_value(0.3, 0.05, 500) != critical_value(0.3, 0.05, kAsymptoticLength));
	CHECK_THROWS_WITH_AS(critical_value(0.33, 0.05, 500), doctest::Contains("UnsupportedMu"), Error);
	const double mid = critical_value(0.35, 0.05, 5000, true);
	CHECK(mid < critical_value(0.3, 0.05, 5000));
	CHECK(mid > critical_value(0.4, 0.05, 5000));
	CHECK_THROWS_AS(critical_value(0.3, 0.2, 500), Error);
	CHECK(CriticalValueTable::parse(t.format()).format() == t.format());
}

TEST_CASE("Monte Carlo critical values are reproducible") {
	SupSimulation sim;
	sim.n = 400;
	sim.paths = 2000;
	sim.seed = 11;
	auto a = simulate_sup_statistics(sim);
	sim.threads = 2;
	auto b = simulate_sup_statistics(sim);
	CHECK(a == b);
	const double cv05 = monte_carlo_critical_value(sim, 0.05);
	const double cv10 = monte_carlo_critical_value(sim, 0.10);
	CHECK(cv05 > cv10);
	CHECK(cv05 > 1.96);
	auto multi = simulate_sup_statistics({0.3}, 400, 2000, 11, true);
	CHECK(multi[0] == a);
}
