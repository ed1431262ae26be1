#include "emospread/error.hpp"
#include "emospread/rolling.hpp"
#include "emospread/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace emospread;
using namespace emospread::simulate;

TEST_CASE("true coefficients follow the location-scale design") {
	DgpSpec spec;
	spec.gamma = 0.0;
	spec.theta = 0.25;
	for (double q : {0.05, 0.5, 0.95})
		CHECK(spec.true_coefficients(q).at("emotion") == doctest::Approx(0.25));
	spec.gamma = 0.5;
	spec.theta = 0.0;
	// Q_N(0.95) = 1.644854
	CHECK(spec.true_coefficients(0.95).at("emotion") == doctest::Approx(0.8224268).epsilon(1e-6));
	CHECK(spec.true_coefficients(0.5).at("emotion") == doctest::Approx(0.0).epsilon(1e-12));
	CHECK(spec.true_coefficients(0.95).at("intercept") == doctest::Approx(1.6448536).epsilon(1e-6));
	spec.errors = ErrorDistribution::StudentT;
	spec.t_df = 5;
	// t_5 0.95 quantile 2.015048
	CHECK(spec.error_quantile(0.95) == doctest::Approx(2.015048).epsilon(1e-6));
}

TEST_CASE("simulation is a pure function of the seed") {
	DgpSpec spec;
	spec.days = 120;
	spec.emit_gkg = true;
	auto a = simulate_dgp(spec, 99);
	auto b = simulate_dgp(spec, 99);
	auto c = simulate_dgp(spec, 100);
	CHECK(market::format_market_csv(a.market) == market::format_market_csv(b.market));
	CHECK(a.emotion.standardized == b.emotion.standardized);
	CHECK(a.records.size() == b.records.size());
	CHECK(market::format_market_csv(a.market) != market::format_market_csv(c.market));
	CHECK(a.market.size() == 120);
	CHECK(a.emotion.dates == a.market.dates);
}

TEST_CASE("emitted news tracks the latent indicator") {
	DgpSpec spec;
	spec.days = 150;
	auto direct = simulate_dgp(spec, 5);
	spec.emit_gkg = true;
	auto routed = simulate_dgp(spec, 5);
	CHECK(!routed.records.empty());
	REQUIRE(routed.emotion.dates == direct.emotion.dates);
	// Word counts are rounded per article, so agreement is close but not exact.
	double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, n = 0;
	for (std::size_t i = 0; i < direct.emotion.dates.size(); ++i)
		if (direct.emotion.standardized[i] && routed.emotion.standardized[i]) {
			const double x = *direct.emotion.standardized[i], y = *routed.emotion.standardized[i];
			sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y, n += 1;
		}
	CHECK(n > 100);
	const double corr = (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
	CHECK(corr > 0.9);
}

TEST_CASE("large samples recover the emotion coefficient") {
	DgpSpec spec;
	spec.days = 4000;
	auto data = simulate_dgp(spec, 3);
	auto frame = rolling::build_regression_frame(data.market, data.lm, data.emotion, 0.95, 1);
	auto fit = quantreg::fit_quantile(frame);
	CHECK(fit.coefficient("emotion") == doctest::Approx(0.8224).epsilon(0.2));
}

TEST_CASE("invalid specifications are rejected") {
	DgpSpec spec;
	spec.gamma = -0.1;
	CHECK_THROWS_WITH_AS(simulate_dgp(spec, 1), doctest::Contains("InvalidSpec"), Error);
	spec = DgpSpec{};
	spec.days = 10;
	CHECK_THROWS_AS(simulate_dgp(spec, 1), Error);
	spec = DgpSpec{};
	spec.errors = ErrorDistribution::StudentT;
	spec.t_df = 2.0;
	CHECK_THROWS_AS(simulate_dgp(spec, 1), Error);
	spec = DgpSpec{};
	spec.emotion.persistence = 1.0;
	CHECK_THROWS_AS(simulate_dgp(spec, 1), Error);
}
