#pragma once

// Slow, obviously-correct reference computations used as test oracles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

inline double rho(double z, double q) { return z * (q - (z < 0.0 ? 1.0 : 0.0)); }

inline double check_loss(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, const Eigen::VectorXd &b, double q) {
	double s = 0.0;
	for (Eigen::Index i = 0; i < y.size(); ++i)
		s += rho(y[i] - X.row(i).dot(b), q);
	return s;
}

/// Some minimiser of the check loss is interpolating on p rows, so the best
/// basic solution over all p-subsets is a global minimum.
inline double enumerate_basic_solutions(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, double q) {
	const auto n = static_cast<int>(X.rows());
	const auto p = static_cast<int>(X.cols());
	std::vector<int> pick(static_cast<std::size_t>(p));
	std::iota(pick.begin(), pick.end(), 0);
	double best = std::numeric_limits<double>::infinity();
	while (true) {
		Eigen::MatrixXd B(p, p);
		Eigen::VectorXd yb(p);
		for (int k = 0; k < p; ++k) {
			B.row(k) = X.row(pick[static_cast<std::size_t>(k)]);
			yb[k] = y[pick[static_cast<std::size_t>(k)]];
		}
		Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
		if (lu.isInvertible())
			best = std::min(best, check_loss(X, y, lu.solve(yb), q));
		int k = p - 1;
		while (k >= 0 && pick[static_cast<std::size_t>(k)] == n - p + k)
			--k;
		if (k < 0)
			break;
		++pick[static_cast<std::size_t>(k)];
		for (int j = k + 1; j < p; ++j)
			pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
	}
	return best;
}

inline std::optional<double> window_mean(const std::vector<std::optional<double>> &x, std::size_t t, std::size_t w) {
	if (t + 1 < w)
		return std::nullopt;
	double s = 0.0;
	for (std::size_t k = 0; k < w; ++k) {
		if (!x[t - k])
			return std::nullopt;
		s += *x[t - k];
	}
	return s / static_cast<double>(w);
}

inline double sample_sd(const std::vector<double> &v) {
	double m = 0.0;
	for (double x : v)
		m += x;
	m /= static_cast<double>(v.size());
	double ss = 0.0;
	for (double x : v)
		ss += (x - m) * (x - m);
	return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Sort-and-index quantile: the ceil(n q)-th order statistic.
inline double sorted_quantile(std::vector<double> v, double q) {
	std::sort(v.begin(), v.end());
	auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(v.size()) * q - 1e-9));
	k = std::clamp<std::size_t>(k, 1, v.size());
	return v[k - 1];
}

} // namespace oracle
