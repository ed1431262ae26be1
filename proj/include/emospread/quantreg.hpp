#pragma once

// Linear quantile regression by check-loss minimisation.
//
// The solver runs a primal-dual interior point method on the dual LP and then
// moves to an exact vertex of the primal (p observations fitted exactly) with
// simplex-type edge pivots, so reported objectives are exact up to the
// conditioning of a p x p solve. Among equally optimal vertices the one with
// the lexicographically smallest active index set is returned.

#include "emospread/date.hpp"

#include <Eigen/Dense>

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emospread::quantreg {

/// rho_q(z) = (q - I(z < 0)) z
inline double check_loss(double z, double q) { return z >= 0.0 ? q * z : (q - 1.0) * z; }

double total_check_loss(const Eigen::VectorXd &residuals, double q);

/// Order statistic x_(ceil(n q)): the smallest minimiser of sum rho_q(x_i - a).
double lower_empirical_quantile(std::vector<double> values, double q);

/// Minimised check loss of the intercept-only model.
double restricted_loss(const Eigen::VectorXd &target, double q);

inline constexpr std::string_view kIntercept = "intercept";

struct RegressionFrame {
	Eigen::VectorXd target;
	Eigen::MatrixXd design; // rows x regressors, first column is the intercept
	std::vector<std::string> names;
	std::vector<Date> row_dates;
	double q = 0.5;
	int h = 0;

	Eigen::Index rows() const { return design.rows(); }
	Eigen::Index cols() const { return design.cols(); }
	std::optional<Eigen::Index> find_column(std::string_view name) const;
	/// Throws MissingRegressor.
	Eigen::Index column(std::string_view name) const;

	void validate() const;
	RegressionFrame without_column(std::string_view name) const;
	RegressionFrame slice(std::size_t first, std::size_t count) const;

	static RegressionFrame intercept_only(const Eigen::VectorXd &target, double q);
};

struct ConfidenceInterval {
	double lower = 0.0;
	double upper = 0.0;
	bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Raw solver output for min_b sum rho_q(y - X b).
struct LpSolution {
	Eigen::VectorXd beta;
	Eigen::VectorXd residuals;
	/// Regression rank scores a_i(q) - (1 - q); q - I(r_i < 0) off the basis.
	Eigen::VectorXd rank_scores;
	std::vector<Eigen::Index> basis; // sorted
	double objective = 0.0;
	int ipm_iterations = 0;
	int pivots = 0;
};

struct SolverOptions {
	int max_ipm_iterations = 200;
	/// Start pivoting from this vertex instead of running the interior point phase.
	std::optional<std::vector<Eigen::Index>> warm_basis;
};

LpSolution solve_check_loss(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, double q,
                            const SolverOptions &options = {});

struct QuantileFit {
	double q = 0.5;
	std::vector<std::string> names;
	Eigen::VectorXd coefficients;
	Eigen::VectorXd residuals;
	Eigen::VectorXd rank_scores;
	std::vector<Eigen::Index> basis;
	double objective = 0.0;
	double pseudo_r1 = std::numeric_limits<double>::quiet_NaN();
	std::map<std::string, ConfidenceInterval> ci;
	int ipm_iterations = 0;
	int pivots = 0;

	double coefficient(std::string_view name) const;
};

struct FitOptions {
	SolverOptions solver;
	bool compute_pseudo_r1 = true;
};

QuantileFit fit_quantile(const RegressionFrame &frame, const FitOptions &options = {});

/// Koenker-Machado R1 = 1 - V_full / V_intercept_only.
double pseudo_r1(const QuantileFit &fit, const RegressionFrame &frame);

struct CiOptions {
	double bracket_units = 50.0; // search bracket half-width in standard-error units
	double tolerance = 1e-6;
};

/// Inverts the regression rank-score test of H0: beta_j = xi (iid score
/// variance q(1-q)); the interval endpoints are located by bisection.
ConfidenceInterval rank_inversion_ci(const RegressionFrame &frame, const QuantileFit &fit,
                                     std::string_view coefficient, double level = 0.90,
                                     const CiOptions &options = {});

/// Rank-score test statistic (standard normal under H0) for beta_j = xi.
double rank_score_statistic(const RegressionFrame &frame, std::string_view coefficient, double xi);

double predict(const QuantileFit &fit, const std::map<std::string, double> &row);

std::string to_json(const QuantileFit &fit, bool include_residuals = false);

} // namespace emospread::quantreg
