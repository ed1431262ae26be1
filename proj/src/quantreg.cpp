#include "emospread/quantreg.hpp"

#include "emospread/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace emospread::quantreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double total_check_loss(const VectorXd &residuals, double q) {
	double sum = 0.0;
	for (Index i = 0; i < residuals.size(); ++i)
		sum += check_loss(residuals[i], q);
	return sum;
}

double lower_empirical_quantile(std::vector<double> values, double q) {
	if (values.empty())
		throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
	const auto n = values.size();
	auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * q - 1e-9));
	k = std::clamp<std::size_t>(k, 1, n);
	std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
	return values[k - 1];
}

double restricted_loss(const VectorXd &target, double q) {
	std::vector<double> v(target.data(), target.data() + target.size());
	const double alpha = lower_empirical_quantile(v, q);
	return total_check_loss((target.array() - alpha).matrix(), q);
}

// ---------------------------------------------------------------------------
// RegressionFrame

std::optional<Index> RegressionFrame::find_column(std::string_view name) const {
	for (std::size_t j = 0; j < names.size(); ++j)
		if (names[j] == name)
			return static_cast<Index>(j);
	return std::nullopt;
}

Index RegressionFrame::column(std::string_view name) const {
	auto j = find_column(name);
	if (!j)
		throw Error(ErrorCode::MissingRegressor, "no regressor named '" + std::string(name) + "'");
	return *j;
}

void RegressionFrame::validate() const {
	if (!(q > 0.0 && q < 1.0))
		throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0,1)");
	if (design.rows() != target.size())
		throw Error(ErrorCode::InvalidArgument, "design and target lengths differ");
	if (static_cast<Index>(names.size()) != design.cols())
		throw Error(ErrorCode::InvalidArgument, "one name per regressor required");
	if (!row_dates.empty() && static_cast<Index>(row_dates.size()) != target.size())
		throw Error(ErrorCode::InvalidArgument, "row_dates length differs from target");
	std::set<std::string> unique(names.begin(), names.end());
	if (unique.size() != names.size())
		throw Error(ErrorCode::InvalidArgument, "duplicate regressor names");
	if (names.empty() || names.front() != kIntercept || !(design.col(0).array() == 1.0).all())
		throw Error(ErrorCode::InvalidArgument, "first column must be an all-ones intercept");
	if (!design.allFinite() || !target.allFinite())
		throw Error(ErrorCode::InvalidArgument, "frame contains missing or non-finite values");
}

RegressionFrame RegressionFrame::without_column(std::string_view name) const {
	const Index j = column(name);
	RegressionFrame out = *this;
	out.names.erase(out.names.begin() + j);
	out.design.resize(design.rows(), design.cols() - 1);
	out.design << design.leftCols(j), design.rightCols(design.cols() - j - 1);
	return out;
}

RegressionFrame RegressionFrame::slice(std::size_t first, std::size_t count) const {
	if (first + count > static_cast<std::size_t>(rows()))
		throw Error(ErrorCode::InvalidArgument, "slice outside frame");
	RegressionFrame out;
	out.q = q;
	out.h = h;
	out.names = names;
	out.target = target.segment(static_cast<Index>(first), static_cast<Index>(count));
	out.design = design.middleRows(static_cast<Index>(first), static_cast<Index>(count));
	if (!row_dates.empty())
		out.row_dates.assign(row_dates.begin() + static_cast<std::ptrdiff_t>(first),
		                     row_dates.begin() + static_cast<std::ptrdiff_t>(first + count));
	return out;
}

RegressionFrame RegressionFrame::intercept_only(const VectorXd &target, double q) {
	RegressionFrame f;
	f.target = target;
	f.design = MatrixXd::Ones(target.size(), 1);
	f.names = {std::string(kIntercept)};
	f.q = q;
	return f;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

constexpr double kStepDamping = 0.9995;
constexpr double kDirectionTol = 1e-9;
constexpr std::size_t kMaxTieVertices = 64;

double max_step(const VectorXd &v, const VectorXd &dv) {
	double step = 1e20;
	for (Index i = 0; i < v.size(); ++i)
		if (dv[i] < 0.0)
			step = std::min(step, -v[i] / dv[i]);
	return step;
}

struct IpmResult {
	VectorXd beta;
	int iterations = 0;
};

// Primal-dual path following on the dual problem
//   max y'a  s.t.  X'a = (1-q) X'1,  0 <= a <= 1
// with a Mehrotra corrector. Returns the primal coefficients (dual multipliers).
IpmResult interior_point(const MatrixXd &X, const VectorXd &y, double q, int max_iterations) {
	const Index n = X.rows();
	VectorXd x = VectorXd::Constant(n, 1.0 - q);
	VectorXd s = VectorXd::Constant(n, q);
	VectorXd dual = -X.colPivHouseholderQr().solve(y);
	VectorXd r = -y - X * dual;
	for (Index i = 0; i < n; ++i)
		if (r[i] == 0.0)
			r[i] = 0.001;
	VectorXd z = r.cwiseMax(0.0);
	VectorXd w = z - r;

	const double tol = 1e-10 * std::max(1.0, y.cwiseAbs().sum());
	double gap = z.dot(x) + w.dot(s);
	int it = 0;
	while (gap > tol) {
		if (it >= max_iterations)
			throw Error(ErrorCode::NonConvergence,
			            "interior point did not converge in " + std::to_string(max_iterations) + " iterations");
		++it;
		const VectorXd d = ((z.array() / x.array()) + (w.array() / s.array())).inverse().matrix();
		const VectorXd rr = z - w;
		const MatrixXd XD = X.array().colwise() * d.array();
		const Eigen::LDLT<MatrixXd> normal(XD.transpose() * X);

		VectorXd dy = normal.solve(XD.transpose() * rr);
		VectorXd dx = d.cwiseProduct(X * dy - rr);
		VectorXd ds = -dx;
		VectorXd dz = -z.cwiseProduct(VectorXd::Ones(n) + dx.cwiseQuotient(x));
		VectorXd dw = -w.cwiseProduct(VectorXd::Ones(n) + ds.cwiseQuotient(s));

		double fp = std::min(1.0, kStepDamping * std::min(max_step(x, dx), max_step(s, ds)));
		double fd = std::min(1.0, kStepDamping * std::min(max_step(z, dz), max_step(w, dw)));

		if (std::min(fp, fd) < 1.0) {
			double mu = z.dot(x) + w.dot(s);
			const double g = (z + fd * dz).dot(x + fp * dx) + (w + fd * dw).dot(s + fp * ds);
			mu = mu * std::pow(g / mu, 3) / (2.0 * static_cast<double>(n));

			const VectorXd dxdz = dx.cwiseProduct(dz);
			const VectorXd dsdw = ds.cwiseProduct(dw);
			const VectorXd r_xz = (mu - x.array() * z.array() - dxdz.array()).matrix();
			const VectorXd r_sw = (mu - s.array() * w.array() - dsdw.array()).matrix();
			const VectorXd xi = r_xz.cwiseQuotient(x) - r_sw.cwiseQuotient(s);

			dy = normal.solve(-(XD.transpose() * xi));
			dx = d.cwiseProduct(X * dy + xi);
			ds = -dx;
			dz = (r_xz - z.cwiseProduct(dx)).cwiseQuotient(x);
			dw = (r_sw - w.cwiseProduct(ds)).cwiseQuotient(s);

			fp = std::min(1.0, kStepDamping * std::min(max_step(x, dx), max_step(s, ds)));
			fd = std::min(1.0, kStepDamping * std::min(max_step(z, dz), max_step(w, dw)));
		}

		x += fp * dx;
		s += fp * ds;
		dual += fd * dy;
		z += fd * dz;
		w += fd * dw;
		gap = z.dot(x) + w.dot(s);
		if (!std::isfinite(gap))
			throw Error(ErrorCode::NonConvergence, "interior point diverged");
	}
	return {-dual, it};
}

// Picks p linearly independent observations, smallest |residual| first.
std::vector<Index> initial_basis(const MatrixXd &X, const VectorXd &residuals) {
	const Index n = X.rows();
	const Index p = X.cols();
	std::vector<Index> order(static_cast<std::size_t>(n));
	std::iota(order.begin(), order.end(), Index{0});
	std::stable_sort(order.begin(), order.end(),
	                 [&](Index a, Index b) { return std::abs(residuals[a]) < std::abs(residuals[b]); });
	std::vector<Index> basis;
	std::vector<VectorXd> ortho;
	for (Index i : order) {
		VectorXd v = X.row(i).transpose();
		const double norm0 = v.norm();
		if (norm0 == 0.0)
			continue;
		for (int pass = 0; pass < 2; ++pass)
			for (const auto &u : ortho)
				v -= u.dot(v) * u;
		const double norm = v.norm();
		if (norm > 1e-9 * norm0) {
			ortho.push_back(v / norm);
			basis.push_back(i);
			if (static_cast<Index>(basis.size()) == p)
				break;
		}
	}
	if (static_cast<Index>(basis.size()) != p)
		throw Error(ErrorCode::RankDeficient, "design matrix does not have full column rank");
	return basis;
}

// Everything needed to evaluate edge directions at one vertex.
struct Vertex {
	std::vector<Index> basis;
	MatrixXd basis_inverse; // inverse of X(basis, :)
	VectorXd beta;
	VectorXd residuals;
	std::vector<char> in_basis;
	std::vector<Index> zero_set; // non-basic observations with zero residual
	VectorXd v;                  // B^{-T} sum_{i not in basis, r_i != 0} psi(r_i) x_i
};

Vertex make_vertex(const MatrixXd &X, const VectorXd &y, double q, const std::vector<Index> &basis) {
	const Index n = X.rows();
	const Index p = X.cols();
	Vertex vx;
	vx.basis = basis;
	MatrixXd B(p, p);
	VectorXd yb(p);
	for (Index k = 0; k < p; ++k) {
		B.row(k) = X.row(basis[static_cast<std::size_t>(k)]);
		yb[k] = y[basis[static_cast<std::size_t>(k)]];
	}
	Eigen::FullPivLU<MatrixXd> lu(B);
	if (!lu.isInvertible())
		throw Error(ErrorCode::RankDeficient, "singular basis");
	vx.basis_inverse = lu.inverse();
	vx.beta = vx.basis_inverse * yb;
	vx.residuals = y - X * vx.beta;
	vx.in_basis.assign(static_cast<std::size_t>(n), 0);
	for (Index k : basis) {
		vx.in_basis[static_cast<std::size_t>(k)] = 1;
		vx.residuals[k] = 0.0;
	}
	const double eps = 1e-11 * (1.0 + y.cwiseAbs().maxCoeff());
	VectorXd g = VectorXd::Zero(p);
	for (Index i = 0; i < n; ++i) {
		if (vx.in_basis[static_cast<std::size_t>(i)])
			continue;
		const double r = vx.residuals[i];
		if (std::abs(r) <= eps) {
			vx.zero_set.push_back(i);
			continue;
		}
		g += (r < 0.0 ? q - 1.0 : q) * X.row(i).transpose();
	}
	vx.v = vx.basis_inverse.transpose() * g;
	return vx;
}

// Directional derivative of the objective when basis observation k is released;
// sign +1 pushes its residual negative, -1 positive.
double edge_derivative(const MatrixXd &X, double q, const Vertex &vx, Index k, int sign) {
	double D = sign > 0 ? (1.0 - q) - vx.v[k] : q + vx.v[k];
	if (!vx.zero_set.empty()) {
		const VectorXd delta = static_cast<double>(sign) * vx.basis_inverse.col(k);
		for (Index i : vx.zero_set) {
			const double a = X.row(i).dot(delta);
			D += a > 0.0 ? (1.0 - q) * a : -q * a;
		}
	}
	return D;
}

// Walks along the edge until the objective stops decreasing and returns the
// observation that enters the basis, or -1 for an unbounded ray.
Index ratio_test(const MatrixXd &X, const Vertex &vx, Index k, int sign, double slope) {
	const VectorXd delta = static_cast<double>(sign) * vx.basis_inverse.col(k);
	const VectorXd a = X * delta;
	struct Break {
		double t;
		Index i;
		double weight;
	};
	std::vector<Break> breaks;
	std::vector<char> is_zero(static_cast<std::size_t>(X.rows()), 0);
	for (Index i : vx.zero_set)
		is_zero[static_cast<std::size_t>(i)] = 1;
	for (Index i = 0; i < X.rows(); ++i) {
		if (vx.in_basis[static_cast<std::size_t>(i)] || is_zero[static_cast<std::size_t>(i)] || a[i] == 0.0)
			continue;
		const double t = vx.residuals[i] / a[i];
		if (t > 0.0)
			breaks.push_back({t, i, std::abs(a[i])});
	}
	std::sort(breaks.begin(), breaks.end(), [](const Break &l, const Break &r) {
		return l.t < r.t || (l.t == r.t && l.i < r.i);
	});
	for (const auto &b : breaks) {
		slope += b.weight;
		if (slope >= 0.0)
			return b.i;
	}
	return -1;
}

LpSolution finish(const MatrixXd &X, double q, const Vertex &vx) {
	LpSolution sol;
	sol.beta = vx.beta;
	sol.residuals = vx.residuals;
	sol.basis = vx.basis;
	sol.objective = total_check_loss(vx.residuals, q);

	const Index n = X.rows();
	const Index p = X.cols();
	sol.rank_scores.resize(n);
	VectorXd g = VectorXd::Zero(p);
	for (Index i = 0; i < n; ++i) {
		if (vx.in_basis[static_cast<std::size_t>(i)])
			continue;
		const double b = vx.residuals[i] < 0.0 ? q - 1.0 : q;
		sol.rank_scores[i] = b;
		g += b * X.row(i).transpose();
	}
	const VectorXd bh = -(vx.basis_inverse.transpose() * g);
	for (Index k = 0; k < p; ++k)
		sol.rank_scores[vx.basis[static_cast<std::size_t>(k)]] = std::clamp(bh[k], q - 1.0, q);
	return sol;
}

} // namespace

LpSolution solve_check_loss(const MatrixXd &X, const VectorXd &y, double q, const SolverOptions &options) {
	const Index n = X.rows();
	const Index p = X.cols();
	if (!(q > 0.0 && q < 1.0))
		throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0,1)");
	if (y.size() != n)
		throw Error(ErrorCode::InvalidArgument, "design and target lengths differ");
	if (p == 0 || n <= p)
		throw Error(ErrorCode::InsufficientRows,
		            "need more observations (" + std::to_string(n) + ") than parameters (" + std::to_string(p) + ")");

	std::vector<Index> basis;
	int ipm_iterations = 0;
	bool warm = false;
	if (options.warm_basis && static_cast<Index>(options.warm_basis->size()) == p) {
		std::set<Index> uniq(options.warm_basis->begin(), options.warm_basis->end());
		warm = static_cast<Index>(uniq.size()) == p && *uniq.begin() >= 0 && *uniq.rbegin() < n;
		if (warm) {
			MatrixXd B(p, p);
			for (Index k = 0; k < p; ++k)
				B.row(k) = X.row((*options.warm_basis)[static_cast<std::size_t>(k)]);
			warm = Eigen::FullPivLU<MatrixXd>(B).isInvertible();
		}
	}
	if (warm) {
		basis = *options.warm_basis;
	} else {
		Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
		if (qr.rank() < p)
			throw Error(ErrorCode::RankDeficient, "design matrix does not have full column rank");
		auto ipm = interior_point(X, y, q, options.max_ipm_iterations);
		ipm_iterations = ipm.iterations;
		basis = initial_basis(X, y - X * ipm.beta);
	}

	// Simplex descent to an optimal vertex. Each pivot strictly lowers the
	// objective, so vertices never repeat.
	const long max_pivots = 50L * n + 1000;
	int pivots = 0;
	Vertex vx = make_vertex(X, y, q, basis);
	while (true) {
		double best = -kDirectionTol;
		Index best_k = -1;
		int best_sign = 0;
		for (Index k = 0; k < p; ++k)
			for (int sign : {+1, -1}) {
				const double D = edge_derivative(X, q, vx, k, sign);
				if (D < best) {
					best = D;
					best_k = k;
					best_sign = sign;
				}
			}
		if (best_k < 0)
			break;
		const Index entering = ratio_test(X, vx, best_k, best_sign, best);
		if (entering < 0)
			throw Error(ErrorCode::NonConvergence, "unbounded descent direction");
		if (++pivots > max_pivots)
			throw Error(ErrorCode::NonConvergence, "pivot budget exhausted");
		basis = vx.basis;
		basis[static_cast<std::size_t>(best_k)] = entering;
		vx = make_vertex(X, y, q, basis);
	}

	// Enumerate the optimal face through zero-cost edges; keep the
	// lexicographically smallest active set.
	auto canonical = [](std::vector<Index> b) {
		std::sort(b.begin(), b.end());
		return b;
	};
	std::set<std::vector<Index>> seen{canonical(vx.basis)};
	std::vector<std::vector<Index>> queue{vx.basis};
	std::vector<Index> smallest = canonical(vx.basis);
	for (std::size_t head = 0; head < queue.size() && seen.size() < kMaxTieVertices; ++head) {
		Vertex cur = head == 0 ? vx : make_vertex(X, y, q, queue[head]);
		for (Index k = 0; k < p; ++k)
			for (int sign : {+1, -1}) {
				const double D = edge_derivative(X, q, cur, k, sign);
				if (std::abs(D) > kDirectionTol)
					continue;
				const Index entering = ratio_test(X, cur, k, sign, std::min(D, 0.0) - kDirectionTol);
				if (entering < 0)
					continue;
				auto next = cur.basis;
				next[static_cast<std::size_t>(k)] = entering;
				auto key = canonical(next);
				if (seen.insert(key).second) {
					queue.push_back(next);
					smallest = std::min(smallest, key);
				}
			}
	}
	vx = make_vertex(X, y, q, smallest);

	auto sol = finish(X, q, vx);
	sol.ipm_iterations = ipm_iterations;
	sol.pivots = pivots;
	return sol;
}

// ---------------------------------------------------------------------------

double QuantileFit::coefficient(std::string_view name) const {
	for (std::size_t j = 0; j < names.size(); ++j)
		if (names[j] == name)
			return coefficients[static_cast<Index>(j)];
	throw Error(ErrorCode::MissingRegressor, "no coefficient named '" + std::string(name) + "'");
}

QuantileFit fit_quantile(const RegressionFrame &frame, const FitOptions &options) {
	frame.validate();
	auto sol = solve_check_loss(frame.design, frame.target, frame.q, options.solver);
	QuantileFit fit;
	fit.q = frame.q;
	fit.names = frame.names;
	fit.coefficients = std::move(sol.beta);
	fit.residuals = std::move(sol.residuals);
	fit.rank_scores = std::move(sol.rank_scores);
	fit.basis = std::move(sol.basis);
	fit.objective = sol.objective;
	fit.ipm_iterations = sol.ipm_iterations;
	fit.pivots = sol.pivots;
	if (options.compute_pseudo_r1) {
		const double v0 = restricted_loss(frame.target, frame.q);
		fit.pseudo_r1 = v0 > 0.0 ? 1.0 - fit.objective / v0 : std::numeric_limits<double>::quiet_NaN();
	}
	return fit;
}

double pseudo_r1(const QuantileFit &fit, const RegressionFrame &frame) {
	const double v0 = restricted_loss(frame.target, frame.q);
	if (!(v0 > 0.0))
		throw Error(ErrorCode::ZeroRestrictedLoss, "intercept-only model fits the target exactly");
	return 1.0 - fit.objective / v0;
}

namespace {

struct RankTestSetup {
	MatrixXd nuisance;
	VectorXd regressor;
	VectorXd projected; // regressor minus its projection on the nuisance columns
	double denominator = 0.0;
};

RankTestSetup rank_test_setup(const RegressionFrame &frame, Index j) {
	RankTestSetup s;
	const Index p = frame.cols();
	s.nuisance.resize(frame.rows(), p - 1);
	s.nuisance << frame.design.leftCols(j), frame.design.rightCols(p - j - 1);
	s.regressor = frame.design.col(j);
	if (p > 1) {
		Eigen::ColPivHouseholderQR<MatrixXd> qr(s.nuisance);
		if (qr.rank() < p - 1)
			throw Error(ErrorCode::RankDeficient, "nuisance regressors are collinear");
		s.projected = s.regressor - s.nuisance * qr.solve(s.regressor);
	} else {
		s.projected = s.regressor;
	}
	const double sxx = s.projected.squaredNorm();
	if (!(sxx > 1e-12 * std::max(1.0, s.regressor.squaredNorm())))
		throw Error(ErrorCode::RankDeficient, "regressor is collinear with the others");
	s.denominator = std::sqrt(sxx * frame.q * (1.0 - frame.q));
	return s;
}

double statistic_at(const RegressionFrame &frame, const RankTestSetup &s, double xi,
                    std::optional<std::vector<Index>> &warm) {
	const VectorXd shifted = frame.target - xi * s.regressor;
	if (s.nuisance.cols() == 0) {
		// No nuisance parameters: scores are q - I(y_i - xi x_i < 0).
		double acc = 0.0;
		for (Index i = 0; i < shifted.size(); ++i)
			acc += s.projected[i] * (shifted[i] < 0.0 ? frame.q - 1.0 : frame.q);
		return acc / s.denominator;
	}
	SolverOptions opts;
	opts.warm_basis = warm;
	auto sol = solve_check_loss(s.nuisance, shifted, frame.q, opts);
	warm = sol.basis;
	return s.projected.dot(sol.rank_scores) / s.denominator;
}

// Hall-Sheather difference-quotient estimate of the sparsity 1/f(F^{-1}(q)).
double sparsity(const VectorXd &residuals, double q, double level) {
	const boost::math::normal_distribution<> normal;
	const double n = static_cast<double>(residuals.size());
	const double zq = boost::math::quantile(normal, q);
	const double za = boost::math::quantile(normal, 1.0 - (1.0 - level) / 2.0);
	const double dens = boost::math::pdf(normal, zq);
	const double h =
	    std::pow(n, -1.0 / 3.0) * std::pow(za, 2.0 / 3.0) * std::cbrt(1.5 * dens * dens / (2.0 * zq * zq + 1.0));
	const double lo = std::max(q - h, 1.0 / n);
	const double hi = std::min(q + h, 1.0 - 1.0 / n);
	std::vector<double> r(residuals.data(), residuals.data() + residuals.size());
	if (hi > lo) {
		const double s = (lower_empirical_quantile(r, hi) - lower_empirical_quantile(r, lo)) / (hi - lo);
		if (s > 0.0 && std::isfinite(s))
			return s;
	}
	double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
	double ss = 0.0;
	for (double v : r)
		ss += (v - mean) * (v - mean);
	const double sd = std::sqrt(ss / std::max(1.0, n - 1.0));
	return sd > 0.0 ? 2.5 * sd : 1.0;
}

} // namespace

double rank_score_statistic(const RegressionFrame &frame, std::string_view coefficient, double xi) {
	frame.validate();
	auto setup = rank_test_setup(frame, frame.column(coefficient));
	std::optional<std::vector<Index>> warm;
	return statistic_at(frame, setup, xi, warm);
}

ConfidenceInterval rank_inversion_ci(const RegressionFrame &frame, const QuantileFit &fit,
                                     std::string_view coefficient, double level, const CiOptions &options) {
	if (!(level > 0.0 && level < 1.0))
		throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0,1)");
	frame.validate();
	const Index j = frame.column(coefficient);
	auto setup = rank_test_setup(frame, j);
	const double critical =
	    boost::math::quantile(boost::math::normal_distribution<>(), 1.0 - (1.0 - level) / 2.0);

	const double point = fit.coefficient(coefficient);
	const double se = sparsity(fit.residuals, frame.q, level) *
	                  std::sqrt(frame.q * (1.0 - frame.q) / setup.projected.squaredNorm());
	const double half = options.bracket_units * se;

	std::optional<std::vector<Index>> warm;
	auto rejects = [&](double xi) { return std::abs(statistic_at(frame, setup, xi, warm)) > critical; };

	auto boundary = [&](double outer) {
		if (!rejects(outer))
			throw Error(ErrorCode::UnboundedInterval, "rank test does not reject at " + std::to_string(outer));
		double out = outer;
		double in = point;
		while (std::abs(out - in) > options.tolerance) {
			const double mid = 0.5 * (out + in);
			if (rejects(mid))
				out = mid;
			else
				in = mid;
		}
		return 0.5 * (out + in);
	};

	// Seed the warm start at the point estimate.
	rejects(point);
	ConfidenceInterval ci;
	ci.lower = std::min(boundary(point - half), point);
	ci.upper = std::max(boundary(point + half), point);
	return ci;
}

double predict(const QuantileFit &fit, const std::map<std::string, double> &row) {
	double out = 0.0;
	for (std::size_t j = 0; j < fit.names.size(); ++j) {
		auto it = row.find(fit.names[j]);
		if (it == row.end()) {
			if (fit.names[j] == kIntercept) {
				out += fit.coefficients[static_cast<Index>(j)];
				continue;
			}
			throw Error(ErrorCode::MissingRegressor, "row lacks regressor '" + fit.names[j] + "'");
		}
		out += fit.coefficients[static_cast<Index>(j)] * it->second;
	}
	return out;
}

std::string to_json(const QuantileFit &fit, bool include_residuals) {
	nlohmann::ordered_json doc;
	doc["q"] = fit.q;
	nlohmann::ordered_json coefs = nlohmann::ordered_json::object();
	for (std::size_t j = 0; j < fit.names.size(); ++j)
		coefs[fit.names[j]] = fit.coefficients[static_cast<Index>(j)];
	doc["coefficients"] = coefs;
	nlohmann::ordered_json ci = nlohmann::ordered_json::object();
	for (const auto &[name, interval] : fit.ci)
		ci[name] = {interval.lower, interval.upper};
	doc["ci"] = ci;
	doc["objective"] = fit.objective;
	if (std::isnan(fit.pseudo_r1))
		doc["pseudo_r1"] = nullptr;
	else
		doc["pseudo_r1"] = fit.pseudo_r1;
	if (include_residuals)
		doc["residuals"] = std::vector<double>(fit.residuals.data(), fit.residuals.data() + fit.residuals.size());
	return doc.dump(2);
}

} // namespace emospread::quantreg
