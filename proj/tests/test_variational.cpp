#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equideform/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace equideform;

namespace
{
	Problem flat_torus_problem(int N = 32)
	{
		return Problem::harmonic_torus(1, 0, periodic_grid(N), Matrix::Identity(2, 2),
		                               Matrix(Eigen::Vector2d(4, 1).asDiagonal()));
	}

	// Smooth random perturbation in dof space.
	Vector smooth_direction(const Problem &problem, std::mt19937_64 &rng)
	{
		std::normal_distribution<double> normal;
		const Vector &x = problem.grid.nodes;
		const double L = problem.grid.length();
		Vector v = Vector::Zero(problem.components() * problem.grid.size());
		for (int a = 0; a < problem.components(); ++a)
			for (int k = 1; k <= 4; ++k)
			{
				const double c = normal(rng) / k, s = normal(rng) / k;
				v.segment(a * x.size(), x.size()).array() +=
				    c * (2 * M_PI * k * (x.array() - problem.grid.a) / L).cos() +
				    s * (2 * M_PI * k * (x.array() - problem.grid.a) / L).sin();
			}
		if (problem.kind == InstanceKind::CmcProfile)
		{
			// vanish at the pinned ends
			v = (M_PI * (x.array() - problem.grid.a) / L).sin() * v.array();
			return v.segment(1, x.size() - 2);
		}
		return v;
	}

	ProblemState perturbed(const Problem &problem, const ProblemState &s, const Vector &dir, double eps)
	{
		return state_from_dofs(problem, state_dofs(problem, s) + eps * dir);
	}

	// Off-centre circle of radius rho whose centre sits at distance c on the ray theta = 0 (flat case).
	ProblemState offset_circle(const Problem &problem, double rho, double c)
	{
		const Vector &t = problem.grid.nodes;
		ProblemState s;
		s.values = c * t.array().cos() + (rho * rho - c * c * t.array().sin().square()).sqrt();
		return s;
	}

	std::vector<std::pair<Problem, std::pair<ProblemState, double>>> sample_cases()
	{
		std::vector<std::pair<Problem, std::pair<ProblemState, double>>> cases;
		std::mt19937_64 rng(17);
		const Problem circle = Problem::cmc_circle(2.0, periodic_grid(48));
		for (double lambda : {-1.0, 0.0, 0.7})
		{
			const ProblemState s0 = analytic_seed(circle, lambda);
			cases.push_back({circle, {perturbed(circle, s0, smooth_direction(circle, rng), 0.02), lambda}});
		}
		const Problem profile = Problem::cmc_profile(1.0, dirichlet_grid(33, 0, 1), 1.0, 1.2);
		cases.push_back({profile, {analytic_seed(profile, 0.2), 0.2}});
		const Problem torus = flat_torus_problem(24);
		cases.push_back({torus, {perturbed(torus, analytic_seed(torus, 0.3), smooth_direction(torus, rng), 0.01), 0.3}});
		const Problem sphere = Problem::harmonic_sphere(periodic_grid(24));
		cases.push_back(
		    {sphere, {perturbed(sphere, analytic_seed(sphere, 1.3), smooth_direction(sphere, rng), 0.05), 1.3}});
		return cases;
	}
} // namespace

TEST_CASE("value examples")
{
	const Problem circle = Problem::cmc_circle(2.0, periodic_grid(64));
	CHECK(value(circle, {Vector::Constant(64, 0.5)}, 0.0) == doctest::Approx(M_PI / 2).epsilon(1e-13));
	const auto d = derived_scalars(circle, {Vector::Constant(64, M_PI / 2)}, 1.0);
	CHECK(d.at("length") == doctest::Approx(2 * M_PI).epsilon(1e-13));

	const Problem torus = Problem::harmonic_torus(1, 0, periodic_grid(32), Matrix::Identity(2, 2),
	                                              Matrix::Identity(2, 2));
	CHECK(value(torus, analytic_seed(torus, 0.0), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("residual examples")
{
	const Problem circle = Problem::cmc_circle(2.0, periodic_grid(64));
	CHECK(residual(circle, {Vector::Constant(64, 0.5)}, 0.0).cwiseAbs().maxCoeff() < 1e-10);
	CHECK(residual(circle, {Vector::Constant(64, std::atan(0.5))}, 1.0).cwiseAbs().maxCoeff() < 1e-10);

	Matrix Q(2, 2);
	Q << 2.0, 0.7, 0.7, 1.5;
	for (auto [p, q] : {std::pair{1, 0}, std::pair{2, -1}, std::pair{1, 3}})
	{
		const Problem torus = Problem::harmonic_torus(p, q, periodic_grid(32), Q, Q);
		CHECK(residual(torus, analytic_seed(torus, 0.5), 0.5).cwiseAbs().maxCoeff() < 1e-12);
	}
}

TEST_CASE("geodesic curvature of centred circles")
{
	const Problem circle = Problem::cmc_circle(1.0, periodic_grid(32));
	for (double rho : {0.3, 0.9, 1.4})
	{
		const ProblemState s{Vector::Constant(32, rho)};
		CHECK((geodesic_curvature(circle, s, 0.0).array() - 1 / rho).abs().maxCoeff() < 1e-12);
		CHECK((geodesic_curvature(circle, s, 1.0).array() - 1 / std::tan(rho)).abs().maxCoeff() < 1e-10);
		CHECK((geodesic_curvature(circle, s, -1.0).array() - 1 / std::tanh(rho)).abs().maxCoeff() < 1e-10);
	}

	// 1-D minimization oracle: the critical radius of 2 pi (sn - H F) has kappa = H
	for (double lambda : {-1.0, 0.5, 1.0})
	{
		const double H = 2.0;
		auto reduced = [&](double r) { return -2 * M_PI * (sn_lambda(lambda, r).value - H * sn_area_primitive(lambda, r)); };
		double lo = 0.05, hi = 1.2;
		const double phi = 0.5 * (std::sqrt(5.0) - 1);
		for (int it = 0; it < 200; ++it)
		{
			const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
			(reduced(a) < reduced(b) ? hi : lo) = (reduced(a) < reduced(b) ? b : a);
		}
		const double rho = 0.5 * (lo + hi);
		const Vector kappa = geodesic_curvature(Problem::cmc_circle(H, periodic_grid(16)), {Vector::Constant(16, rho)}, lambda);
		CHECK(kappa(0) == doctest::Approx(H).epsilon(1e-6));
		CHECK(geodesic_circle_radius(lambda, H) == doctest::Approx(rho).epsilon(1e-7));
	}

	CHECK_THROWS_AS(geodesic_curvature(flat_torus_problem(), analytic_seed(flat_torus_problem(), 0), 0), UnsupportedError);
}

TEST_CASE("circle residual approximates (kappa - H) sn")
{
	const Problem circle = Problem::cmc_circle(2.0, periodic_grid(128));
	std::mt19937_64 rng(2);
	for (double lambda : {-0.8, 0.0, 1.0})
	{
		const ProblemState s = perturbed(circle, analytic_seed(circle, lambda), smooth_direction(circle, rng), 0.02);
		const Vector kappa = geodesic_curvature(circle, s, lambda);
		const Vector res = residual(circle, s, lambda);
		for (int j = 0; j < 128; ++j)
			CHECK(res(j) == doctest::Approx((kappa(j) - 2.0) * sn_lambda(lambda, s.values(j)).value).epsilon(1e-9));
	}
}

TEST_CASE("profile residual is the curvature defect")
{
	const Problem profile = Problem::cmc_profile(1.0, dirichlet_grid(41, 0, 1), 1.0, 1.0);
	const ProblemState cylinder = analytic_seed(profile, 0.0);
	CHECK(residual(profile, cylinder, 0.0).cwiseAbs().maxCoeff() < 1e-10);
	// for k != 0 the cylinder of radius 1 has mean curvature cs/sn, not H
	const double k = 0.2;
	const auto [sn, cs] = sn_lambda(k, 1.0);
	const auto d = derived_scalars(profile, cylinder, k);
	CHECK(d.at("max_curvature_deviation") == doctest::Approx(std::abs(cs / sn - 1.0)).epsilon(1e-10));
	CHECK(d.at("volume") == doctest::Approx(2 * M_PI * sn_area_primitive(k, 1.0)).epsilon(1e-12));
}

TEST_CASE("gradient, Hessian and symmetry oracles")
{
	std::mt19937_64 rng(99);
	for (const auto &[problem, data] : sample_cases())
	{
		const auto &[state, lambda] = data;
		const Vector res = residual(problem, state, lambda);
		const JacobiOperator J = jacobi(problem, state, lambda);
		const Matrix WJ = J.weighted();
		CHECK((WJ - WJ.transpose()).norm() / WJ.norm() < 1e-10);
		for (int probe = 0; probe < 3; ++probe)
		{
			const Vector v = smooth_direction(problem, rng);
			const double h = 1e-5;
			const ProblemState plus = perturbed(problem, state, v, h), minus = perturbed(problem, state, v, -h);
			const double fd = (value(problem, plus, lambda) - value(problem, minus, lambda)) / (2 * h);
			const double an = J.pairing.inner(res, v);
			CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-3));
			const Vector fd_res = (residual(problem, plus, lambda) - residual(problem, minus, lambda)) / (2 * h);
			const Vector Jv = J.matrix * v;
			CHECK((fd_res - Jv).norm() <= 1e-5 * Jv.norm());
		}
	}
}

TEST_CASE("discrete invariance and Killing-Jacobi fields")
{
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> unit(-1, 1);
	for (const auto &[problem, data] : sample_cases())
	{
		const auto &[state, lambda] = data;
		const int m = problem.motion_dim();
		if (m == 0)
			continue;
		const double f0 = value(problem, state, lambda);
		const Matrix K = killing_jacobi_basis(problem, state, lambda);
		for (int trial = 0; trial < 3; ++trial)
		{
			Vector c(m);
			for (int i = 0; i < m; ++i)
				c(i) = 0.1 * unit(rng) / std::sqrt(m);
			CHECK(std::abs(value(problem, apply_motion(problem, state, lambda, c), lambda) - f0) < 1e-8);
		}
		for (int i = 0; i < m; ++i)
		{
			const double t = 1e-6;
			const Vector e = Vector::Unit(m, i);
			const Vector fd = (state_dofs(problem, apply_motion(problem, state, lambda, t * e)) -
			                   state_dofs(problem, apply_motion(problem, state, lambda, -t * e))) /
			                  (2 * t);
			CHECK((fd - K.col(i)).norm() < 1e-7 * std::max(1.0, K.col(i).norm()));
		}
		CHECK(apply_motion(problem, state, lambda, Vector::Zero(m)).values.isApprox(state.values, 1e-14));
	}
}

TEST_CASE("jacobi spectrum of the flat circle")
{
	const double rho = 0.5;
	const int N = 64;
	const Problem circle = Problem::cmc_circle(2.0, periodic_grid(N));
	const JacobiOperator J = jacobi(circle, {Vector::Constant(N, rho)}, 0.0);
	// uniform weights: J is symmetric
	Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(J.matrix).eigenvalues();
	std::vector<double> expected;
	expected.push_back(-1 / rho);
	for (int k = 1; k < N / 2; ++k)
		expected.insert(expected.end(), 2, (k * k - 1) / rho);
	expected.push_back(((N / 2) * (N / 2) - 1.0) / (2 * rho)); // the Nyquist mode has half the W-norm at quadrature points
	std::sort(expected.begin(), expected.end());
	REQUIRE(expected.size() == static_cast<std::size_t>(N));
	for (int i = 0; i < N - 1; ++i)
		CHECK(ev(i) == doctest::Approx(expected[i]).epsilon(1e-10).scale(1.0));
	CHECK((ev.array().abs() < 1e-8).count() == 2);

	const Matrix K = killing_jacobi_basis(circle, {Vector::Constant(N, rho)}, 0.0);
	CHECK(K.col(0).norm() < 1e-13);
	CHECK((K.col(1).array() - circle.grid.nodes.array().cos()).abs().maxCoeff() < 1e-13);
	CHECK((K.col(2).array() - circle.grid.nodes.array().sin()).abs().maxCoeff() < 1e-13);
}

TEST_CASE("harmonic kernels at critical maps")
{
	const Problem torus = flat_torus_problem(32);
	const JacobiOperator Jt = jacobi(torus, analytic_seed(torus, 0.4), 0.4);
	const Vector et = Eigen::SelfAdjointEigenSolver<Matrix>(Jt.matrix).eigenvalues();
	CHECK((et.array().abs() < 1e-8).count() == 2);
	CHECK(et.minCoeff() > -1e-10);

	const Problem sphere = Problem::harmonic_sphere(periodic_grid(32));
	const ProblemState eq = analytic_seed(sphere, 1.0);
	CHECK(residual(sphere, eq, 1.0).cwiseAbs().maxCoeff() < 1e-12);
	const JacobiOperator Js = jacobi(sphere, eq, 1.0);
	const Vector es = Eigen::SelfAdjointEigenSolver<Matrix>(Js.matrix).eigenvalues();
	CHECK((es.array().abs() < 1e-8).count() == 3);
	const Matrix K = killing_jacobi_basis(sphere, eq, 1.0);
	Eigen::JacobiSVD<Matrix> svd(K);
	svd.setThreshold(1e-10);
	CHECK(svd.rank() == 3);
	CHECK((Js.matrix * K).norm() < 1e-10);

	const auto d = derived_scalars(sphere, eq, 2.0);
	CHECK(d.at("length_sqrt_lambda") == doctest::Approx(2 * M_PI).epsilon(1e-13));
	const auto dt = derived_scalars(torus, analytic_seed(torus, 1.0), 1.0);
	CHECK(dt.at("length") == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("Killing-Jacobi annihilation at critical states")
{
	const Problem circle = Problem::cmc_circle(2.0, periodic_grid(96));
	for (double lambda : {-2.0, 0.0, 1.0})
	{
		const ProblemState seed = analytic_seed(circle, lambda);
		const ProblemState moved = apply_motion(circle, seed, lambda, Eigen::Vector3d(0.3, 0.05, -0.04));
		CHECK(residual(circle, moved, lambda).norm() < 1e-9);
		const JacobiOperator J = jacobi(circle, moved, lambda);
		const Matrix K = killing_jacobi_basis(circle, moved, lambda);
		for (int i = 1; i < 3; ++i)
			CHECK(J.pairing.norm(J.matrix * K.col(i)) < 1e-6 * J.pairing.norm(K.col(i)));
	}
}

TEST_CASE("spectral convergence on off-centre circles")
{
	auto res_norm = [](int N) {
		const Problem circle = Problem::cmc_circle(2.0, periodic_grid(N));
		const ProblemState s = offset_circle(circle, 0.5, 0.15);
		return dof_pairing(circle).norm(residual(circle, s, 0.0));
	};
	const double r16 = res_norm(16), r32 = res_norm(32), r64 = res_norm(64), r128 = res_norm(128);
	CHECK(r16 / r32 > 1e2);
	CHECK((r64 / r128 > 1e2 || r128 < 1e-12));
}

TEST_CASE("problem construction and domain errors")
{
	CHECK_THROWS_AS(Problem::harmonic_sphere(periodic_grid(32, DiffOrder::Fourth)), UnsupportedError);
	CHECK_THROWS_AS(Problem::cmc_circle(2.0, dirichlet_grid(16, 0, 1)), PreconditionError);
	const Problem circle = Problem::cmc_circle(2.0, periodic_grid(16));
	Vector r = Vector::Constant(16, 0.5);
	r(3) = -0.1;
	CHECK_THROWS_AS(value(circle, {r}, 0.0), DomainError);
	CHECK_THROWS_AS(residual(circle, {Vector::Constant(16, 3.1)}, 1.0), DomainError);
	CHECK_THROWS_AS(analytic_seed(circle, -4.0), DomainError);
	CHECK_THROWS_AS(value(circle, {Vector::Constant(15, 0.5)}, 0.0), ShapeError);
}
