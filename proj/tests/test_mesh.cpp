#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equideform/mesh.hpp"

#include <cmath>

using namespace equideform;

namespace
{
	double max_error_periodic(int N, DiffOrder order, int deriv)
	{
		const Grid g = periodic_grid(N, order);
		const Vector f = g.nodes.array().cos();
		const Vector exact = deriv == 1 ? Vector(-g.nodes.array().sin()) : Vector(-g.nodes.array().cos());
		return (diff_apply(g, deriv, f) - exact).cwiseAbs().maxCoeff();
	}

	double max_error_dirichlet(int N, DiffOrder order, int deriv)
	{
		const Grid g = dirichlet_grid(N, 0.0, 1.0, order);
		const Vector f = g.nodes.array().exp().sin();
		const Vector e = g.nodes.array().exp();
		Vector exact;
		if (deriv == 1)
			exact = e.array() * e.array().cos();
		else
			exact = e.array() * e.array().cos() - e.array().square() * e.array().sin();
		return (diff_apply(g, deriv, f) - exact).cwiseAbs().maxCoeff();
	}
} // namespace

TEST_CASE("spectral periodic differentiation is exact on trigonometric polynomials")
{
	for (int N : {16, 17})
	{
		const Grid g = periodic_grid(N);
		for (int k = 0; k <= 7; ++k)
		{
			const Vector s = (k * g.nodes.array()).sin();
			const Vector c = (k * g.nodes.array()).cos();
			CHECK((diff_apply(g, 1, s) - k * c).cwiseAbs().maxCoeff() < 1e-12);
			CHECK((diff_apply(g, 2, c) + k * k * c).cwiseAbs().maxCoeff() < 1e-11);
		}
		CHECK(g.diff1.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
	}
	const Grid g = periodic_grid(32);
	const Vector s = g.nodes.array().sin();
	CHECK((diff_apply(g, 2, s) + s).cwiseAbs().maxCoeff() < 1e-12);
	// exactly antisymmetric after conjugation with uniform weights
	CHECK((g.diff1 + g.diff1.transpose()).norm() < 1e-13);
}

TEST_CASE("finite-difference convergence orders")
{
	for (auto [order, nominal] : {std::pair{DiffOrder::Second, 2.0}, std::pair{DiffOrder::Fourth, 4.0}})
		for (int deriv : {1, 2})
		{
			const double slope_p =
			    std::log(max_error_periodic(32, order, deriv) / max_error_periodic(64, order, deriv)) / std::log(2.0);
			CHECK(std::abs(slope_p - nominal) < 0.2);
			const double slope_d = std::log(max_error_dirichlet(81, order, deriv) / max_error_dirichlet(161, order, deriv)) /
			                       std::log(160.0 / 80.0);
			CHECK(std::abs(slope_d - nominal) < 0.2);
		}
}

TEST_CASE("Dirichlet polynomial exactness")
{
	const Grid g = dirichlet_grid(10, 0.0, 1.0, DiffOrder::Fourth);
	const Vector x = g.nodes;
	CHECK((diff_apply(g, 1, x.array().cube().matrix()) - Vector(3 * x.array().square())).cwiseAbs().maxCoeff() < 1e-12);
	CHECK((diff_apply(g, 2, x.array().square().matrix()) - Vector::Constant(10, 2.0)).cwiseAbs().maxCoeff() < 1e-11);
	CHECK(g.nodes(0) == 0.0);
	CHECK(g.nodes(9) == 1.0);
}

TEST_CASE("quadrature")
{
	for (int N : {4, 5, 10, 11, 64})
		for (auto order : {DiffOrder::Second, DiffOrder::Fourth})
		{
			const Grid g = dirichlet_grid(N, -0.5, 2.0, order);
			CHECK(g.quad.sum() == doctest::Approx(2.5).epsilon(1e-14));
			CHECK((g.quad.array() > 0).all());
			if (order == DiffOrder::Fourth)
			{
				// Simpson and 3/8 are exact on cubics
				const Vector c = g.nodes.array().cube();
				CHECK(g.quad.dot(c) == doctest::Approx((std::pow(2.0, 4) - std::pow(-0.5, 4)) / 4).epsilon(1e-13));
			}
		}
	const Grid p = periodic_grid(64);
	CHECK(pairing_weights(p).inner(Vector::Ones(64), Vector::Ones(64)) == doctest::Approx(2 * M_PI).epsilon(1e-13));
}

TEST_CASE("pairing weights")
{
	const Grid g = periodic_grid(16);
	const Pairing unit = pairing_weights(g, Vector::Ones(16));
	CHECK((unit.weights.array() - 2 * M_PI / 16).abs().maxCoeff() < 1e-15);
	const Pairing twice = pairing_weights(g, Vector::Constant(16, 2.0));
	CHECK((twice.weights - 2 * unit.weights).norm() == 0.0);
	Vector bad = Vector::Ones(16);
	bad(3) = 0.0;
	CHECK_THROWS_AS(pairing_weights(g, bad), DomainError);
	CHECK_THROWS_AS(pairing_weights(g, Vector::Ones(15)), ShapeError);
}

TEST_CASE("grid construction errors")
{
	CHECK_THROWS_AS(dirichlet_grid(10, 0, 1, DiffOrder::Spectral), UnsupportedError);
	CHECK_THROWS_AS(periodic_grid(7), PreconditionError);
	CHECK_THROWS_AS(dirichlet_grid(3, 0, 1), PreconditionError);
	const Grid g = periodic_grid(16);
	CHECK_THROWS_AS(diff_apply(g, 1, Vector::Ones(17)), ShapeError);
	CHECK(diff_apply(g, 1, Vector::Constant(16, 3.0)).norm() < 1e-13);
}

TEST_CASE("trigonometric interpolant")
{
	for (int N : {16, 21})
	{
		const Grid g = periodic_grid(N);
		auto f = [](double x) { return 1.0 + 0.3 * std::cos(2 * x) - 0.2 * std::sin(5 * x); };
		auto df = [](double x) { return -0.6 * std::sin(2 * x) - 1.0 * std::cos(5 * x); };
		Vector values(N);
		for (int j = 0; j < N; ++j)
			values(j) = f(g.nodes(j));
		const TrigInterpolant I(g, values);
		for (double x : {0.1, 1.7, 4.0, 6.2})
		{
			CHECK(I(x) == doctest::Approx(f(x)).epsilon(1e-13));
			CHECK(I.derivative(x) == doctest::Approx(df(x)).epsilon(1e-12));
		}
		for (int j = 0; j < N; ++j)
			CHECK(I(g.nodes(j)) == doctest::Approx(values(j)).epsilon(1e-13));
	}
}

TEST_CASE("oversampled quadrature operators")
{
	const Grid g = periodic_grid(16);
	const auto ops = quadrature_operators(g);
	REQUIRE(ops.P.rows() == 32);
	for (int j = 0; j < 16; ++j)
	{
		CHECK((ops.P.row(2 * j) - Vector::Unit(16, j).transpose()).norm() < 1e-14);
		CHECK((ops.Pd.row(2 * j) - g.diff1.row(j)).norm() < 1e-12);
	}
	// the sawtooth is invisible to the collocation derivative but not to the oversampled one
	Vector saw(16);
	for (int j = 0; j < 16; ++j)
		saw(j) = j % 2 ? -1.0 : 1.0;
	CHECK(diff_apply(g, 1, saw).norm() < 1e-12);
	CHECK(ops.w.dot((ops.Pd * saw).cwiseAbs2()) == doctest::Approx(M_PI * 64).epsilon(1e-12));
	// Dirichlet form of a smooth mode agrees with the collocation value
	const Vector c = (3 * g.nodes.array()).cos();
	CHECK(ops.w.dot((ops.Pd * c).cwiseAbs2()) == doctest::Approx(9 * M_PI).epsilon(1e-13));

	const Grid d = dirichlet_grid(9, 0, 1);
	const auto dops = quadrature_operators(d);
	CHECK((dops.P - Matrix::Identity(9, 9)).norm() == 0.0);
	CHECK((dops.w - d.quad).norm() == 0.0);
}
