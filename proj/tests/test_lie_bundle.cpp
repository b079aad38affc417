#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "equideform/lie_bundle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace equideform;

namespace
{
	Matrix random_antisymmetric(int n, std::mt19937_64 &rng)
	{
		std::normal_distribution<double> normal;
		Matrix D = Matrix::Zero(n, n);
		for (int i = 0; i < n; ++i)
			for (int j = i + 1; j < n; ++j)
			{
				D(i, j) = normal(rng);
				D(j, i) = -D(i, j);
			}
		return D;
	}

	Vector random_vector(int n, std::mt19937_64 &rng)
	{
		std::normal_distribution<double> normal;
		Vector v(n);
		for (int i = 0; i < n; ++i)
			v(i) = normal(rng);
		return v;
	}
} // namespace

TEST_CASE("eta_form values and errors")
{
	CHECK((eta_form(1.0, 2).matrix - Matrix::Identity(3, 3)).norm() == 0.0);
	const Matrix e4 = eta_form(4.0, 2).matrix;
	CHECK(e4(0, 0) == doctest::Approx(0.5));
	CHECK(e4(1, 1) == doctest::Approx(2.0));
	CHECK(e4(2, 2) == doctest::Approx(2.0));
	const Matrix em = eta_form(-1.0, 2).matrix;
	CHECK(em(0, 0) == -1.0);
	CHECK(em(1, 1) == 1.0);
	CHECK_THROWS_AS(eta_form(0.0, 2), DomainError);
}

TEST_CASE("algebra_basis is invariant and closed")
{
	for (double lambda : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0})
		for (int n : {2, 3})
		{
			const auto basis = algebra_basis(lambda, n);
			REQUIRE(basis.elements.size() == static_cast<std::size_t>(n * (n + 1) / 2));
			for (const auto &e : basis.elements)
			{
				CHECK(invariance_residual<double>(e.mat, lambda) < 1e-13);
				CHECK((e.D + e.D.transpose()).norm() == 0.0);
			}
			CHECK(bracket_closure_residual(basis) < 1e-12);

			Matrix stacked(static_cast<Eigen::Index>((n + 1) * (n + 1)), basis.elements.size());
			for (std::size_t i = 0; i < basis.elements.size(); ++i)
				stacked.col(i) = basis.elements[i].mat.reshaped();
			CHECK(Eigen::JacobiSVD<Matrix>(stacked).singularValues().minCoeff() > 0.5);
		}
}

TEST_CASE("algebra_basis at lambda = 0 has zero first row")
{
	for (const auto &e : algebra_basis(0.0, 3).elements)
		CHECK(e.mat.row(0).norm() == 0.0);
}

TEST_CASE("bracket closure detects a broken basis")
{
	auto mats = algebra_basis(1.0, 2).matrices();
	Matrix S(3, 3);
	S << 1, 2, 0, 2, -1, 3, 0, 3, 2;
	mats[1] = S;
	CHECK(bracket_closure_residual(mats) > 0.1);
}

TEST_CASE("invariance_residual examples")
{
	const Matrix R = embed_generator<double>(1.0, rotation_generator<double>(2, 0, 1), Vector::Zero(2));
	CHECK(invariance_residual<double>(R, 1.0) == 0.0);
	CHECK(invariance_residual<double>(Matrix::Identity(3, 3), 1.0) == doctest::Approx(2.0 * std::sqrt(3.0)));
	const Matrix T = embed_generator<double>(-1.0, Matrix::Zero(2, 2), Vector::Unit(2, 0));
	CHECK(invariance_residual<double>(T, -1.0) < 1e-15);
}

TEST_CASE("translation brackets are proportional to lambda")
{
	std::mt19937_64 rng(7);
	for (double lambda : {-2.0, -0.5, 0.0, 1.0, 3.0})
	{
		const Vector u = random_vector(3, rng);
		const Vector v = random_vector(3, rng);
		const Matrix Tu = embed_generator<double>(lambda, Matrix::Zero(3, 3), u);
		const Matrix Tv = embed_generator<double>(lambda, Matrix::Zero(3, 3), v);
		const Matrix expected =
		    embed_generator<double>(lambda, -lambda * (u * v.transpose() - v * u.transpose()), Vector::Zero(3));
		CHECK((Tu * Tv - Tv * Tu - expected).norm() < 1e-13);
	}
}

TEST_CASE("expm agrees with an independent implementation")
{
	std::mt19937_64 rng(11);
	for (int trial = 0; trial < 20; ++trial)
	{
		const double scale = 0.1 * (trial + 1);
		Matrix A = Matrix::Random(4, 4) * scale;
		const Matrix ours = expm<double>(A);
		const Matrix ref = A.exp();
		CHECK((ours - ref).norm() / ref.norm() < 1e-13);
	}
}

TEST_CASE("complement and slice check")
{
	auto r = complement_and_slice_check(1.0, 2, 200, 42);
	CHECK(r.complement_rank == 9);
	CHECK(r.min_off_identity_residual > 1e-3);
	CHECK(r.passed);

	r = complement_and_slice_check(0.0, 2, 200, 42);
	CHECK(r.complement_rank == 9);
	CHECK(r.identity_residual == 0.0);
	CHECK(r.passed);

	r = complement_and_slice_check(-1.0, 3, 200, 42);
	CHECK(r.complement_rank == 16);
	CHECK(r.passed);

	const auto again = complement_and_slice_check(-1.0, 3, 200, 42);
	CHECK(again.min_off_identity_residual == r.min_off_identity_residual);
	CHECK_THROWS_AS(complement_and_slice_check(1.0, 2, 0, 1), PreconditionError);
}

TEST_CASE("slice elements enforce their invariants")
{
	Matrix B = Matrix::Identity(2, 2);
	CHECK_NOTHROW(make_slice_element<double>(1.0, Vector::Zero(2), B));
	CHECK_THROWS_AS(make_slice_element<double>(-1.0, Vector::Zero(2), B), DomainError);
	B(0, 0) = -1;
	CHECK_THROWS_AS(make_slice_element<double>(1.0, Vector::Zero(2), B), DomainError);
}

TEST_CASE("section examples")
{
	GroupWord<double> translation{{{Matrix::Zero(2, 2), Vector::Unit(2, 0)}}, 0.0};
	const Matrix g = section(translation, 0.0);
	const Matrix expected =
	    Matrix::Identity(3, 3) + embed_generator<double>(0.0, Matrix::Zero(2, 2), Vector::Unit(2, 0));
	CHECK((g - expected).norm() < 1e-15);

	GroupWord<double> rotation{{{M_PI / 2 * rotation_generator<double>(2, 0, 1), Vector::Zero(2)}}, 1.0};
	const Matrix q = section(rotation, 1.0);
	CHECK(group_membership_residual<double>(q, 1.0) < 1e-14);
	CHECK(std::abs(q(2, 1) - 1.0) < 1e-14);

	std::mt19937_64 rng(3);
	GroupWord<double> word{{{random_antisymmetric(2, rng), random_vector(2, rng)},
	                        {random_antisymmetric(2, rng), random_vector(2, rng)}},
	                       1.0};
	Matrix h = Matrix::Identity(3, 3);
	for (const auto &[D, u] : word.letters)
		h = h * embed_generator<double>(1.0, D, u).exp();
	CHECK((section(word, 1.0) - h).norm() < 1e-12);
	for (int i = 0; i <= 20; ++i)
	{
		const double lambda = -1.0 + 0.1 * i;
		CHECK(group_membership_residual<double>(section(word, lambda), lambda) < 1e-10);
	}
	CHECK_THROWS_AS(section(GroupWord<double>{{}, 0.0}, 0.0), PreconditionError);
}

TEST_CASE("deformed bracket")
{
	const auto pair = ReductivePair<double>::space_form(3);
	std::mt19937_64 rng(5);
	auto random_element = [&]() {
		return PairElement<double>{random_vector(pair.k_dim(), rng), random_vector(pair.m_dim(), rng)};
	};
	auto as_vector = [](const PairElement<double> &z) {
		Vector out(z.k.size() + z.m.size());
		out << z.k, z.m;
		return out;
	};
	auto add = [](const PairElement<double> &a, const PairElement<double> &b, const PairElement<double> &c) {
		return PairElement<double>{a.k + b.k + c.k, a.m + b.m + c.m};
	};

	for (double lambda : {-1.0, 0.0, 0.5, 1.0})
		for (int trial = 0; trial < 100; ++trial)
		{
			const auto x = random_element(), y = random_element(), z = random_element();
			const auto xy = deformed_bracket(lambda, x, y, pair);
			const auto yx = deformed_bracket(lambda, y, x, pair);
			CHECK((as_vector(xy) + as_vector(yx)).norm() == 0.0);
			const auto cyclic = add(deformed_bracket(lambda, x, deformed_bracket(lambda, y, z, pair), pair),
			                        deformed_bracket(lambda, y, deformed_bracket(lambda, z, x, pair), pair),
			                        deformed_bracket(lambda, z, deformed_bracket(lambda, x, y, pair), pair));
			CHECK(as_vector(cyclic).norm() < 1e-12);
		}

	// lambda = 1: matrix commutator expressed in k + m coordinates
	const auto x = random_element(), y = random_element();
	const Matrix X = pair.k_part(x.k) + pair.m_part(x.m);
	const Matrix Y = pair.k_part(y.k) + pair.m_part(y.m);
	const auto [coords, residual] = pair.decompose(X * Y - Y * X);
	CHECK(residual < 1e-14);
	CHECK((as_vector(deformed_bracket(1.0, x, y, pair)) - coords).norm() < 1e-14);

	// lambda = 0 kills m x m
	const PairElement<double> v{Vector::Zero(pair.k_dim()), random_vector(pair.m_dim(), rng)};
	const PairElement<double> w{Vector::Zero(pair.k_dim()), random_vector(pair.m_dim(), rng)};
	CHECK(as_vector(deformed_bracket(0.0, v, w, pair)).norm() == 0.0);
}

TEST_CASE("reductive pair rejects non-reductive data")
{
	const auto basis = algebra_basis(1.0, 2).matrices();
	// [R, T1] = T2 leaves k = span{R, T1}
	CHECK_THROWS_AS(ReductivePair<double>({basis[0], basis[1]}, {basis[2]}), PreconditionError);
}
