#pragma once

// Bundle of isometry algebras/groups of the space forms M^n(lambda), realized inside gl(n+1).
//
// For every real lambda the generators
//
//     L_lambda(D, u) = [ 0   -lambda u^T ]
//                      [ u        D      ]      D in so(n), u in R^n
//
// span a Lie subalgebra g_lambda of dimension n(n+1)/2. For lambda != 0 it is the algebra of the
// group SO(eta_lambda) preserving the diagonal form eta_lambda; for lambda = 0 it is the Euclidean
// algebra R^n x| so(n). The family is smooth in lambda even though the group type changes from
// SO(n,1) to SO(n+1) across lambda = 0.
//
// Basis ordering convention: rotations L(E_ab, 0) for a < b in lexicographic order, with
// E_ab = e_b e_a^T - e_a e_b^T (so E_01 generates counterclockwise rotation of the (x1, x2)
// plane), then translations L(0, e_k).

#include "equideform/core.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace equideform
{
	template <typename Scalar>
	MatrixX<Scalar> embed_generator(Scalar lambda, const MatrixX<Scalar> &D, const VectorX<Scalar> &u)
	{
		const Eigen::Index n = u.size();
		if (D.rows() != n || D.cols() != n)
			throw ShapeError("embed_generator: D must be n x n with n = u.size()");
		MatrixX<Scalar> mat = MatrixX<Scalar>::Zero(n + 1, n + 1);
		mat.block(0, 1, 1, n) = -lambda * u.transpose();
		mat.block(1, 0, n, 1) = u;
		mat.block(1, 1, n, n) = D;
		return mat;
	}

	template <typename Scalar>
	struct AlgebraElement
	{
		Scalar lambda;
		MatrixX<Scalar> D;
		VectorX<Scalar> u;
		MatrixX<Scalar> mat;
	};

	template <typename Scalar>
	AlgebraElement<Scalar> make_element(Scalar lambda, const MatrixX<Scalar> &D, const VectorX<Scalar> &u)
	{
		if ((D + D.transpose()).norm() != Scalar(0))
			throw DomainError("make_element: rotation block must be antisymmetric");
		return {lambda, D, u, embed_generator(lambda, D, u)};
	}

	// E_ab = e_b e_a^T - e_a e_b^T
	template <typename Scalar>
	MatrixX<Scalar> rotation_generator(int n, int a, int b)
	{
		MatrixX<Scalar> E = MatrixX<Scalar>::Zero(n, n);
		E(b, a) = Scalar(1);
		E(a, b) = Scalar(-1);
		return E;
	}

	template <typename Scalar>
	struct AlgebraBasis
	{
		Scalar lambda;
		int n;
		std::vector<AlgebraElement<Scalar>> elements;

		std::vector<MatrixX<Scalar>> matrices() const
		{
			std::vector<MatrixX<Scalar>> out;
			out.reserve(elements.size());
			for (const auto &e : elements)
				out.push_back(e.mat);
			return out;
		}
	};

	template <typename Scalar>
	AlgebraBasis<Scalar> algebra_basis(Scalar lambda, int n)
	{
		if (n < 2)
			throw DomainError("algebra_basis: n must be at least 2");
		AlgebraBasis<Scalar> basis{lambda, n, {}};
		const VectorX<Scalar> zero_u = VectorX<Scalar>::Zero(n);
		for (int a = 0; a < n; ++a)
			for (int b = a + 1; b < n; ++b)
				basis.elements.push_back(make_element(lambda, rotation_generator<Scalar>(n, a, b), zero_u));
		const MatrixX<Scalar> zero_D = MatrixX<Scalar>::Zero(n, n);
		for (int k = 0; k < n; ++k)
			basis.elements.push_back(make_element<Scalar>(lambda, zero_D, VectorX<Scalar>::Unit(n, k)));
		return basis;
	}

	template <typename Scalar>
	struct QuadraticForm
	{
		Scalar lambda;
		MatrixX<Scalar> matrix;
	};

	template <typename Scalar>
	QuadraticForm<Scalar> eta_form(Scalar lambda, int n)
	{
		using std::sqrt;
		if (lambda == Scalar(0))
			throw DomainError("eta_form: the invariant form degenerates at lambda = 0");
		if (n < 2)
			throw DomainError("eta_form: n must be at least 2");
		const Scalar s = sqrt(lambda > 0 ? lambda : -lambda);
		VectorX<Scalar> diag(n + 1);
		diag(0) = (lambda > 0 ? Scalar(1) : Scalar(-1)) / s;
		diag.tail(n).setConstant(s);
		return {lambda, diag.asDiagonal()};
	}

	/// Frobenius-norm residual of the linearized membership condition X in g_lambda.
	template <typename Scalar>
	Scalar invariance_residual(const MatrixX<Scalar> &X, Scalar lambda)
	{
		if (X.rows() != X.cols() || X.rows() < 3)
			throw ShapeError("invariance_residual: X must be square of size n+1 >= 3");
		const int n = static_cast<int>(X.rows()) - 1;
		if (lambda != Scalar(0))
		{
			const MatrixX<Scalar> eta = eta_form(lambda, n).matrix;
			return (X.transpose() * eta + eta * X).norm();
		}
		const MatrixX<Scalar> D = X.bottomRightCorner(n, n);
		return X.row(0).norm() + (D + D.transpose()).norm();
	}

	/// Residual of the group membership g in G_lambda.
	/// lambda != 0: || g^T eta g - eta ||; lambda = 0: block form (1 0; R^n SO(n)).
	template <typename Scalar>
	Scalar group_membership_residual(const MatrixX<Scalar> &g, Scalar lambda)
	{
		using std::abs;
		if (g.rows() != g.cols() || g.rows() < 3)
			throw ShapeError("group_membership_residual: g must be square of size n+1 >= 3");
		const int n = static_cast<int>(g.rows()) - 1;
		if (lambda != Scalar(0))
		{
			const MatrixX<Scalar> eta = eta_form(lambda, n).matrix;
			return (g.transpose() * eta * g - eta).norm();
		}
		VectorX<Scalar> first = g.row(0).transpose();
		first(0) -= Scalar(1);
		const MatrixX<Scalar> B = g.bottomRightCorner(n, n);
		return first.norm() + (B.transpose() * B - MatrixX<Scalar>::Identity(n, n)).norm() +
		       abs(B.determinant() - Scalar(1));
	}

	/// Violation of the explicit defining equations of G_lambda for g = (a v^T; w B):
	/// a v + lambda B^T w = 0, a^2 + lambda |w|^2 = 1, v v^T + lambda B^T B = lambda I.
	/// At lambda = 0 these equations lose B, so the G_0 block form is tested instead.
	template <typename Scalar>
	Scalar defining_equations_residual(const MatrixX<Scalar> &g, Scalar lambda)
	{
		using std::abs;
		const int n = static_cast<int>(g.rows()) - 1;
		const Scalar a = g(0, 0);
		const VectorX<Scalar> v = g.block(0, 1, 1, n).transpose();
		const VectorX<Scalar> w = g.block(1, 0, n, 1);
		const MatrixX<Scalar> B = g.bottomRightCorner(n, n);
		const MatrixX<Scalar> I = MatrixX<Scalar>::Identity(n, n);
		if (lambda == Scalar(0))
			return abs(a - Scalar(1)) + v.norm() + (B.transpose() * B - I).norm() + abs(B.determinant() - Scalar(1));
		return (a * v + lambda * B.transpose() * w).norm() + abs(a * a + lambda * w.squaredNorm() - Scalar(1)) +
		       (v * v.transpose() + lambda * B.transpose() * B - lambda * I).norm();
	}

	/// Max over basis pairs of the least-squares residual of [X_i, X_j] against span(basis).
	template <typename Scalar>
	Scalar bracket_closure_residual(const std::vector<MatrixX<Scalar>> &basis)
	{
		if (basis.empty())
			return Scalar(0);
		const Eigen::Index dim = basis.front().size();
		MatrixX<Scalar> stacked(dim, static_cast<Eigen::Index>(basis.size()));
		for (std::size_t i = 0; i < basis.size(); ++i)
			stacked.col(i) = basis[i].reshaped();
		const Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(stacked);
		Scalar worst(0);
		for (std::size_t i = 0; i < basis.size(); ++i)
			for (std::size_t j = i + 1; j < basis.size(); ++j)
			{
				const MatrixX<Scalar> c = basis[i] * basis[j] - basis[j] * basis[i];
				const VectorX<Scalar> rhs = c.reshaped();
				const VectorX<Scalar> coeffs = qr.solve(rhs);
				const Scalar r = (stacked * coeffs - rhs).norm();
				if (r > worst)
					worst = r;
			}
		return worst;
	}

	template <typename Scalar>
	Scalar bracket_closure_residual(const AlgebraBasis<Scalar> &basis)
	{
		return bracket_closure_residual(basis.matrices());
	}

	/// Coordinates of Z in the (assumed linearly independent) basis, least squares.
	template <typename Scalar>
	VectorX<Scalar> basis_coordinates(const std::vector<MatrixX<Scalar>> &basis, const MatrixX<Scalar> &Z)
	{
		MatrixX<Scalar> stacked(Z.size(), static_cast<Eigen::Index>(basis.size()));
		for (std::size_t i = 0; i < basis.size(); ++i)
			stacked.col(i) = basis[i].reshaped();
		return stacked.colPivHouseholderQr().solve(VectorX<Scalar>(Z.reshaped()));
	}

	/// Matrix exponential by scaling and squaring with the degree-13 Pade approximant.
	template <typename Scalar>
	MatrixX<Scalar> expm(const MatrixX<Scalar> &A)
	{
		using std::ceil;
		using std::log2;
		if (A.rows() != A.cols())
			throw ShapeError("expm: matrix must be square");
		static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
		                           1187353796428800.0,  129060195264000.0,   10559470521600.0,
		                           670442572800.0,      33522128640.0,       1323241920.0,
		                           40840800.0,          960960.0,            16380.0,
		                           182.0,               1.0};
		const Scalar theta13(5.371920351148152);
		const Eigen::Index n = A.rows();
		const Scalar norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
		int squarings = 0;
		if (norm1 > theta13)
			squarings = static_cast<int>(ceil(log2(norm1 / theta13)));
		const MatrixX<Scalar> As = A / Scalar(std::ldexp(1.0, squarings));
		const MatrixX<Scalar> I = MatrixX<Scalar>::Identity(n, n);
		const MatrixX<Scalar> A2 = As * As;
		const MatrixX<Scalar> A4 = A2 * A2;
		const MatrixX<Scalar> A6 = A4 * A2;
		const MatrixX<Scalar> U =
		    As * (A6 * (Scalar(b[13]) * A6 + Scalar(b[11]) * A4 + Scalar(b[9]) * A2) + Scalar(b[7]) * A6 +
		          Scalar(b[5]) * A4 + Scalar(b[3]) * A2 + Scalar(b[1]) * I);
		const MatrixX<Scalar> V = A6 * (Scalar(b[12]) * A6 + Scalar(b[10]) * A4 + Scalar(b[8]) * A2) +
		                          Scalar(b[6]) * A6 + Scalar(b[4]) * A4 + Scalar(b[2]) * A2 + Scalar(b[0]) * I;
		MatrixX<Scalar> R = (V - U).partialPivLu().solve(V + U);
		for (int k = 0; k < squarings; ++k)
			R = R * R;
		return R;
	}

	/// Positive slice element (a v^T; 0 B) of the submanifold A transversal to every G_lambda.
	template <typename Scalar>
	struct SliceElement
	{
		Scalar a;
		VectorX<Scalar> v;
		MatrixX<Scalar> B;
		MatrixX<Scalar> mat;
	};

	template <typename Scalar>
	SliceElement<Scalar> make_slice_element(Scalar a, const VectorX<Scalar> &v, const MatrixX<Scalar> &B)
	{
		const Eigen::Index n = v.size();
		if (!(a > Scalar(0)))
			throw DomainError("make_slice_element: a must be positive");
		if (B.rows() != n || B.cols() != n)
			throw ShapeError("make_slice_element: B must be n x n");
		if ((B - B.transpose()).norm() != Scalar(0))
			throw DomainError("make_slice_element: B must be symmetric");
		if (Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>>(B, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() <=
		    Scalar(0))
			throw DomainError("make_slice_element: B must be positive definite");
		MatrixX<Scalar> mat = MatrixX<Scalar>::Zero(n + 1, n + 1);
		mat(0, 0) = a;
		mat.block(0, 1, 1, n) = v.transpose();
		mat.bottomRightCorner(n, n) = B;
		return {a, v, B, mat};
	}

	struct CheckReport
	{
		double lambda = 0;
		int n = 0;
		int complement_rank = 0;
		int expected_rank = 0;
		double complement_min_singular_value = 0;
		int n_samples = 0;
		std::uint64_t seed = 0;
		double min_off_identity_residual = 0;
		double identity_residual = 0;
		bool passed = false;
	};

	/// Basis of the complement a = (R R^n; 0 Sym_n) of every g_lambda in gl(n+1).
	template <typename Scalar>
	std::vector<MatrixX<Scalar>> complement_basis(int n)
	{
		std::vector<MatrixX<Scalar>> out;
		const MatrixX<Scalar> zero = MatrixX<Scalar>::Zero(n + 1, n + 1);
		MatrixX<Scalar> m = zero;
		m(0, 0) = 1;
		out.push_back(m);
		for (int k = 1; k <= n; ++k)
		{
			m = zero;
			m(0, k) = 1;
			out.push_back(m);
		}
		for (int i = 1; i <= n; ++i)
			for (int j = i; j <= n; ++j)
			{
				m = zero;
				m(i, j) = 1;
				m(j, i) = 1;
				out.push_back(m);
			}
		return out;
	}

	/// Verifies g_lambda (+) a = gl(n+1) by rank and probes G_lambda cap A = {1} on seeded samples.
	template <typename Scalar>
	CheckReport complement_and_slice_check(Scalar lambda, int n, int n_samples, std::uint64_t seed)
	{
		if (n_samples < 1)
			throw PreconditionError("complement_and_slice_check: n_samples must be >= 1");
		CheckReport report;
		report.lambda = static_cast<double>(lambda);
		report.n = n;
		report.n_samples = n_samples;
		report.seed = seed;
		report.expected_rank = (n + 1) * (n + 1);

		std::vector<MatrixX<Scalar>> columns = algebra_basis(lambda, n).matrices();
		for (auto &m : complement_basis<Scalar>(n))
			columns.push_back(std::move(m));
		MatrixX<Scalar> stacked((n + 1) * (n + 1), static_cast<Eigen::Index>(columns.size()));
		for (std::size_t i = 0; i < columns.size(); ++i)
			stacked.col(i) = columns[i].reshaped();
		const Eigen::JacobiSVD<MatrixX<Scalar>> svd(stacked);
		const VectorX<Scalar> sv = svd.singularValues();
		report.complement_rank = static_cast<int>((sv.array() > Scalar(1e-12) * sv(0)).count());
		report.complement_min_singular_value = static_cast<double>(sv(sv.size() - 1));

		const MatrixX<Scalar> I = MatrixX<Scalar>::Identity(n + 1, n + 1);
		report.identity_residual = static_cast<double>(defining_equations_residual<Scalar>(I, lambda));

		std::mt19937_64 rng(seed);
		std::normal_distribution<double> normal(0.0, 1.0);
		double worst = std::numeric_limits<double>::infinity();
		for (int s = 0; s < n_samples; ++s)
		{
			SliceElement<Scalar> g;
			do
			{
				const Scalar a = Scalar(std::exp(0.5 * normal(rng)));
				VectorX<Scalar> v(n);
				for (int k = 0; k < n; ++k)
					v(k) = Scalar(0.5 * normal(rng));
				MatrixX<Scalar> S(n, n);
				for (int i = 0; i < n; ++i)
					for (int j = 0; j <= i; ++j)
						S(i, j) = S(j, i) = Scalar(0.5 * normal(rng));
				const MatrixX<Scalar> E = expm<Scalar>(S);
				const MatrixX<Scalar> B = (E + E.transpose()) / Scalar(2);
				g = make_slice_element<Scalar>(a, v, B);
			} while ((g.mat - I).norm() < Scalar(0.05));
			worst = std::min(worst, static_cast<double>(defining_equations_residual<Scalar>(g.mat, lambda)));
		}
		report.min_off_identity_residual = worst;
		report.passed = report.complement_rank == report.expected_rank && report.identity_residual == 0.0 &&
		                report.min_off_identity_residual > 1e-3;
		return report;
	}

	/// Product of exponentials of L_lambda(D_i, u_i): a local section of the bundle through
	/// h = prod exp(L_{base_lambda}(D_i, u_i)).
	template <typename Scalar>
	struct GroupWord
	{
		std::vector<std::pair<MatrixX<Scalar>, VectorX<Scalar>>> letters;
		Scalar base_lambda;
	};

	template <typename Scalar>
	MatrixX<Scalar> section(const GroupWord<Scalar> &word, Scalar lambda)
	{
		if (word.letters.empty())
			throw PreconditionError("section: word must be non-empty");
		const Eigen::Index dim = word.letters.front().second.size() + 1;
		MatrixX<Scalar> g = MatrixX<Scalar>::Identity(dim, dim);
		for (const auto &[D, u] : word.letters)
			g = g * expm<Scalar>(embed_generator(lambda, D, u));
		return g;
	}

	/// Reductive decomposition g = k (+) m of a matrix Lie algebra, with
	/// [k,k] in k, [k,m] in m, [m,m] in k checked on construction.
	template <typename Scalar>
	class ReductivePair
	{
	public:
		ReductivePair(std::vector<MatrixX<Scalar>> k_basis, std::vector<MatrixX<Scalar>> m_basis)
		    : k_(std::move(k_basis)), m_(std::move(m_basis))
		{
			if (k_.empty() || m_.empty())
				throw PreconditionError("ReductivePair: both k and m must be non-empty");
			const Eigen::Index dim = k_.front().size();
			stacked_.resize(dim, static_cast<Eigen::Index>(k_.size() + m_.size()));
			for (std::size_t i = 0; i < k_.size(); ++i)
				stacked_.col(i) = k_[i].reshaped();
			for (std::size_t i = 0; i < m_.size(); ++i)
				stacked_.col(k_.size() + i) = m_[i].reshaped();
			projector_ = stacked_.completeOrthogonalDecomposition().pseudoInverse();

			const Scalar tol(1e-10);
			for (const auto &a : k_)
			{
				for (const auto &b : k_)
					check_in(a * b - b * a, true, tol, "[k,k] not in k");
				for (const auto &b : m_)
					check_in(a * b - b * a, false, tol, "[k,m] not in m");
			}
			for (const auto &a : m_)
				for (const auto &b : m_)
					check_in(a * b - b * a, true, tol, "[m,m] not in k");
		}

		/// k = so(n) embedded as rotations, m = R^n as the translations of so(n+1).
		static ReductivePair space_form(int n)
		{
			const AlgebraBasis<Scalar> basis = algebra_basis(Scalar(1), n);
			std::vector<MatrixX<Scalar>> k, m;
			const int rotations = n * (n - 1) / 2;
			for (int i = 0; i < static_cast<int>(basis.elements.size()); ++i)
				(i < rotations ? k : m).push_back(basis.elements[i].mat);
			return ReductivePair(std::move(k), std::move(m));
		}

		int k_dim() const { return static_cast<int>(k_.size()); }
		int m_dim() const { return static_cast<int>(m_.size()); }

		MatrixX<Scalar> k_part(const VectorX<Scalar> &xk) const { return combine(k_, xk); }
		MatrixX<Scalar> m_part(const VectorX<Scalar> &xm) const { return combine(m_, xm); }

		/// Coordinates of Z in k (+) m and the projection residual.
		std::pair<VectorX<Scalar>, Scalar> decompose(const MatrixX<Scalar> &Z) const
		{
			const VectorX<Scalar> z = Z.reshaped();
			VectorX<Scalar> coords = projector_ * z;
			return {coords, (stacked_ * coords - z).norm()};
		}

	private:
		static MatrixX<Scalar> combine(const std::vector<MatrixX<Scalar>> &basis, const VectorX<Scalar> &x)
		{
			if (x.size() != static_cast<Eigen::Index>(basis.size()))
				throw ShapeError("ReductivePair: coordinate vector has wrong length");
			MatrixX<Scalar> out = MatrixX<Scalar>::Zero(basis.front().rows(), basis.front().cols());
			for (std::size_t i = 0; i < basis.size(); ++i)
				out += x(static_cast<Eigen::Index>(i)) * basis[i];
			return out;
		}

		void check_in(const MatrixX<Scalar> &Z, bool in_k, Scalar tol, const char *what) const
		{
			const auto [coords, residual] = decompose(Z);
			const Scalar leak = in_k ? coords.tail(m_.size()).norm() : coords.head(k_.size()).norm();
			if (residual > tol || leak > tol)
				throw PreconditionError(std::string("ReductivePair: ") + what);
		}

		std::vector<MatrixX<Scalar>> k_, m_;
		MatrixX<Scalar> stacked_;
		MatrixX<Scalar> projector_;
	};

	template <typename Scalar>
	struct PairElement
	{
		VectorX<Scalar> k;
		VectorX<Scalar> m;
	};

	/// [x,y]_lambda: undeformed on k x k and k x m, lambda [v,w] on m x m.
	/// Evaluated as [X,Y] - (1 - lambda)[X_m, Y_m], which is exactly antisymmetric in floating point.
	template <typename Scalar>
	PairElement<Scalar> deformed_bracket(Scalar lambda, const PairElement<Scalar> &x, const PairElement<Scalar> &y,
	                                     const ReductivePair<Scalar> &pair)
	{
		const MatrixX<Scalar> Xm = pair.m_part(x.m);
		const MatrixX<Scalar> Ym = pair.m_part(y.m);
		const MatrixX<Scalar> X = pair.k_part(x.k) + Xm;
		const MatrixX<Scalar> Y = pair.k_part(y.k) + Ym;
		const MatrixX<Scalar> XY = X * Y;
		const MatrixX<Scalar> YX = Y * X;
		const MatrixX<Scalar> XmYm = Xm * Ym;
		const MatrixX<Scalar> YmXm = Ym * Xm;
		const MatrixX<Scalar> Z = (XY - YX) - (Scalar(1) - lambda) * (XmYm - YmXm);
		const auto [coords, residual] = pair.decompose(Z);
		if (residual > Scalar(1e-10))
			throw DomainError("deformed_bracket: result leaves k (+) m");
		return {coords.head(pair.k_dim()), coords.tail(pair.m_dim())};
	}
} // namespace equideform
