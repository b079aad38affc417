#include "equideform/equivariance.hpp"
#include "equideform/report.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace equideform
{
	std::string to_string(Verdict v)
	{
		switch (v)
		{
		case Verdict::Nondegenerate:
			return "nondegenerate";
		case Verdict::Degenerate:
			return "degenerate";
		case Verdict::Indeterminate:
			return "indeterminate";
		}
		return "unknown";
	}

	namespace
	{
		Vector sqrt_weights(const Pairing &p) { return p.weights.cwiseSqrt(); }

		int count_below(const Vector &sv, double threshold)
		{
			return static_cast<int>((sv.array() < threshold).count());
		}
	} // namespace

	KernelBasis numerical_kernel(const JacobiOperator &J, double tol_rel, double min_gap)
	{
		if (!(tol_rel > 0) || tol_rel > 1e-2)
			throw PreconditionError("numerical_kernel: tol_rel must lie in (0, 1e-2]");
		const Vector s = sqrt_weights(J.pairing);
		const Matrix A = s.asDiagonal() * J.matrix * s.cwiseInverse().asDiagonal();
		const Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeFullV);
		const Vector sv = svd.singularValues(); // descending
		const int n = static_cast<int>(sv.size());

		KernelBasis k;
		k.sigma_max = sv(0);
		k.tolerance = tol_rel * sv(0);
		const int dim = count_below(sv, k.tolerance);
		k.singular_values = sv.tail(dim);
		k.vectors = s.cwiseInverse().asDiagonal() * svd.matrixV().rightCols(dim);
		if (dim == n)
			k.gap = 0;
		else if (dim == 0)
			k.gap = sv(n - 1) / k.tolerance;
		else
			k.gap = sv(n - dim - 1) / std::max(sv(n - dim), 1e-16 * sv(0));
		k.gap_ok = k.gap >= min_gap;
		return k;
	}

	Matrix w_orthonormal_span(const Matrix &columns, const Pairing &pairing, double rel_tol)
	{
		const Eigen::Index n = pairing.weights.size();
		if (columns.cols() == 0)
			return Matrix(n, 0);
		const Vector s = sqrt_weights(pairing);
		const Eigen::JacobiSVD<Matrix> svd(s.asDiagonal() * columns, Eigen::ComputeThinU);
		const Vector sv = svd.singularValues();
		int rank = 0;
		if (sv(0) > 1e-300)
			rank = static_cast<int>((sv.array() > rel_tol * sv(0)).count());
		return s.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(rank);
	}

	NondegeneracyReport nondegeneracy_from(const JacobiOperator &J, const Matrix &killing, const Tolerances &tol)
	{
		const int N = static_cast<int>(J.matrix.rows());
		NondegeneracyReport r;
		r.kernel_tol_rel = tol.kernel_threshold(N);
		r.angle_tol = tol.angle;
		r.min_gap = tol.min_gap;

		const KernelBasis kernel = numerical_kernel(J, r.kernel_tol_rel, tol.min_gap);
		const Matrix U = w_orthonormal_span(killing, J.pairing, tol.killing_rel);
		r.kernel_dim = kernel.dim();
		r.killing_rank = static_cast<int>(U.cols());
		r.spectral_gap = kernel.gap;

		if (r.kernel_dim > 0)
		{
			// sines of the principal angles: components of the kernel basis outside the Killing span
			const Vector s = sqrt_weights(J.pairing);
			const Matrix Z = kernel.vectors;
			const Matrix outside = Z - U * (U.transpose() * J.pairing.weights.asDiagonal() * Z);
			const Vector sines = Eigen::JacobiSVD<Matrix>(s.asDiagonal() * outside).singularValues();
			for (Eigen::Index i = sines.size() - 1; i >= 0; --i)
				r.principal_angles.push_back(std::asin(std::min(1.0, sines(i))));
			r.max_principal_angle = *std::max_element(r.principal_angles.begin(), r.principal_angles.end());
		}

		if (!kernel.gap_ok)
			r.verdict = Verdict::Indeterminate;
		else if (r.kernel_dim == r.killing_rank && r.max_principal_angle < tol.angle)
			r.verdict = Verdict::Nondegenerate;
		else
			r.verdict = Verdict::Degenerate;
		return r;
	}

	NondegeneracyReport nondegeneracy_report(const Problem &problem, const ProblemState &state, double lambda_hat,
	                                         const Tolerances &tol)
	{
		const Pairing W = dof_pairing(problem);
		const double res = W.norm(residual(problem, state, lambda_hat));
		if (res > tol.criticality)
			throw PreconditionError("nondegeneracy_report: state is not critical (||residual||_W = " +
			                        format_double(res) + ")");
		NondegeneracyReport r = nondegeneracy_from(jacobi(problem, state, lambda_hat),
		                                           killing_jacobi_basis(problem, state, lambda_hat), tol);
		r.residual_norm = res;
		r.input_hash = state_hash(problem, state, lambda_hat);
		return r;
	}

	SliceBasis slice_basis(const Problem &problem, const ProblemState &state, double lambda_hat,
	                       const Tolerances &tol)
	{
		const Pairing W = dof_pairing(problem);
		const Matrix K = killing_jacobi_basis(problem, state, lambda_hat);
		const Vector s = sqrt_weights(W);
		const int n = problem.dof_count();
		const Matrix U = w_orthonormal_span(K, W, tol.killing_rel);
		const int rank = static_cast<int>(U.cols());

		// orthonormal complement of W^{1/2} U in the Euclidean sense
		const Eigen::HouseholderQR<Matrix> qr(s.asDiagonal() * U);
		const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);

		SliceBasis slice;
		slice.killing_rank = rank;
		slice.vectors = s.cwiseInverse().asDiagonal() * Q.rightCols(n - rank);
		return slice;
	}

	DiagnosticsReport operator_diagnostics(const JacobiOperator &J, double tol_rel)
	{
		const int N = static_cast<int>(J.matrix.rows());
		if (!(tol_rel > 0))
			tol_rel = 1e-8 * N;
		DiagnosticsReport d;
		const Matrix WJ = J.weighted();
		const double scale = WJ.norm();
		d.symmetry_residual = scale > 0 ? (WJ - WJ.transpose()).norm() / scale : 0.0;
		d.symmetric = d.symmetry_residual < 1e-10;

		const Matrix adjoint = J.pairing.weights.cwiseInverse().asDiagonal() * J.matrix.transpose() *
		                       J.pairing.weights.asDiagonal();
		const Vector sv = Eigen::BDCSVD<Matrix>(J.matrix).singularValues();
		const Vector sva = Eigen::BDCSVD<Matrix>(adjoint).singularValues();
		d.kernel_dim = count_below(sv, tol_rel * sv(0));
		d.cokernel_dim = count_below(sva, tol_rel * sva(0));
		d.index = d.kernel_dim - d.cokernel_dim;
		return d;
	}

	DiagnosticsReport operator_diagnostics(const Problem &problem, const ProblemState &state, double lambda_hat,
	                                       const JacobiOperator &J, int probes, double h, std::uint64_t seed)
	{
		DiagnosticsReport d = operator_diagnostics(J);
		std::mt19937_64 rng(seed);
		std::normal_distribution<double> normal;
		const Vector x = state_dofs(problem, state);
		double worst = 0;
		for (int i = 0; i < probes; ++i)
		{
			Vector v(x.size());
			for (Eigen::Index j = 0; j < v.size(); ++j)
				v(j) = normal(rng);
			v /= v.cwiseAbs().maxCoeff();
			const Vector plus = residual(problem, state_from_dofs(problem, x + h * v), lambda_hat);
			const Vector minus = residual(problem, state_from_dofs(problem, x - h * v), lambda_hat);
			const Vector Jv = J.matrix * v;
			worst = std::max(worst, ((plus - minus) / (2 * h) - Jv).norm() / Jv.norm());
		}
		d.hessian_consistency = worst;
		d.probes = probes;
		return d;
	}

	double transversality_margin(const Problem &problem, const ProblemState &state, double lambda_hat,
	                             const SliceBasis &slice, const Tolerances &tol)
	{
		const Pairing W = dof_pairing(problem);
		const Matrix U = w_orthonormal_span(killing_jacobi_basis(problem, state, lambda_hat), W, tol.killing_rel);
		const int n = problem.dof_count();
		if (slice.vectors.rows() != n)
			throw ShapeError("transversality_margin: slice has wrong dimension");
		Matrix stacked(n, U.cols() + slice.vectors.cols());
		stacked << U, slice.vectors;
		if (stacked.cols() == 0)
			return 1.0;
		const Vector sv = Eigen::BDCSVD<Matrix>(sqrt_weights(W).asDiagonal() * stacked).singularValues();
		if (stacked.cols() > n)
			return 0.0;
		return sv(sv.size() - 1);
	}
} // namespace equideform
