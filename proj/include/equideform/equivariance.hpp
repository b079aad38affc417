#pragma once

// Certification of equivariant nondegeneracy: the numerical kernel of the Jacobi operator must
// coincide with the span of the Killing-Jacobi fields. All linear algebra is done in the
// W-pairing, i.e. on W^{1/2} J W^{-1/2}, which is symmetric for assembled operators.

#include "equideform/variational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace equideform
{
	enum class Verdict
	{
		Nondegenerate,
		Degenerate,
		Indeterminate
	};

	std::string to_string(Verdict v);

	struct Tolerances
	{
		double kernel_rel = 0;    // 0 selects 1e-8 * N
		double angle = 1e-6;      // radians
		double min_gap = 1e3;     // required separation of kernel and non-kernel singular values
		double killing_rel = 1e-8;
		double criticality = 1e-8; // on ||residual||_W

		double kernel_threshold(int N) const { return kernel_rel > 0 ? kernel_rel : 1e-8 * N; }
	};

	struct KernelBasis
	{
		Matrix vectors;          // W-orthonormal columns
		Vector singular_values;  // retained (small) singular values
		double tolerance = 0;    // absolute threshold tol_rel * sigma_max
		double sigma_max = 0;
		double gap = 0;          // smallest rejected / largest retained (or / threshold if none retained)
		bool gap_ok = false;

		int dim() const { return static_cast<int>(vectors.cols()); }
	};

	KernelBasis numerical_kernel(const JacobiOperator &J, double tol_rel, double min_gap = 1e3);

	struct NondegeneracyReport
	{
		int kernel_dim = 0;
		int killing_rank = 0;
		std::vector<double> principal_angles;
		double max_principal_angle = 0;
		double spectral_gap = 0;
		Verdict verdict = Verdict::Indeterminate;
		double residual_norm = 0;
		double kernel_tol_rel = 0;
		double angle_tol = 0;
		double min_gap = 0;
		std::string input_hash;
	};

	// Requires ||residual||_W <= tol.criticality (PreconditionError otherwise).
	NondegeneracyReport nondegeneracy_report(const Problem &problem, const ProblemState &state, double lambda_hat,
	                                         const Tolerances &tol = {});

	// Same certificate from precomputed pieces; no criticality check.
	NondegeneracyReport nondegeneracy_from(const JacobiOperator &J, const Matrix &killing, const Tolerances &tol);

	// W-orthonormal basis of the span of the given columns, with rank decided relative to the largest
	// singular value.
	Matrix w_orthonormal_span(const Matrix &columns, const Pairing &pairing, double rel_tol);

	struct SliceBasis
	{
		Matrix vectors; // W-orthonormal, W-orthogonal to the Killing-Jacobi span
		int killing_rank = 0;
	};

	SliceBasis slice_basis(const Problem &problem, const ProblemState &state, double lambda_hat,
	                       const Tolerances &tol = {});

	struct DiagnosticsReport
	{
		double symmetry_residual = 0;
		bool symmetric = false;
		int kernel_dim = 0;
		int cokernel_dim = 0;
		int index = 0;
		// Max relative deviation between central differences of the residual and J v over the
		// probes; only available when the problem is supplied.
		std::optional<double> hessian_consistency;
		int probes = 0;
	};

	// Square finite-dimensional operators have index 0; the check exists because in infinite
	// dimensions a symmetric operator need not be Fredholm of index zero.
	DiagnosticsReport operator_diagnostics(const JacobiOperator &J, double tol_rel = 0);
	DiagnosticsReport operator_diagnostics(const Problem &problem, const ProblemState &state, double lambda_hat,
	                                       const JacobiOperator &J, int probes = 10, double h = 1e-5,
	                                       std::uint64_t seed = 1);

	// Smallest singular value of W^{1/2} [Killing-Jacobi basis at (state, lambda) | slice], where
	// the Killing-Jacobi basis is W-orthonormalized first.
	double transversality_margin(const Problem &problem, const ProblemState &state, double lambda_hat,
	                             const SliceBasis &slice, const Tolerances &tol = {});
} // namespace equideform
