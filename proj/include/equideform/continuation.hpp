#pragma once

// Branch continuation in the parameter with Newton corrections constrained to the slice through
// the current iterate, orbit projection and congruence tests.

#include "equideform/equivariance.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace equideform
{
	struct CorrectorConfig
	{
		double tolerance = 1e-10;   // on ||residual||_W
		int max_iters = 12;
		double basin_guard = 1e-2;  // initial ||residual||_W must be below this
		double max_condition = 1e12;
		double killing_rel = 1e-8;
	};

	struct CorrectorResult
	{
		ProblemState state;
		int iters = 0;
		double residual_norm = 0;
		std::vector<double> residual_history; // one entry per evaluated iterate
		std::vector<double> step_norms;       // ||delta||_W per update
		double max_orthogonality = 0;         // max |<delta, u>_W| / (||delta||_W ||u||_W) over the Killing span
		double max_condition = 0;             // of the scaled bordered matrix
		int killing_rank = 0;
	};

	// Bordered Newton iteration
	//   [ W J   W U ] [delta]   [-W residual]
	//   [ U^T W   0 ] [ mu  ] = [     0     ]
	// with U a W-orthonormal basis of the Killing-Jacobi span re-evaluated at every iterate.
	// Throws PreconditionError outside the basin guard, IllConditioned when the bordered matrix
	// condition number exceeds max_condition, NoConvergence when the iteration cap is reached.
	CorrectorResult corrector_step(const Problem &problem, const ProblemState &state, double lambda_hat,
	                               const CorrectorConfig &config = {});

	struct ContinuationConfig
	{
		double start = 0;
		double end = 1;
		double initial_step = 0.1;
		double min_step = 1e-4;
		double max_step = 0.1;
		int retries = 6;           // step halvings per step before aborting
		double growth = 1.3;       // after two consecutive successes with at most 3 Newton iterations
		int diagnostics_every = 1; // operator diagnostics with Hessian probes every n-th record
		int probes = 10;
		std::uint64_t seed = 1;
		CorrectorConfig corrector;
		Tolerances tolerances;
	};

	struct BranchRecord
	{
		double lambda_hat = 0;
		ProblemState state;
		double residual_norm = 0;
		int kernel_dim = 0;
		int killing_rank = 0;
		double max_principal_angle = 0;
		double spectral_gap = 0;
		Verdict verdict = Verdict::Indeterminate;
		double transversality_margin = 0;
		int newton_iters = 0;
		double step = 0;
		std::optional<DiagnosticsReport> diagnostics;
		std::map<std::string, double> derived_scalars;
		std::string input_hash;
	};

	enum class BranchStatus
	{
		Completed,
		NondegeneracyLoss, // final record is flagged (verdict not nondegenerate)
		ConvergenceFailure // partial branch
	};

	std::string to_string(BranchStatus s);

	struct BranchResult
	{
		std::vector<BranchRecord> records;
		BranchStatus status = BranchStatus::Completed;
		std::string message;
	};

	// Secant predictor (trivial on the first step), corrector_step, certification of every record.
	// The seed is corrected at config.start first.
	BranchResult continue_branch(const Problem &problem, const ProblemState &seed, const ContinuationConfig &config);

	// Analytic seed polished at lambda_hat. When the seed is not within the corrector basin there
	// (e.g. the cylinder off the flat product) it is continued from lambda_hat = 0 first.
	ProblemState critical_seed(const Problem &problem, double lambda_hat, const ContinuationConfig &config);

	struct GroupParameters
	{
		Vector coords;       // in the basis of non-stabilizer directions, dim = killing rank
		Vector coefficients; // same motion expressed in apply_motion coefficients
		Matrix directions;   // motion_dim x killing rank, orthonormal
	};

	struct OrbitConfig
	{
		double trust_radius = 0.5;
		int max_iters = 30;
		double fd_step = 1e-6;
		double killing_rel = 1e-8;
	};

	struct OrbitProjection
	{
		GroupParameters parameters;
		ProblemState projected;
		double distance = 0; // W-distance from the moved state to the affine slice through the reference
		int iters = 0;
	};

	// Directions of the motion space that move the reference: the orthonormalized projections of the
	// coordinate axes onto the complement of the reference's stabilizer.
	Matrix non_stabilizer_directions(const Problem &problem, const ProblemState &reference, double lambda_hat,
	                                 double killing_rel = 1e-8);

	// Newton iteration over t for g(t) . state to lie on reference + slice.
	OrbitProjection orbit_project(const Problem &problem, const ProblemState &state, double lambda_hat,
	                              const ProblemState &reference, const OrbitConfig &config = {});

	struct CongruenceResult
	{
		bool congruent = false;
		GroupParameters parameters;
		double distance = 0;              // ||state1 - corrected||_W
		double corrector_displacement = 0; // ||corrected - projected||_W
		std::string message;
	};

	// Projects state2 onto the slice of state1, polishes with corrector_step and compares. A state that
	// the corrector has to move by more than tol is not congruent even if it ends up at state1.
	// state1 must be critical (PreconditionError otherwise).
	CongruenceResult congruence_check(const Problem &problem, const ProblemState &state1, const ProblemState &state2,
	                                  double lambda_hat, double tol, const CorrectorConfig &corrector = {},
	                                  const OrbitConfig &orbit = {});
} // namespace equideform
