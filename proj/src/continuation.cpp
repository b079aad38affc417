#include "equideform/continuation.hpp"
#include "equideform/report.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace equideform
{
	std::string to_string(BranchStatus s)
	{
		switch (s)
		{
		case BranchStatus::Completed:
			return "completed";
		case BranchStatus::NondegeneracyLoss:
			return "nondegeneracy_loss";
		case BranchStatus::ConvergenceFailure:
			return "convergence_failure";
		}
		return "unknown";
	}

	CorrectorResult corrector_step(const Problem &problem, const ProblemState &state, double lambda_hat,
	                               const CorrectorConfig &config)
	{
		const Pairing W = dof_pairing(problem);
		const Vector s = W.weights.cwiseSqrt();
		Vector x = state_dofs(problem, state);
		const Eigen::Index n = x.size();

		CorrectorResult out;
		for (;;)
		{
			const ProblemState current = state_from_dofs(problem, x);
			const Vector r = residual(problem, current, lambda_hat);
			const double norm = W.norm(r);
			out.residual_history.push_back(norm);
			if (out.iters == 0 && !(norm <= config.basin_guard))
				throw PreconditionError("corrector_step: ||residual||_W = " + format_double(norm) +
				                        " exceeds the basin guard");
			if (norm < config.tolerance)
			{
				out.state = current;
				out.residual_norm = norm;
				break;
			}
			if (out.iters >= config.max_iters)
				throw NoConvergence("corrector_step: no convergence after " + std::to_string(out.iters) +
				                    " iterations, ||residual||_W = " + format_double(norm));

			const JacobiOperator J = jacobi(problem, current, lambda_hat);
			const Matrix U = w_orthonormal_span(killing_jacobi_basis(problem, current, lambda_hat), W,
			                                    config.killing_rel);
			const Eigen::Index k = U.cols();
			out.killing_rank = static_cast<int>(k);

			// same system in W^{1/2}-scaled unknowns: symmetric with an orthonormal border
			Matrix B = Matrix::Zero(n + k, n + k);
			B.topLeftCorner(n, n) = s.asDiagonal() * J.matrix * s.cwiseInverse().asDiagonal();
			B.topRightCorner(n, k) = s.asDiagonal() * U;
			B.bottomLeftCorner(k, n) = B.topRightCorner(n, k).transpose();
			const Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
			const Vector sv = svd.singularValues();
			const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
			                                          : std::numeric_limits<double>::infinity();
			out.max_condition = std::max(out.max_condition, cond);
			if (!(cond <= config.max_condition))
				throw IllConditioned("corrector_step: bordered matrix condition number " + format_double(cond));

			Vector rhs = Vector::Zero(n + k);
			rhs.head(n) = -(s.array() * r.array()).matrix();
			const Vector delta = s.cwiseInverse().asDiagonal() * svd.solve(rhs).head(n);
			const double dn = W.norm(delta);
			out.step_norms.push_back(dn);
			for (Eigen::Index j = 0; j < k && dn > 0; ++j)
				out.max_orthogonality = std::max(out.max_orthogonality, std::abs(W.inner(delta, U.col(j))) / dn);
			x += delta;
			++out.iters;
		}
		return out;
	}

	namespace
	{
		bool failure_is_recoverable(const std::exception_ptr &e)
		{
			try
			{
				std::rethrow_exception(e);
			}
			catch (const NoConvergence &)
			{
				return true;
			}
			catch (const IllConditioned &)
			{
				return true;
			}
			catch (const PreconditionError &)
			{
				return true;
			}
			catch (const DomainError &)
			{
				return true;
			}
			catch (...)
			{
				return false;
			}
		}

		std::string what(const std::exception_ptr &e)
		{
			try
			{
				std::rethrow_exception(e);
			}
			catch (const std::exception &ex)
			{
				return ex.what();
			}
			catch (...)
			{
				return "unknown error";
			}
		}

		BranchRecord certify(const Problem &problem, const CorrectorResult &corrected, double lambda_hat,
		                     const SliceBasis &slice, const ContinuationConfig &config, std::size_t index)
		{
			BranchRecord rec;
			rec.lambda_hat = lambda_hat;
			rec.state = corrected.state;
			rec.residual_norm = corrected.residual_norm;
			rec.newton_iters = corrected.iters;
			const NondegeneracyReport nd = nondegeneracy_report(problem, rec.state, lambda_hat, config.tolerances);
			rec.kernel_dim = nd.kernel_dim;
			rec.killing_rank = nd.killing_rank;
			rec.max_principal_angle = nd.max_principal_angle;
			rec.spectral_gap = nd.spectral_gap;
			rec.verdict = nd.verdict;
			rec.input_hash = nd.input_hash;
			rec.transversality_margin = transversality_margin(problem, rec.state, lambda_hat, slice, config.tolerances);
			if (config.diagnostics_every > 0 && index % static_cast<std::size_t>(config.diagnostics_every) == 0)
				rec.diagnostics = operator_diagnostics(problem, rec.state, lambda_hat, jacobi(problem, rec.state, lambda_hat),
				                                       config.probes, 1e-5, config.seed + index);
			rec.derived_scalars = derived_scalars(problem, rec.state, lambda_hat);
			return rec;
		}
	} // namespace

	BranchResult continue_branch(const Problem &problem, const ProblemState &seed, const ContinuationConfig &config)
	{
		if (!(config.min_step > 0) || !(config.initial_step > 0) || !(config.max_step >= config.min_step) ||
		    config.retries < 0 || !(config.corrector.tolerance > 0))
			throw PreconditionError("continue_branch: invalid step or tolerance configuration");

		BranchResult out;
		CorrectorResult first;
		try
		{
			first = corrector_step(problem, seed, config.start, config.corrector);
		}
		catch (...)
		{
			const auto e = std::current_exception();
			if (!failure_is_recoverable(e))
				throw;
			out.status = BranchStatus::ConvergenceFailure;
			out.message = "seed correction failed at lambda_hat = " + format_double(config.start) + ": " + what(e);
			return out;
		}
		SliceBasis slice = slice_basis(problem, first.state, config.start, config.tolerances);
		out.records.push_back(certify(problem, first, config.start, slice, config, 0));
		if (out.records.back().verdict != Verdict::Nondegenerate)
		{
			out.status = BranchStatus::NondegeneracyLoss;
			out.message = "seed is " + to_string(out.records.back().verdict);
			return out;
		}

		const double direction = config.end >= config.start ? 1.0 : -1.0;
		double h = std::min(config.initial_step, config.max_step);
		int halvings = 0;
		int easy = 0;
		while (direction * (config.end - out.records.back().lambda_hat) > 0)
		{
			const BranchRecord &last = out.records.back();
			const double remaining = direction * (config.end - last.lambda_hat);
			const double step = std::min(h, remaining);
			// land exactly on the end point instead of leaving a sliver
			const double lambda_new = remaining - step <= 1e-9 * step ? config.end : last.lambda_hat + direction * step;

			Vector predicted = state_dofs(problem, last.state);
			if (out.records.size() >= 2)
			{
				const BranchRecord &prev = out.records[out.records.size() - 2];
				const double ratio = (lambda_new - last.lambda_hat) / (last.lambda_hat - prev.lambda_hat);
				predicted += ratio * (predicted - state_dofs(problem, prev.state));
			}

			std::string failure;
			std::optional<BranchRecord> rec;
			try
			{
				const CorrectorResult c =
				    corrector_step(problem, state_from_dofs(problem, predicted), lambda_new, config.corrector);
				rec = certify(problem, c, lambda_new, slice, config, out.records.size());
				if (rec->verdict == Verdict::Nondegenerate && !(rec->transversality_margin > 0.1))
					failure = "transversality margin " + format_double(rec->transversality_margin);
			}
			catch (...)
			{
				const auto e = std::current_exception();
				if (!failure_is_recoverable(e))
					throw;
				failure = what(e);
			}

			if (!failure.empty())
			{
				++halvings;
				h /= 2;
				if (halvings > config.retries || h < config.min_step)
				{
					out.status = BranchStatus::ConvergenceFailure;
					out.message = "step of size " + format_double(step) + " to lambda_hat = " + format_double(lambda_new) +
					              " failed and no further halving is allowed: " + failure;
					return out;
				}
				easy = 0;
				continue;
			}

			rec->step = lambda_new - last.lambda_hat;
			const int iters = rec->newton_iters;
			out.records.push_back(std::move(*rec));
			if (out.records.back().verdict != Verdict::Nondegenerate)
			{
				out.status = BranchStatus::NondegeneracyLoss;
				out.message = "verdict " + to_string(out.records.back().verdict) + " at lambda_hat = " +
				              format_double(lambda_new);
				return out;
			}
			slice = slice_basis(problem, out.records.back().state, lambda_new, config.tolerances);
			halvings = 0;
			easy = iters <= 3 ? easy + 1 : 0;
			if (easy >= 2)
			{
				h = std::min(h * config.growth, config.max_step);
				easy = 0;
			}
		}
		return out;
	}

	ProblemState critical_seed(const Problem &problem, double lambda_hat, const ContinuationConfig &config)
	{
		try
		{
			return corrector_step(problem, analytic_seed(problem, lambda_hat), lambda_hat, config.corrector).state;
		}
		catch (const PreconditionError &)
		{
			if (lambda_hat == 0.0)
				throw;
		}
		ContinuationConfig lead = config;
		lead.start = 0.0;
		lead.end = lambda_hat;
		lead.diagnostics_every = 0;
		const BranchResult branch = continue_branch(problem, analytic_seed(problem, 0.0), lead);
		if (branch.status != BranchStatus::Completed)
			throw NoConvergence("critical_seed: lead-in continuation from 0 failed: " + branch.message);
		return branch.records.back().state;
	}

	namespace
	{
		struct OrbitFrame
		{
			Matrix U;          // W-orthonormal Killing-Jacobi span at the reference
			Matrix directions; // motion_dim x rank
		};

		OrbitFrame orbit_frame(const Problem &problem, const ProblemState &reference, double lambda_hat, double rel)
		{
			const Pairing W = dof_pairing(problem);
			const Vector s = W.weights.cwiseSqrt();
			const Matrix K = killing_jacobi_basis(problem, reference, lambda_hat);
			const int m = static_cast<int>(K.cols());
			OrbitFrame f;
			f.U = w_orthonormal_span(K, W, rel);
			const int rank = static_cast<int>(f.U.cols());
			f.directions = Matrix(m, rank);
			if (rank == 0)
				return f;

			const Eigen::JacobiSVD<Matrix> svd(s.asDiagonal() * K, Eigen::ComputeFullV);
			const Matrix null = svd.matrixV().rightCols(m - rank);
			const Matrix P = Matrix::Identity(m, m) - null * null.transpose();

			std::vector<int> order(m);
			std::iota(order.begin(), order.end(), 0);
			std::stable_sort(order.begin(), order.end(),
			                 [&](int a, int b) { return P.col(a).norm() > P.col(b).norm() + 1e-12; });
			int accepted = 0;
			for (int i : order)
			{
				if (accepted == rank)
					break;
				Vector v = P.col(i);
				for (int j = 0; j < accepted; ++j)
					v -= f.directions.col(j).dot(v) * f.directions.col(j);
				const double norm = v.norm();
				if (norm > 1e-6)
					f.directions.col(accepted++) = v / norm;
			}
			return f;
		}
	} // namespace

	Matrix non_stabilizer_directions(const Problem &problem, const ProblemState &reference, double lambda_hat,
	                                 double killing_rel)
	{
		return orbit_frame(problem, reference, lambda_hat, killing_rel).directions;
	}

	OrbitProjection orbit_project(const Problem &problem, const ProblemState &state, double lambda_hat,
	                              const ProblemState &reference, const OrbitConfig &config)
	{
		const Pairing W = dof_pairing(problem);
		const OrbitFrame frame = orbit_frame(problem, reference, lambda_hat, config.killing_rel);
		const Vector ref = state_dofs(problem, reference);
		const Eigen::Index rank = frame.directions.cols();
		const Matrix UtW = frame.U.transpose() * W.weights.asDiagonal();

		auto moved = [&](const Vector &c) {
			return apply_motion(problem, state, lambda_hat, frame.directions * c);
		};
		auto F = [&](const Vector &c) -> Vector { return UtW * (state_dofs(problem, moved(c)) - ref); };

		OrbitProjection out;
		Vector c = Vector::Zero(rank);
		Vector Fc = F(c);
		const double floor = 1e-15 * (1 + W.norm(ref));
		bool converged = rank == 0 || Fc.norm() <= floor;
		while (!converged && out.iters < config.max_iters)
		{
			Matrix Jf(rank, rank);
			for (Eigen::Index i = 0; i < rank; ++i)
			{
				Vector e = Vector::Zero(rank);
				e(i) = config.fd_step;
				Jf.col(i) = (F(c + e) - F(c - e)) / (2 * config.fd_step);
			}
			const Vector dc = Jf.partialPivLu().solve(-Fc);
			c += dc;
			++out.iters;
			if (!(c.norm() <= config.trust_radius))
				throw NoConvergence("orbit_project: group parameters left the trust radius");
			Fc = F(c);
			converged = dc.norm() <= 1e-13 * (1 + c.norm()) || Fc.norm() <= floor;
		}
		if (!converged && Fc.norm() > 1e-12)
			throw NoConvergence("orbit_project: no convergence, slice distance " + format_double(Fc.norm()));

		out.parameters.coords = c;
		out.parameters.directions = frame.directions;
		out.parameters.coefficients = frame.directions * c;
		if (rank == 0)
			out.parameters.coefficients = Vector::Zero(problem.motion_dim());
		out.projected = moved(c);
		out.distance = Fc.norm();
		return out;
	}

	CongruenceResult congruence_check(const Problem &problem, const ProblemState &state1, const ProblemState &state2,
	                                  double lambda_hat, double tol, const CorrectorConfig &corrector,
	                                  const OrbitConfig &orbit)
	{
		const Pairing W = dof_pairing(problem);
		const double r1 = W.norm(residual(problem, state1, lambda_hat));
		if (r1 > 1e-8)
			throw PreconditionError("congruence_check: first state is not critical (||residual||_W = " +
			                        format_double(r1) + ")");

		const OrbitProjection p = orbit_project(problem, state2, lambda_hat, state1, orbit);
		CongruenceResult out;
		out.parameters = p.parameters;
		const Vector x1 = state_dofs(problem, state1);
		const Vector xp = state_dofs(problem, p.projected);
		try
		{
			const CorrectorResult c = corrector_step(problem, p.projected, lambda_hat, corrector);
			const Vector xc = state_dofs(problem, c.state);
			out.distance = W.norm(x1 - xc);
			out.corrector_displacement = W.norm(xc - xp);
		}
		catch (...)
		{
			const auto e = std::current_exception();
			if (!failure_is_recoverable(e))
				throw;
			out.message = what(e);
			out.distance = W.norm(x1 - xp);
			return out;
		}
		out.congruent = out.distance < tol && out.corrector_displacement < tol;
		return out;
	}
} // namespace equideform
