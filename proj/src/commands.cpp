#include "equideform/commands.hpp"
#include "equideform/lie_bundle.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace equideform
{
	namespace
	{
		// Thresholds of the operator diagnostics that count as a failed check.
		constexpr double symmetry_limit = 1e-10;
		constexpr double hessian_limit = 1e-5;

		bool diagnostics_pass(const DiagnosticsReport &d)
		{
			return d.symmetry_residual < symmetry_limit && d.index == 0 &&
			       (!d.hessian_consistency || *d.hessian_consistency < hessian_limit);
		}

		std::string utc_timestamp()
		{
			const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
			std::tm tm{};
			gmtime_r(&now, &tm);
			std::ostringstream out;
			out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
			return out.str();
		}

		class Output
		{
		public:
			explicit Output(const RunConfig &config) : dir_(config.out_dir), start_(std::chrono::steady_clock::now())
			{
				std::error_code ec;
				fs::create_directories(dir_, ec);
				if (ec || !fs::is_directory(dir_))
					throw ConfigError("cannot create output directory '" + dir_.string() + "'");
			}

			fs::path path(const std::string &name) const { return dir_ / name; }

			void write(const std::string &name, const std::string &contents) const
			{
				std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
				out << contents;
				if (!out)
					throw ConfigError("cannot write '" + path(name).string() + "'");
			}

			// Payload first; wall-clock data only in "metadata".
			void report(const RunConfig &config, Json result, int exit_code) const
			{
				Json out = {{"command", config.command}, {"config", to_json(config)}, {"result", std::move(result)}};
				out["exit_code"] = exit_code;
				const double elapsed =
				    std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
				out["metadata"] = {{"timestamp", utc_timestamp()}, {"elapsed_seconds", elapsed}};
				write("report.json", dump_json_pretty(out));
			}

		private:
			fs::path dir_;
			std::chrono::steady_clock::time_point start_;
		};

		Json scalars_json(const std::map<std::string, double> &m)
		{
			Json out = Json::object();
			for (const auto &[k, v] : m)
				out[k] = v;
			return out;
		}

		// Checks collected by verify-bundle.
		struct CheckList
		{
			Json entries = Json::array();
			std::vector<std::string> failed;

			void add(const std::string &name, double lambda, int n, double value, double threshold, bool passed)
			{
				entries.push_back({{"check", name},
				                   {"lambda", lambda},
				                   {"n", n},
				                   {"value", value},
				                   {"threshold", threshold},
				                   {"passed", passed}});
				if (!passed)
					failed.push_back(name + " (lambda = " + format_double(lambda) + ", n = " + std::to_string(n) + ")");
			}
		};

		Matrix random_matrix(int rows, int cols, std::mt19937_64 &rng)
		{
			std::normal_distribution<double> normal;
			Matrix M(rows, cols);
			for (int i = 0; i < rows; ++i)
				for (int j = 0; j < cols; ++j)
					M(i, j) = normal(rng);
			return M;
		}
	} // namespace

	Json to_json(const NondegeneracyReport &r)
	{
		Json angles = Json::array();
		for (double a : r.principal_angles)
			angles.push_back(a);
		return {{"kernel_dim", r.kernel_dim},
		        {"killing_rank", r.killing_rank},
		        {"principal_angles", angles},
		        {"max_principal_angle", r.max_principal_angle},
		        {"spectral_gap", r.spectral_gap},
		        {"verdict", to_string(r.verdict)},
		        {"tolerances", {{"kernel_rel", r.kernel_tol_rel}, {"angle", r.angle_tol}, {"min_gap", r.min_gap}}},
		        {"residual_norm", r.residual_norm},
		        {"input_hash", r.input_hash}};
	}

	Json to_json(const DiagnosticsReport &d)
	{
		Json out = {{"symmetry_residual", d.symmetry_residual},
		            {"symmetric", d.symmetric},
		            {"kernel_dim", d.kernel_dim},
		            {"cokernel_dim", d.cokernel_dim},
		            {"index", d.index}};
		out["hessian_consistency"] = d.hessian_consistency ? Json(*d.hessian_consistency) : Json(nullptr);
		out["probes"] = d.probes;
		out["passed"] = diagnostics_pass(d);
		return out;
	}

	Json to_json(const BranchRecord &r)
	{
		Json out = {{"lambda_hat", r.lambda_hat},
		            {"state", to_json(r.state.values)},
		            {"residual_norm", r.residual_norm},
		            {"kernel_dim", r.kernel_dim},
		            {"killing_rank", r.killing_rank},
		            {"max_principal_angle", r.max_principal_angle},
		            {"spectral_gap", r.spectral_gap},
		            {"verdict", to_string(r.verdict)},
		            {"transversality_margin", r.transversality_margin},
		            {"newton_iters", r.newton_iters},
		            {"step", r.step}};
		out["diagnostics"] = r.diagnostics ? to_json(*r.diagnostics) : Json(nullptr);
		out["derived_scalars"] = scalars_json(r.derived_scalars);
		return out;
	}

	int run_verify_bundle(const RunConfig &config, std::ostream &err)
	{
		const Output output(config);
		const bool broken = config.inject == "broken_basis";
		CheckList checks;
		std::mt19937_64 rng(config.seed);

		for (int n : config.bundle.dims)
		{
			// two-letter word based at lambda = 1, shared by all lambdas of this dimension
			GroupWord<double> word{{}, 1.0};
			for (int l = 0; l < 2; ++l)
			{
				const Matrix S = 0.5 * random_matrix(n, n, rng);
				word.letters.push_back({S - S.transpose(), 0.5 * random_matrix(n, 1, rng).col(0)});
			}
			Matrix h = Matrix::Identity(n + 1, n + 1);
			for (const auto &[D, u] : word.letters)
				h = h * expm<double>(embed_generator<double>(1.0, D, u));
			checks.add("section_base_point", 1.0, n, (section(word, 1.0) - h).norm(), 1e-12,
			           (section(word, 1.0) - h).norm() < 1e-12);

			const auto pair = ReductivePair<double>::space_form(n);
			auto random_element = [&]() {
				return PairElement<double>{random_matrix(pair.k_dim(), 1, rng).col(0),
				                           random_matrix(pair.m_dim(), 1, rng).col(0)};
			};
			auto as_vector = [](const PairElement<double> &z) {
				Vector out(z.k.size() + z.m.size());
				out << z.k, z.m;
				return out;
			};
			{
				const auto x = random_element(), y = random_element();
				const Matrix X = pair.k_part(x.k) + pair.m_part(x.m);
				const Matrix Y = pair.k_part(y.k) + pair.m_part(y.m);
				const Vector coords = pair.decompose(X * Y - Y * X).first;
				const double dev = (as_vector(deformed_bracket(1.0, x, y, pair)) - coords).norm();
				checks.add("bracket_undeformed_at_1", 1.0, n, dev, 1e-14, dev < 1e-14);
			}

			for (double lambda : config.bundle.lambdas)
			{
				AlgebraBasis<double> basis = algebra_basis(lambda, n);
				std::vector<Matrix> mats = basis.matrices();
				if (broken)
					mats.back()(0, 0) += 1e-3;

				const double closure = bracket_closure_residual(mats);
				checks.add("closure", lambda, n, closure, 1e-12, closure < 1e-12);
				double invariance = 0;
				for (const Matrix &X : mats)
					invariance = std::max(invariance, invariance_residual(X, lambda));
				checks.add("invariance", lambda, n, invariance, 1e-12, invariance < 1e-12);

				const CheckReport cs = complement_and_slice_check(lambda, n, config.bundle.samples, config.seed);
				checks.add("complement_rank", lambda, n, cs.complement_rank, cs.expected_rank,
				           cs.complement_rank == cs.expected_rank);
				checks.add("slice_off_identity_margin", lambda, n, cs.min_off_identity_residual, 1e-3,
				           cs.min_off_identity_residual > 1e-3);
				checks.add("slice_identity", lambda, n, cs.identity_residual, 0.0, cs.identity_residual == 0.0);

				const double membership = group_membership_residual(section(word, lambda), lambda);
				checks.add("section_membership", lambda, n, membership, 1e-10, membership < 1e-10);

				double antisym = 0, jacobi_identity = 0;
				for (int trial = 0; trial < 100; ++trial)
				{
					const auto x = random_element(), y = random_element(), z = random_element();
					antisym = std::max(antisym, (as_vector(deformed_bracket(lambda, x, y, pair)) +
					                             as_vector(deformed_bracket(lambda, y, x, pair)))
					                                .norm());
					const Vector cyclic = as_vector(deformed_bracket(lambda, x, deformed_bracket(lambda, y, z, pair), pair)) +
					                      as_vector(deformed_bracket(lambda, y, deformed_bracket(lambda, z, x, pair), pair)) +
					                      as_vector(deformed_bracket(lambda, z, deformed_bracket(lambda, x, y, pair), pair));
					jacobi_identity = std::max(jacobi_identity, cyclic.norm());
				}
				checks.add("bracket_antisymmetry", lambda, n, antisym, 0.0, antisym == 0.0);
				checks.add("bracket_jacobi", lambda, n, jacobi_identity, 1e-12, jacobi_identity < 1e-12);
			}
		}

		const bool passed = checks.failed.empty();
		Json failed = Json::array();
		for (const auto &f : checks.failed)
		{
			failed.push_back(f);
			err << "check failed: " << f << "\n";
		}
		const int code = passed ? ExitOk : ExitCheckFailed;
		output.report(config, {{"passed", passed}, {"failed_checks", failed}, {"checks", checks.entries}}, code);
		return code;
	}

	int run_analyze(const RunConfig &config, std::ostream &err)
	{
		const Output output(config);
		const Problem problem = make_problem(config.problem);
		const double lambda = config.problem.lambda;
		const ContinuationConfig &cc = config.continuation;

		ProblemState state;
		try
		{
			state = critical_seed(problem, lambda, cc);
		}
		catch (const std::exception &e)
		{
			err << "corrector failure: " << e.what() << "\n";
			output.report(config, {{"error", e.what()}}, ExitNoConvergence);
			return ExitNoConvergence;
		}

		JacobiOperator J = jacobi(problem, state, lambda);
		const Matrix K = killing_jacobi_basis(problem, state, lambda);
		NondegeneracyReport nd = nondegeneracy_report(problem, state, lambda, cc.tolerances);
		if (config.inject == "shifted_operator")
		{
			// test fixture: a positive shift removes every kernel direction
			J.matrix += 0.5 * Matrix::Identity(J.matrix.rows(), J.matrix.cols());
			const std::string hash = nd.input_hash;
			const double res = nd.residual_norm;
			nd = nondegeneracy_from(J, K, cc.tolerances);
			nd.input_hash = hash;
			nd.residual_norm = res;
		}
		const DiagnosticsReport diag = operator_diagnostics(problem, state, lambda, J, cc.probes, 1e-5, config.seed);

		Json result = {{"lambda_hat", lambda},
		               {"problem", describe(problem)},
		               {"nondegeneracy", to_json(nd)},
		               {"diagnostics", to_json(diag)},
		               {"derived_scalars", scalars_json(derived_scalars(problem, state, lambda))},
		               {"state", to_json(state.values)}};
		int code = ExitOk;
		if (nd.verdict != Verdict::Nondegenerate)
		{
			err << "verdict: " << to_string(nd.verdict) << " (kernel " << nd.kernel_dim << ", Killing rank "
			    << nd.killing_rank << ")\n";
			code = ExitCheckFailed;
		}
		if (!diagnostics_pass(diag))
		{
			err << "operator diagnostics failed\n";
			code = ExitCheckFailed;
		}
		output.report(config, std::move(result), code);
		return code;
	}

	int run_continue(const RunConfig &config, std::ostream &err)
	{
		const Output output(config);
		const Problem problem = make_problem(config.problem);
		const ContinuationConfig &cc = config.continuation;
		const Json cfg_json = to_json(config);

		BranchResult branch;
		try
		{
			const ProblemState seed = critical_seed(problem, cc.start, cc);
			branch = continue_branch(problem, seed, cc);
		}
		catch (const std::exception &e)
		{
			if (dynamic_cast<const ConfigError *>(&e))
				throw;
			branch.status = BranchStatus::ConvergenceFailure;
			branch.message = std::string("seed preparation failed: ") + e.what();
		}

		std::string jsonl;
		std::ostringstream csv;
		std::vector<std::string> scalar_names;
		if (!branch.records.empty())
			for (const auto &[k, v] : branch.records.front().derived_scalars)
				scalar_names.push_back(k);
		csv << "lambda_hat,residual_norm,kernel_dim,killing_rank";
		for (const auto &k : scalar_names)
			csv << ',' << k;
		csv << '\n';
		bool diagnostics_ok = true;
		for (const BranchRecord &r : branch.records)
		{
			Json line = to_json(r);
			line["config"] = cfg_json;
			line["input_hash"] = r.input_hash;
			jsonl += dump_json(line) + "\n";
			csv << format_double(r.lambda_hat) << ',' << format_double(r.residual_norm) << ',' << r.kernel_dim << ','
			    << r.killing_rank;
			for (const auto &k : scalar_names)
				csv << ',' << format_double(r.derived_scalars.at(k));
			csv << '\n';
			if (r.diagnostics && !diagnostics_pass(*r.diagnostics))
				diagnostics_ok = false;
		}
		output.write("branch.jsonl", jsonl);
		output.write("branch.csv", csv.str());

		int code = ExitOk;
		if (branch.status == BranchStatus::ConvergenceFailure)
			code = ExitNoConvergence;
		else if (branch.status == BranchStatus::NondegeneracyLoss || !diagnostics_ok)
			code = ExitCheckFailed;
		if (!branch.message.empty())
			err << to_string(branch.status) << ": " << branch.message << "\n";
		if (!diagnostics_ok)
			err << "operator diagnostics failed on at least one record\n";

		Json result = {{"status", to_string(branch.status)},
		               {"message", branch.message},
		               {"records", branch.records.size()},
		               {"diagnostics_passed", diagnostics_ok},
		               {"problem", describe(problem)}};
		if (!branch.records.empty())
		{
			result["first_lambda_hat"] = branch.records.front().lambda_hat;
			result["last_lambda_hat"] = branch.records.back().lambda_hat;
			result["last_record"] = to_json(branch.records.back());
		}
		output.report(config, std::move(result), code);
		return code;
	}

	int run_congruence(const RunConfig &config, std::ostream &err)
	{
		const Output output(config);
		const Problem problem = make_problem(config.problem);
		const ContinuationConfig &cc = config.continuation;
		const double lambda = config.congruence.lambda;
		const int m = problem.motion_dim();

		Vector t(m);
		if (!config.congruence.motion.empty())
		{
			if (static_cast<int>(config.congruence.motion.size()) != m)
				throw ConfigError("congruence.motion needs " + std::to_string(m) + " entries for this instance");
			for (int i = 0; i < m; ++i)
				t(i) = config.congruence.motion[i];
		}
		else
		{
			std::mt19937_64 rng(config.seed);
			std::normal_distribution<double> normal;
			std::uniform_real_distribution<double> uniform;
			for (int i = 0; i < m; ++i)
				t(i) = normal(rng);
			t *= config.congruence.motion_radius * uniform(rng) / t.norm();
		}

		Json result = {{"lambda_hat", lambda}, {"problem", describe(problem)}, {"applied_motion", to_json(t)}};
		try
		{
			const ProblemState reference = critical_seed(problem, lambda, cc);
			const ProblemState moved = apply_motion(problem, reference, lambda, t);
			const ProblemState resolved = corrector_step(problem, moved, lambda, cc.corrector).state;
			const CongruenceResult c = congruence_check(problem, reference, resolved, lambda, config.congruence.tol,
			                                            cc.corrector);
			result["congruent"] = c.congruent;
			result["recovered_coefficients"] = to_json(c.parameters.coefficients);
			result["recovered_coords"] = to_json(c.parameters.coords);
			result["distance"] = c.distance;
			result["corrector_displacement"] = c.corrector_displacement;
			result["tol"] = config.congruence.tol;
			if (!c.message.empty())
				result["message"] = c.message;
			const int code = c.congruent ? ExitOk : ExitCheckFailed;
			if (!c.congruent)
				err << "states are not congruent (distance " << format_double(c.distance) << ")\n";
			output.report(config, std::move(result), code);
			return code;
		}
		catch (const std::exception &e)
		{
			if (dynamic_cast<const ConfigError *>(&e))
				throw;
			err << "congruence failure: " << e.what() << "\n";
			result["error"] = e.what();
			output.report(config, std::move(result), ExitNoConvergence);
			return ExitNoConvergence;
		}
	}

	int run_command(const RunConfig &config, std::ostream &err)
	{
		if (config.command == "verify-bundle")
			return run_verify_bundle(config, err);
		if (config.command == "analyze")
			return run_analyze(config, err);
		if (config.command == "continue")
			return run_continue(config, err);
		if (config.command == "congruence")
			return run_congruence(config, err);
		err << "unknown command '" << config.command << "'\n";
		return ExitUsage;
	}
} // namespace equideform
