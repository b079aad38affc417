#include "equideform/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pt = boost::property_tree;

namespace equideform
{
	namespace
	{
		const std::map<std::string, std::set<std::string>> &known_keys()
		{
			static const std::map<std::string, std::set<std::string>> keys = {
			    {"problem", {"instance", "H", "N", "order", "a", "b", "radius_lo", "radius_hi", "p", "q", "Q0", "Q1", "lambda"}},
			    {"path", {"start", "end", "steps", "initial_step", "min_step", "max_step", "retries", "growth"}},
			    {"tolerances",
			     {"corrector", "basin_guard", "max_iters", "max_condition", "kernel_rel", "angle", "min_gap", "killing_rel",
			      "criticality"}},
			    {"diagnostics", {"every", "probes"}},
			    {"bundle", {"lambdas", "dims", "samples"}},
			    {"congruence", {"lambda", "motion", "motion_radius", "tol"}},
			    {"output", {"dir"}},
			    {"test", {"inject"}},
			};
			return keys;
		}

		template <typename T>
		T parse_value(const std::string &key, const std::string &text)
		{
			std::istringstream in(text);
			T value{};
			in >> value;
			if (in.fail() || !(in >> std::ws).eof())
				throw ConfigError("invalid value for '" + key + "': '" + text + "'");
			if constexpr (std::is_floating_point_v<T>)
				if (!std::isfinite(value))
					throw ConfigError("non-finite value for '" + key + "'");
			return value;
		}

		template <typename T>
		std::vector<T> parse_list(const std::string &key, const std::string &text)
		{
			std::istringstream in(text);
			std::vector<T> out;
			std::string token;
			while (in >> token)
				out.push_back(parse_value<T>(key, token));
			if (out.empty())
				throw ConfigError("empty list for '" + key + "'");
			return out;
		}

		class Section
		{
		public:
			Section(const pt::ptree *tree, std::string name) : tree_(tree), name_(std::move(name)) {}

			template <typename T>
			void get(const std::string &key, T &target) const
			{
				if (!tree_)
					return;
				if (const auto v = tree_->get_optional<std::string>(key))
				{
					if constexpr (std::is_same_v<T, std::string>)
						target = *v;
					else
						target = parse_value<T>(name_ + "." + key, *v);
				}
			}

			bool has(const std::string &key) const { return tree_ && tree_->get_optional<std::string>(key); }

			std::string raw(const std::string &key) const { return tree_->get<std::string>(key); }

		private:
			const pt::ptree *tree_;
			std::string name_;
		};

		Matrix parse_gram(const std::string &key, const std::string &text)
		{
			const auto v = parse_list<double>(key, text);
			if (v.size() != 4)
				throw ConfigError("'" + key + "' needs 4 entries (row-major 2x2)");
			Matrix Q(2, 2);
			Q << v[0], v[1], v[2], v[3];
			if (Q(0, 1) != Q(1, 0) || !(Q(0, 0) > 0) || !(Q.determinant() > 0))
				throw ConfigError("'" + key + "' must be symmetric positive definite");
			return Q;
		}

		void require_positive(const std::string &key, double v)
		{
			if (!(v > 0))
				throw ConfigError("'" + key + "' must be positive");
		}
	} // namespace

	RunConfig parse_config(const std::string &text)
	{
		pt::ptree tree;
		try
		{
			std::istringstream in(text);
			pt::read_ini(in, tree);
		}
		catch (const pt::ini_parser_error &e)
		{
			throw ConfigError(std::string("malformed configuration: ") + e.what());
		}

		RunConfig cfg;
		cfg.source_hash = content_hash(text);
		for (const auto &[key, node] : tree)
		{
			if (node.empty())
			{
				if (key == "command")
					cfg.command = node.data();
				else if (key == "seed")
					cfg.seed = parse_value<std::uint64_t>("seed", node.data());
				else
					throw ConfigError("unknown top-level key '" + key + "'");
				continue;
			}
			const auto it = known_keys().find(key);
			if (it == known_keys().end())
				throw ConfigError("unknown section [" + key + "]");
			for (const auto &[k, child] : node)
				if (!it->second.count(k))
					throw ConfigError("unknown key '" + k + "' in section [" + key + "]");
		}
		auto section = [&](const std::string &name) {
			const auto child = tree.get_child_optional(name);
			return Section(child ? &*child : nullptr, name);
		};

		ProblemSpec &p = cfg.problem;
		const Section prob = section("problem");
		prob.get("instance", p.instance);
		prob.get("H", p.H);
		prob.get("N", p.N);
		prob.get("order", p.order);
		prob.get("a", p.a);
		prob.get("b", p.b);
		prob.get("radius_lo", p.radius_lo);
		prob.get("radius_hi", p.radius_hi);
		prob.get("p", p.p);
		prob.get("q", p.q);
		prob.get("lambda", p.lambda);
		if (prob.has("Q0"))
			p.Q0 = parse_gram("problem.Q0", prob.raw("Q0"));
		if (prob.has("Q1"))
			p.Q1 = parse_gram("problem.Q1", prob.raw("Q1"));
		static const std::set<std::string> instances = {"cmc_circle", "cmc_profile", "harmonic_torus", "harmonic_sphere"};
		if (!instances.count(p.instance))
			throw ConfigError("unknown instance '" + p.instance + "'");
		if (p.N < 8 || p.N > 4096)
			throw ConfigError("problem.N must lie in [8, 4096]");
		if (!p.order.empty() && p.order != "spectral" && p.order != "2" && p.order != "4")
			throw ConfigError("problem.order must be spectral, 2 or 4");

		ContinuationConfig &c = cfg.continuation;
		const Section path = section("path");
		path.get("start", c.start);
		path.get("end", c.end);
		path.get("initial_step", c.initial_step);
		c.max_step = c.initial_step;
		path.get("max_step", c.max_step);
		path.get("min_step", c.min_step);
		path.get("retries", c.retries);
		path.get("growth", c.growth);
		if (path.has("steps"))
		{
			if (path.has("initial_step"))
				throw ConfigError("path.steps and path.initial_step are exclusive");
			int steps = 0;
			path.get("steps", steps);
			if (steps < 1)
				throw ConfigError("path.steps must be >= 1");
			c.initial_step = std::abs(c.end - c.start) / steps;
			if (!path.has("max_step"))
				c.max_step = c.initial_step;
		}
		require_positive("path.initial_step", c.initial_step);
		require_positive("path.min_step", c.min_step);
		if (c.max_step < c.min_step)
			throw ConfigError("path.max_step must be >= path.min_step");
		if (c.retries < 0)
			throw ConfigError("path.retries must be >= 0");
		if (!(c.growth >= 1))
			throw ConfigError("path.growth must be >= 1");

		const Section tol = section("tolerances");
		tol.get("corrector", c.corrector.tolerance);
		tol.get("basin_guard", c.corrector.basin_guard);
		tol.get("max_iters", c.corrector.max_iters);
		tol.get("max_condition", c.corrector.max_condition);
		tol.get("killing_rel", c.corrector.killing_rel);
		c.tolerances.killing_rel = c.corrector.killing_rel;
		tol.get("kernel_rel", c.tolerances.kernel_rel);
		tol.get("angle", c.tolerances.angle);
		tol.get("min_gap", c.tolerances.min_gap);
		tol.get("criticality", c.tolerances.criticality);
		require_positive("tolerances.corrector", c.corrector.tolerance);
		require_positive("tolerances.basin_guard", c.corrector.basin_guard);
		require_positive("tolerances.max_condition", c.corrector.max_condition);
		require_positive("tolerances.killing_rel", c.corrector.killing_rel);
		require_positive("tolerances.angle", c.tolerances.angle);
		require_positive("tolerances.min_gap", c.tolerances.min_gap);
		require_positive("tolerances.criticality", c.tolerances.criticality);
		if (c.corrector.max_iters < 1)
			throw ConfigError("tolerances.max_iters must be >= 1");
		if (tol.has("kernel_rel") && !(c.tolerances.kernel_rel > 0 && c.tolerances.kernel_rel <= 1e-2))
			throw ConfigError("tolerances.kernel_rel must lie in (0, 1e-2]");

		const Section diag = section("diagnostics");
		diag.get("every", c.diagnostics_every);
		diag.get("probes", c.probes);
		if (c.diagnostics_every < 0 || c.probes < 1)
			throw ConfigError("diagnostics.every must be >= 0 and diagnostics.probes >= 1");

		const Section bundle = section("bundle");
		if (bundle.has("lambdas"))
			cfg.bundle.lambdas = parse_list<double>("bundle.lambdas", bundle.raw("lambdas"));
		if (bundle.has("dims"))
			cfg.bundle.dims = parse_list<int>("bundle.dims", bundle.raw("dims"));
		bundle.get("samples", cfg.bundle.samples);
		for (int n : cfg.bundle.dims)
			if (n < 2 || n > 8)
				throw ConfigError("bundle.dims entries must lie in [2, 8]");
		if (cfg.bundle.samples < 1)
			throw ConfigError("bundle.samples must be >= 1");

		const Section cong = section("congruence");
		cong.get("lambda", cfg.congruence.lambda);
		if (cong.has("motion"))
			cfg.congruence.motion = parse_list<double>("congruence.motion", cong.raw("motion"));
		cong.get("motion_radius", cfg.congruence.motion_radius);
		cong.get("tol", cfg.congruence.tol);
		require_positive("congruence.tol", cfg.congruence.tol);
		if (!(cfg.congruence.motion_radius >= 0))
			throw ConfigError("congruence.motion_radius must be >= 0");

		section("output").get("dir", cfg.out_dir);
		section("test").get("inject", cfg.inject);
		if (cfg.inject != "none" && cfg.inject != "broken_basis" && cfg.inject != "shifted_operator")
			throw ConfigError("test.inject must be none, broken_basis or shifted_operator");
		c.seed = cfg.seed;
		return cfg;
	}

	RunConfig load_config(const std::string &path)
	{
		std::ifstream in(path, std::ios::binary);
		if (!in)
			throw ConfigError("cannot read configuration file '" + path + "'");
		std::ostringstream text;
		text << in.rdbuf();
		return parse_config(text.str());
	}

	Problem make_problem(const ProblemSpec &spec)
	{
		const bool profile = spec.instance == "cmc_profile";
		DiffOrder order = profile ? DiffOrder::Fourth : DiffOrder::Spectral;
		if (spec.order == "2")
			order = DiffOrder::Second;
		else if (spec.order == "4")
			order = DiffOrder::Fourth;
		else if (spec.order == "spectral")
			order = DiffOrder::Spectral;
		try
		{
			if (profile)
				return Problem::cmc_profile(spec.H, dirichlet_grid(spec.N, spec.a, spec.b, order), spec.radius_lo,
				                            spec.radius_hi);
			const Grid grid = periodic_grid(spec.N, order);
			if (spec.instance == "cmc_circle")
				return Problem::cmc_circle(spec.H, grid);
			if (spec.instance == "harmonic_torus")
				return Problem::harmonic_torus(spec.p, spec.q, grid, spec.Q0, spec.Q1);
			return Problem::harmonic_sphere(grid);
		}
		catch (const std::logic_error &e)
		{
			throw ConfigError(std::string("invalid problem: ") + e.what());
		}
	}

	Json to_json(const RunConfig &config)
	{
		const ProblemSpec &p = config.problem;
		const ContinuationConfig &c = config.continuation;
		Json problem = {{"instance", p.instance}, {"N", p.N}, {"order", p.order.empty() ? "auto" : p.order}};
		if (p.instance == "cmc_circle" || p.instance == "cmc_profile")
			problem["H"] = p.H;
		if (p.instance == "cmc_profile")
		{
			problem["interval"] = {p.a, p.b};
			problem["boundary_radii"] = {p.radius_lo, p.radius_hi};
		}
		if (p.instance == "harmonic_torus")
		{
			problem["class"] = {p.p, p.q};
			problem["Q0"] = to_json(Vector(p.Q0.reshaped()));
			problem["Q1"] = to_json(Vector(p.Q1.reshaped()));
		}
		problem["lambda"] = p.lambda;
		Json out = {{"command", config.command}, {"seed", config.seed}, {"problem", problem}};
		out["path"] = {{"start", c.start},         {"end", c.end},         {"initial_step", c.initial_step},
		               {"min_step", c.min_step},   {"max_step", c.max_step}, {"retries", c.retries},
		               {"growth", c.growth}};
		out["tolerances"] = {{"corrector", c.corrector.tolerance},
		                     {"basin_guard", c.corrector.basin_guard},
		                     {"max_iters", c.corrector.max_iters},
		                     {"max_condition", c.corrector.max_condition},
		                     {"killing_rel", c.corrector.killing_rel},
		                     {"kernel_rel", c.tolerances.kernel_rel},
		                     {"angle", c.tolerances.angle},
		                     {"min_gap", c.tolerances.min_gap},
		                     {"criticality", c.tolerances.criticality}};
		out["diagnostics"] = {{"every", c.diagnostics_every}, {"probes", c.probes}};
		out["inject"] = config.inject;
		out["source_hash"] = config.source_hash;
		return out;
	}
} // namespace equideform
