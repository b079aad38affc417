#pragma once

// Run configuration: a single INI file with the sections
//
//   command = analyze | continue | verify-bundle | congruence   (optional, must match the CLI)
//   seed = <u64>
//   [problem]      instance, H, N, order, a, b, radius_lo, radius_hi, p, q, Q0, Q1, lambda
//   [path]         start, end, steps | initial_step, min_step, max_step, retries, growth
//   [tolerances]   corrector, basin_guard, max_iters, max_condition, kernel_rel, angle, min_gap,
//                  killing_rel, criticality
//   [diagnostics]  every, probes
//   [bundle]       lambdas, dims, samples
//   [congruence]   lambda, motion, motion_radius, tol
//   [output]       dir
//   [test]         inject = none | broken_basis | shifted_operator
//
// Unknown sections or keys and malformed values are rejected with ConfigError.

#include "equideform/continuation.hpp"
#include "equideform/report.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace equideform
{
	class ConfigError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	struct ProblemSpec
	{
		std::string instance = "cmc_circle";
		double H = 2.0;
		int N = 64;
		std::string order; // spectral | 2 | 4; empty selects spectral (periodic) or 4 (profile)
		double a = 0.0; // profile interval
		double b = 0.5;
		double radius_lo = 1.0;
		double radius_hi = 1.0;
		int p = 1;
		int q = 0;
		Matrix Q0 = Matrix::Identity(2, 2);
		Matrix Q1 = Matrix::Identity(2, 2);
		double lambda = 0.0; // parameter for analyze
	};

	struct BundleSpec
	{
		std::vector<double> lambdas{-2, -1, -0.5, 0, 0.5, 1, 2};
		std::vector<int> dims{2, 3};
		int samples = 200;
	};

	struct CongruenceSpec
	{
		double lambda = 0.0;
		std::vector<double> motion; // empty: seeded random motion of norm <= motion_radius
		double motion_radius = 0.05;
		double tol = 1e-8;
	};

	struct RunConfig
	{
		std::string command;
		ProblemSpec problem;
		ContinuationConfig continuation;
		BundleSpec bundle;
		CongruenceSpec congruence;
		std::uint64_t seed = 1;
		std::string out_dir = ".";
		std::string inject = "none";
		std::string source_hash; // content hash of the configuration text
	};

	RunConfig parse_config(const std::string &text);
	RunConfig load_config(const std::string &path);

	Problem make_problem(const ProblemSpec &spec);

	// Normalized configuration written into reports (output directory excluded).
	Json to_json(const RunConfig &config);
} // namespace equideform
