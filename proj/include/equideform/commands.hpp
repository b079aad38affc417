#pragma once

// Batch commands behind the equideform executable. Each writes report.json (and, for continue,
// branch.jsonl and branch.csv) into config.out_dir and returns the process exit code.

#include "equideform/config.hpp"

#include <ostream>

namespace equideform
{
	enum ExitCode : int
	{
		ExitOk = 0,
		ExitCheckFailed = 2,  // failed check, degenerate verdict, nondegeneracy halt
		ExitNoConvergence = 3, // corrector or continuation failure (partial output still written)
		ExitUsage = 64         // malformed command line or configuration
	};

	int run_verify_bundle(const RunConfig &config, std::ostream &err);
	int run_analyze(const RunConfig &config, std::ostream &err);
	int run_continue(const RunConfig &config, std::ostream &err);
	int run_congruence(const RunConfig &config, std::ostream &err);

	// Dispatches on config.command; unknown commands give ExitUsage.
	int run_command(const RunConfig &config, std::ostream &err);

	// JSON forms of the certification reports (fields as in the structs).
	Json to_json(const NondegeneracyReport &report);
	Json to_json(const DiagnosticsReport &report);
	Json to_json(const BranchRecord &record);
} // namespace equideform
