#pragma once

// Serialization helpers: 17-significant-digit JSON output and git-style content hashes.

#include "equideform/variational.hpp"

#include <json.hpp>

#include <string>

namespace equideform
{
	using Json = nlohmann::ordered_json;

	// "%.17g"; non-finite values are written as null by dump_json.
	std::string format_double(double x);

	// Compact single-line JSON with every floating-point number printed with 17 significant digits.
	std::string dump_json(const Json &value);
	// Indented variant used for report.json.
	std::string dump_json_pretty(const Json &value);

	// SHA-1 of "blob <size>\0<bytes>", as computed by git hash-object.
	std::string content_hash(const std::string &bytes);

	Json to_json(const Vector &v);

	// Stable description of a problem (instance, grid, fixed data).
	Json describe(const Problem &problem);

	// Hash over problem description, parameter value and state values.
	std::string state_hash(const Problem &problem, const ProblemState &state, double lambda_hat);
} // namespace equideform
