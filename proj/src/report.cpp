#include "equideform/report.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace equideform
{
	std::string format_double(double x)
	{
		char buf[40];
		std::snprintf(buf, sizeof buf, "%.17g", x);
		return buf;
	}

	namespace
	{
		void write_string(std::string &out, const std::string &s)
		{
			// reuse the library's escaping
			out += Json(s).dump();
		}

		void write(std::string &out, const Json &v, int indent, int depth)
		{
			const bool pretty = indent > 0;
			auto newline = [&](int d) {
				if (pretty)
				{
					out += '\n';
					out.append(static_cast<std::size_t>(d * indent), ' ');
				}
			};
			switch (v.type())
			{
			case Json::value_t::object:
			{
				if (v.empty())
				{
					out += "{}";
					return;
				}
				out += '{';
				bool first = true;
				for (auto it = v.begin(); it != v.end(); ++it)
				{
					if (!first)
						out += ',';
					first = false;
					newline(depth + 1);
					write_string(out, it.key());
					out += pretty ? ": " : ":";
					write(out, it.value(), indent, depth + 1);
				}
				newline(depth);
				out += '}';
				return;
			}
			case Json::value_t::array:
			{
				if (v.empty())
				{
					out += "[]";
					return;
				}
				// numeric arrays stay on one line
				const bool flat = std::all_of(v.begin(), v.end(), [](const Json &e) { return e.is_primitive(); });
				out += '[';
				bool first = true;
				for (const auto &e : v)
				{
					if (!first)
						out += flat && pretty ? ", " : ",";
					first = false;
					if (!flat)
						newline(depth + 1);
					write(out, e, indent, depth + 1);
				}
				if (!flat)
					newline(depth);
				out += ']';
				return;
			}
			case Json::value_t::number_float:
			{
				const double x = v.get<double>();
				out += std::isfinite(x) ? format_double(x) : "null";
				return;
			}
			default:
				out += v.dump();
			}
		}
	} // namespace

	std::string dump_json(const Json &value)
	{
		std::string out;
		write(out, value, 0, 0);
		return out;
	}

	std::string dump_json_pretty(const Json &value)
	{
		std::string out;
		write(out, value, 2, 0);
		out += '\n';
		return out;
	}

	std::string content_hash(const std::string &bytes)
	{
		const std::string blob = "blob " + std::to_string(bytes.size()) + '\0' + bytes;
		unsigned char digest[SHA_DIGEST_LENGTH];
		SHA1(reinterpret_cast<const unsigned char *>(blob.data()), blob.size(), digest);
		static const char *hex = "0123456789abcdef";
		std::string out;
		for (unsigned char c : digest)
		{
			out += hex[c >> 4];
			out += hex[c & 15];
		}
		return out;
	}

	Json to_json(const Vector &v)
	{
		Json out = Json::array();
		for (Eigen::Index i = 0; i < v.size(); ++i)
			out.push_back(v(i));
		return out;
	}

	Json describe(const Problem &problem)
	{
		Json grid = {{"kind", problem.grid.kind == GridKind::Periodic ? "periodic" : "dirichlet"},
		             {"N", problem.grid.size()},
		             {"order", problem.grid.order == DiffOrder::Spectral ? "spectral"
		                                                                 : std::to_string(static_cast<int>(problem.grid.order))},
		             {"a", problem.grid.a},
		             {"b", problem.grid.b}};
		Json out = {{"instance", problem.name()}, {"grid", grid}};
		switch (problem.kind)
		{
		case InstanceKind::CmcCircle:
			out["H"] = problem.H;
			break;
		case InstanceKind::CmcProfile:
			out["H"] = problem.H;
			out["boundary_radii"] = {problem.radius_lo, problem.radius_hi};
			break;
		case InstanceKind::HarmonicTorus:
			out["class"] = {problem.p, problem.q};
			out["Q0"] = to_json(problem.Q0.reshaped());
			out["Q1"] = to_json(problem.Q1.reshaped());
			break;
		case InstanceKind::HarmonicSphere:
			out["winding"] = 1;
			break;
		}
		out["background_density"] = 1.0;
		return out;
	}

	std::string state_hash(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		const Json input = {{"problem", describe(problem)}, {"lambda_hat", lambda_hat}, {"state", to_json(state.values)}};
		return content_hash(dump_json(input));
	}
} // namespace equideform
