#include "equideform/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace equideform;

int main(int argc, char **argv)
{
	CLI::App app{"Equivariant deformation analysis of constant mean curvature curves, surfaces of revolution and "
	             "harmonic maps"};
	std::string command;
	std::string config_path;
	std::string out_dir;
	std::uint64_t seed = 0;
	app.add_option("command", command, "verify-bundle | analyze | continue | congruence")
	    ->required()
	    ->check(CLI::IsMember({"verify-bundle", "analyze", "continue", "congruence"}));
	app.add_option("--config", config_path, "INI configuration file")->required();
	auto *out_opt = app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
	auto *seed_opt = app.add_option("--seed", seed, "random seed (overrides the configuration)");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::CallForHelp &e)
	{
		return app.exit(e);
	}
	catch (const CLI::ParseError &e)
	{
		app.exit(e);
		return ExitUsage;
	}

	try
	{
		RunConfig config = load_config(config_path);
		if (!config.command.empty() && config.command != command)
			throw ConfigError("configuration is for command '" + config.command + "', not '" + command + "'");
		config.command = command;
		if (*out_opt)
			config.out_dir = out_dir;
		if (*seed_opt)
			config.seed = config.continuation.seed = seed;
		return run_command(config, std::cerr);
	}
	catch (const ConfigError &e)
	{
		std::cerr << "configuration error: " << e.what() << "\n";
		return ExitUsage;
	}
	catch (const std::exception &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return ExitNoConvergence;
	}
}
