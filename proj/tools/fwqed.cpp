// fwqed.cpp — command-line front end for the driven-lattice toolkit

#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwqed/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"driven photonic lattice / emitter toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    std::vector<std::string> overrides;
    int threads = 0;

    const std::vector<std::string> commands = {
        "bands",       "quasienergy-sweep", "winding",  "edge-profile",     "selfenergy",
        "decay",       "bound-state",       "exchange", "coupling-profile"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--set", overrides, "override a config entry, key=value (repeatable)");
        sub->add_option("--out", out_path, "output file path");
        sub->add_option("--format", format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "worker threads (0: FWQED_THREADS or hardware)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        fwqed::json j = fwqed::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
            in >> j;
        }
        for (const auto& o : overrides) fwqed::apply_override(j, o);

        auto config = fwqed::RunConfig::from_json_value(j);
        if (!out_path.empty()) config.out = out_path;
        if (!format.empty()) config.format = format == "json" ? fwqed::OutputFormat::JSON : fwqed::OutputFormat::CSV;
        if (threads > 0) config.threads = threads;
        config.lattice.validate();
        for (const auto& e : config.emitters) e.validate(config.lattice);

        const auto table = fwqed::run_command(command, config);
        fwqed::write_table(table, config);
        std::cout << command << ": wrote " << table.rows.size() << " rows to " << config.out << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
