// Command-line front end; all work happens behind the C API in libcustprof.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "custprof.h"

namespace {

int runSubcommand(const std::string& command, const std::string& configPath,
                  const std::string& outDir, bool hasSeed, std::uint64_t seed, bool verbose) {
    std::ifstream in(configPath, std::ios::binary);
    if (!in) {
        std::cerr << "custprof: cannot open config file: " << configPath << "\n";
        return CUSTPROF_ERR_DATA;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    const int rc = custprof_run(command.c_str(), buffer.str().c_str(),
                                outDir.empty() ? nullptr : outDir.c_str(), seed,
                                hasSeed ? 1 : 0, verbose ? 1 : 0);
    if (rc != CUSTPROF_OK) {
        std::cerr << "custprof " << command << ": " << custprof_last_error() << "\n";
    } else if (verbose) {
        std::cout << "custprof " << command << ": ok\n";
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Customer profiling toolkit: cleaning, RFM, segmentation, response models"};
    app.set_version_flag("--version", std::string(custprof_version()));

    std::string configPath;
    std::string outDir;
    std::uint64_t seed = 0;
    bool verbose = false;

    app.add_option("--config", configPath, "Pipeline config JSON")->required();
    app.add_option("--out", outDir, "Output directory (overrides config and CUSTPROF_OUT)");
    auto* seedOpt = app.add_option("--seed", seed, "Seed override");
    app.add_flag("--verbose", verbose, "Verbose output");
    app.require_subcommand(1);

    for (const char* name : {"clean", "rfm", "cluster", "train", "evaluate", "profile"}) {
        app.add_subcommand(name)->fallthrough();  // global flags may follow the subcommand
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    return runSubcommand(command, configPath, outDir, seedOpt->count() > 0, seed, verbose);
}
