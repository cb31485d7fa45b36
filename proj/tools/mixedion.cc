// Copyright 2026 The mixedion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command-line front end: one subcommand per experiment.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mixedion/bench.h"
#include "mixedion/errors.h"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw mixedion::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Mixed-species trapped-ion register simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    long shots = 0;
    int threads = 0;
    std::string out;
    bool dump = false;
    auto *seed_opt = app.add_option("--seed", seed, "Master seed");
    auto *shots_opt = app.add_option("--shots", shots, "Shots per scan point or setting");
    auto *threads_opt = app.add_option("--threads", threads, "Worker threads (default: MIXEDION_THREADS or all cores)");
    auto *out_opt = app.add_option("--out", out, "CSV output path (default: stdout)");
    app.add_option("--config", config_path, "Config file of key = value lines");
    app.add_option("--set", overrides, "Override one key: --set key=value (repeatable)");
    app.add_flag("--dump-config", dump, "Print the resolved config and exit");
    for (const std::string &name : mixedion::experiment_names()) app.add_subcommand(name, "Run the " + name + " experiment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kConfigError;
    }

    mixedion::ExperimentConfig config;
    try {
        if (!config_path.empty()) config = mixedion::parse_config(read_file(config_path));
        config.experiment = app.get_subcommands().front()->get_name();
        for (const std::string &o : overrides) mixedion::apply_override(config, o);
        if (*seed_opt) config.seed = seed;
        if (*shots_opt) config.shots = shots;
        if (*threads_opt) config.threads = threads;
        if (*out_opt) config.out = out;
        if (dump) {
            std::cout << mixedion::serialize_config(config);
            return 0;
        }
        config.validate();
    } catch (const mixedion::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        mixedion::ResultSet result = mixedion::run(config);
        if (config.out.empty()) {
            std::cout << mixedion::to_csv(result);
            std::cerr << mixedion::summarize(result);
        } else {
            std::cout << mixedion::summarize(result);
        }
    } catch (const mixedion::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const mixedion::CutoffTooSmall &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
