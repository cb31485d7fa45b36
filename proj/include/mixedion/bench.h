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
#ifndef MIXEDION_BENCH_H
#define MIXEDION_BENCH_H

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixedion/dynamics.h"
#include "mixedion/fockspace.h"
#include "mixedion/noise.h"
#include "mixedion/readout.h"

namespace mixedion {

inline constexpr const char *kVersion = "0.1.0";

/// Names accepted by `run`.
const std::vector<std::string> &experiment_names();

/// Everything one experiment run depends on. Zero gate rates select the gate
/// condition: δ = 2π/t_MS and Ω_j = δ/4.
struct ExperimentConfig {
    std::string experiment = "bell";
    std::uint64_t seed = 1;
    long shots = 1000;  // per scan point or setting
    int threads = 0;    // 0 selects default_threads()
    std::string out;

    double t_ms = 35e-6;
    double delta = 0;
    std::array<double, 2> rabi{0, 0};
    std::array<double, 2> phi_r{0, 0};
    std::array<double, 2> phi_b{0, 0};
    double rf_offset = 0;
    std::array<double, 2> stark{0, 0};
    bool spectator_enabled = false;
    std::array<double, 2> spectator{0, 0};
    CouplingModel model = CouplingModel::ExactLaguerre;

    double omega_z = kTwoPi * 2.5e6;
    std::array<double, 2> eta{0.156, 0.265};
    std::array<double, 2> microwave_rabi{kTwoPi * 50e3, kTwoPi * 50e3};
    std::array<double, 2> path{0, 0};

    ThermalSpec thermal{0.05, 1e-4};
    int n_max = -1;

    bool noise_enabled = true;
    NoiseBudget noise;
    DetectorModel detector;

    int scan_points = 16;
    std::vector<double> scan_nbar{0.05, 4.0};
    std::string bell_variant = "laser";
    CHSHSettings chsh;
    int sweep_n_max = 5;

    bool operator==(const ExperimentConfig &) const = default;

    /// Checks every field through its owning module; throws ConfigError.
    void validate() const;
    MSDriveParams drive() const;
    IonSystem system() const;
    NoiseBudget budget() const;
};

/// `key = value` lines, `#` comments, dotted keys. Unknown keys, malformed
/// values and duplicate keys throw ConfigError.
ExperimentConfig parse_config(const std::string &text);
/// Applies one `key=value` override.
void apply_override(ExperimentConfig &config, const std::string &assignment);
void set_config_value(ExperimentConfig &config, const std::string &key, const std::string &value);
/// Sorted canonical form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig &config);
/// FNV-1a over the canonical form without `out`, `seed` and `threads`.
std::uint64_t config_hash(const ExperimentConfig &config);
std::string hash_hex(std::uint64_t h);

/// One CSV row. kind is "point" (x set), "fit", "metric" or "exact".
struct ResultRow {
    std::string kind;
    std::string name;
    std::optional<double> x;
    double value = 0;
    double stderr_ = 0;
    long n = 0;

    bool operator==(const ResultRow &) const = default;
};

struct ResultSet {
    std::string experiment;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::vector<ResultRow> rows;

    /// First metric row with this name; throws std::out_of_range when absent.
    const ResultRow &metric(const std::string &name) const;
    /// Rows of `kind` ("point" or "exact") with this name, in output order.
    std::vector<ResultRow> points(const std::string &name, const std::string &kind = "point") const;
};

/// Runs the configured experiment and writes the CSV when `out` is set.
ResultSet run(const ExperimentConfig &config);

/// Header line plus `kind,name,x,value,stderr,n` rows, LF endings, shortest
/// round-trip numbers.
std::string to_csv(const ResultSet &result);
void write_csv(const ResultSet &result, const std::string &path);

struct CsvHeader {
    std::string version;
    std::string experiment;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};
/// Reads the first line of a CSV produced by to_csv; throws DataInconsistency
/// on anything else.
CsvHeader parse_csv_header(const std::string &csv);
/// True when the CSV was produced from this config and seed.
bool csv_matches(const std::string &csv, const ExperimentConfig &config);

/// Fixed-width table of metric rows: estimate ± stderr, in row order.
std::string summarize(const ResultSet &result);

}  // namespace mixedion

#endif
