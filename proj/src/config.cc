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
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mixedion/bench.h"
#include "mixedion/errors.h"
#include "mixedion/format.h"

namespace mixedion {

namespace {

using Getter = std::function<std::string(const ExperimentConfig &)>;
using Setter = std::function<void(ExperimentConfig &, const std::string &)>;

struct Field {
    Getter get;
    Setter set;
};

std::string trim(const std::string &s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string &key, const std::string &v, const char *expected) {
    throw ConfigError("config: " + key + " = '" + v + "' is not " + expected);
}

double to_double(const std::string &key, const std::string &v) {
    double x = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v, "a number");
    return x;
}

template <typename Int>
Int to_int(const std::string &key, const std::string &v) {
    Int x = 0;
    auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "an integer");
    return x;
}

bool to_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v, "true or false");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::string from_list(const std::vector<double> &xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_double(xs[i]);
    }
    return out;
}

std::vector<double> to_list(const std::string &key, const std::string &v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) bad_value(key, v, "a comma-separated list of numbers");
    return out;
}

Field real(double ExperimentConfig::*m, const std::string &key) {
    return {[m](const ExperimentConfig &c) { return format_double(c.*m); },
            [m, key](ExperimentConfig &c, const std::string &v) { c.*m = to_double(key, v); }};
}

Field pair_real(std::array<double, 2> ExperimentConfig::*m, int i, const std::string &key) {
    return {[m, i](const ExperimentConfig &c) { return format_double((c.*m)[i]); },
            [m, i, key](ExperimentConfig &c, const std::string &v) { (c.*m)[i] = to_double(key, v); }};
}

Field noise_real(double NoiseBudget::*m, const std::string &key) {
    return {[m](const ExperimentConfig &c) { return format_double(c.noise.*m); },
            [m, key](ExperimentConfig &c, const std::string &v) { c.noise.*m = to_double(key, v); }};
}

Field noise_flag(bool NoiseBudget::*m, const std::string &key) {
    return {[m](const ExperimentConfig &c) { return from_bool(c.noise.*m); },
            [m, key](ExperimentConfig &c, const std::string &v) { c.noise.*m = to_bool(key, v); }};
}

Field detector_real(Species s, double SpeciesDetector::*m, const std::string &key) {
    return {[s, m](const ExperimentConfig &c) { return format_double(c.detector[s].*m); },
            [s, m, key](ExperimentConfig &c, const std::string &v) { c.detector[s].*m = to_double(key, v); }};
}

const std::map<std::string, Field> &fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["experiment"] = {[](const ExperimentConfig &c) { return c.experiment; },
                           [](ExperimentConfig &c, const std::string &v) { c.experiment = v; }};
        t["seed"] = {[](const ExperimentConfig &c) { return std::to_string(c.seed); },
                     [](ExperimentConfig &c, const std::string &v) { c.seed = to_int<std::uint64_t>("seed", v); }};
        t["shots"] = {[](const ExperimentConfig &c) { return std::to_string(c.shots); },
                      [](ExperimentConfig &c, const std::string &v) { c.shots = to_int<long>("shots", v); }};
        t["threads"] = {[](const ExperimentConfig &c) { return std::to_string(c.threads); },
                        [](ExperimentConfig &c, const std::string &v) { c.threads = to_int<int>("threads", v); }};
        t["out"] = {[](const ExperimentConfig &c) { return c.out; },
                    [](ExperimentConfig &c, const std::string &v) { c.out = v; }};

        t["gate.t_ms"] = real(&ExperimentConfig::t_ms, "gate.t_ms");
        t["gate.delta"] = real(&ExperimentConfig::delta, "gate.delta");
        t["gate.rf_offset"] = real(&ExperimentConfig::rf_offset, "gate.rf_offset");
        t["gate.model"] = {[](const ExperimentConfig &c) { return std::string(model_name(c.model)); },
                           [](ExperimentConfig &c, const std::string &v) {
                               if (v == "lamb-dicke") {
                                   c.model = CouplingModel::LambDicke;
                               } else if (v == "exact-laguerre") {
                                   c.model = CouplingModel::ExactLaguerre;
                               } else {
                                   bad_value("gate.model", v, "lamb-dicke or exact-laguerre");
                               }
                           }};
        t["gate.spectator"] = {[](const ExperimentConfig &c) { return from_bool(c.spectator_enabled); },
                               [](ExperimentConfig &c, const std::string &v) {
                                   c.spectator_enabled = to_bool("gate.spectator", v);
                               }};
        for (Species s : kAllSpecies) {
            const int i = idx(s);
            const std::string sp = s == Species::Be ? "be" : "mg";
            auto key = [&](const std::string &group, const std::string &name) { return group + "." + sp + "." + name; };
            t[key("gate", "rabi")] = pair_real(&ExperimentConfig::rabi, i, key("gate", "rabi"));
            t[key("gate", "phi_r")] = pair_real(&ExperimentConfig::phi_r, i, key("gate", "phi_r"));
            t[key("gate", "phi_b")] = pair_real(&ExperimentConfig::phi_b, i, key("gate", "phi_b"));
            t[key("gate", "stark")] = pair_real(&ExperimentConfig::stark, i, key("gate", "stark"));
            t[key("gate", "spectator")] = pair_real(&ExperimentConfig::spectator, i, key("gate", "spectator"));
            t[key("mode", "eta")] = pair_real(&ExperimentConfig::eta, i, key("mode", "eta"));
            t["microwave." + sp + ".rabi"] =
                pair_real(&ExperimentConfig::microwave_rabi, i, "microwave." + sp + ".rabi");
            t["path." + sp] = pair_real(&ExperimentConfig::path, i, "path." + sp);
            t[key("detector", "bright")] = detector_real(s, &SpeciesDetector::bright_mean, key("detector", "bright"));
            t[key("detector", "dark")] = detector_real(s, &SpeciesDetector::dark_mean, key("detector", "dark"));
            t[key("detector", "duration")] =
                detector_real(s, &SpeciesDetector::detect_duration, key("detector", "duration"));
            const std::string thr = key("detector", "threshold");
            t[thr] = {[s](const ExperimentConfig &c) { return std::to_string(c.detector[s].threshold); },
                      [s, thr](ExperimentConfig &c, const std::string &v) {
                          c.detector[s].threshold = to_int<int>(thr, v);
                      }};
            t["chsh." + sp] = {[i](const ExperimentConfig &c) {
                                   const auto &a = i == 0 ? c.chsh.be : c.chsh.mg;
                                   return from_list({a[0], a[1]});
                               },
                               [i, sp](ExperimentConfig &c, const std::string &v) {
                                   auto xs = to_list("chsh." + sp, v);
                                   if (xs.size() != 2) bad_value("chsh." + sp, v, "two phases");
                                   auto &a = i == 0 ? c.chsh.be : c.chsh.mg;
                                   a = {xs[0], xs[1]};
                               }};
        }
        t["mode.omega_z"] = real(&ExperimentConfig::omega_z, "mode.omega_z");

        t["thermal.nbar"] = {[](const ExperimentConfig &c) { return format_double(c.thermal.nbar); },
                             [](ExperimentConfig &c, const std::string &v) {
                                 c.thermal.nbar = to_double("thermal.nbar", v);
                             }};
        t["thermal.tail_tol"] = {[](const ExperimentConfig &c) { return format_double(c.thermal.tail_tol); },
                                 [](ExperimentConfig &c, const std::string &v) {
                                     c.thermal.tail_tol = to_double("thermal.tail_tol", v);
                                 }};
        t["thermal.n_max"] = {[](const ExperimentConfig &c) { return std::to_string(c.n_max); },
                              [](ExperimentConfig &c, const std::string &v) {
                                  c.n_max = to_int<int>("thermal.n_max", v);
                              }};

        t["noise.enabled"] = {[](const ExperimentConfig &c) { return from_bool(c.noise_enabled); },
                              [](ExperimentConfig &c, const std::string &v) {
                                  c.noise_enabled = to_bool("noise.enabled", v);
                              }};
        t["noise.p_scatter_be"] = noise_real(&NoiseBudget::p_scatter_be, "noise.p_scatter_be");
        t["noise.p_scatter_mg"] = noise_real(&NoiseBudget::p_scatter_mg, "noise.p_scatter_mg");
        t["noise.p_heating"] = noise_real(&NoiseBudget::p_heating, "noise.p_heating");
        t["noise.spam_error"] = noise_real(&NoiseBudget::spam_error, "noise.spam_error");
        t["noise.t2_be"] = noise_real(&NoiseBudget::t2_be, "noise.t2_be");
        t["noise.t2_mg"] = noise_real(&NoiseBudget::t2_mg, "noise.t2_mg");
        t["noise.dephasing_be"] = noise_flag(&NoiseBudget::dephasing_be, "noise.dephasing_be");
        t["noise.dephasing_mg"] = noise_flag(&NoiseBudget::dephasing_mg, "noise.dephasing_mg");
        t["noise.path_drift_sigma"] = noise_real(&NoiseBudget::path_drift_sigma, "noise.path_drift_sigma");
        t["noise.channel"] = {[](const ExperimentConfig &c) { return std::string(channel_name(c.noise.channel)); },
                              [](ExperimentConfig &c, const std::string &v) {
                                  for (auto ch : {ScatterChannel::Depolarize, ScatterChannel::Raman,
                                                  ScatterChannel::Rayleigh}) {
                                      if (v == channel_name(ch)) {
                                          c.noise.channel = ch;
                                          return;
                                      }
                                  }
                                  bad_value("noise.channel", v, "depolarize, raman or rayleigh");
                              }};
        t["noise.law"] = {[](const ExperimentConfig &c) { return std::string(law_name(c.noise.law)); },
                          [](ExperimentConfig &c, const std::string &v) {
                              if (v == "exponential") {
                                  c.noise.law = DephasingLaw::Exponential;
                              } else if (v == "gaussian") {
                                  c.noise.law = DephasingLaw::Gaussian;
                              } else {
                                  bad_value("noise.law", v, "exponential or gaussian");
                              }
                          }};

        t["scan.points"] = {[](const ExperimentConfig &c) { return std::to_string(c.scan_points); },
                            [](ExperimentConfig &c, const std::string &v) {
                                c.scan_points = to_int<int>("scan.points", v);
                            }};
        t["scan.nbar"] = {[](const ExperimentConfig &c) { return from_list(c.scan_nbar); },
                          [](ExperimentConfig &c, const std::string &v) { c.scan_nbar = to_list("scan.nbar", v); }};
        t["bell.variant"] = {[](const ExperimentConfig &c) { return c.bell_variant; },
                             [](ExperimentConfig &c, const std::string &v) { c.bell_variant = v; }};
        t["sweep.n_max"] = {[](const ExperimentConfig &c) { return std::to_string(c.sweep_n_max); },
                            [](ExperimentConfig &c, const std::string &v) {
                                c.sweep_n_max = to_int<int>("sweep.n_max", v);
                            }};
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<std::string> &experiment_names() {
    static const std::vector<std::string> names{"bell",       "parity-scan", "chsh",     "qls-compare",
                                                "swap-ramsey", "calibrate-g", "gate-sweep"};
    return names;
}

void set_config_value(ExperimentConfig &config, const std::string &key, const std::string &value) {
    auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second.set(config, value);
}

void apply_override(ExperimentConfig &config, const std::string &assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("config: override '" + assignment + "' is not key=value");
    set_config_value(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

ExperimentConfig parse_config(const std::string &text) {
    ExperimentConfig config;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        if (!seen.insert(key).second) {
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        try {
            set_config_value(config, key, trim(line.substr(eq + 1)));
        } catch (const ConfigError &e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return config;
}

std::string serialize_config(const ExperimentConfig &config) {
    std::string out;
    for (const auto &[key, field] : fields()) out += key + " = " + field.get(config) + "\n";
    return out;
}

std::uint64_t config_hash(const ExperimentConfig &config) {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto &[key, field] : fields()) {
        if (key == "out" || key == "seed" || key == "threads") continue;
        for (char ch : key + "=" + field.get(config) + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ExperimentConfig::validate() const {
    const auto &names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw ConfigError("config: unknown experiment '" + experiment + "'");
    }
    if (shots <= 0) throw ConfigError("config: shots must be positive");
    if (threads < 0) throw ConfigError("config: threads must be >= 0");
    if (scan_points < 8) throw ConfigError("config: scan.points must be at least 8");
    if (scan_nbar.empty()) throw ConfigError("config: scan.nbar must not be empty");
    for (double nb : scan_nbar) ThermalSpec{nb, thermal.tail_tol}.validate();
    if (bell_variant != "laser" && bell_variant != "microwave") {
        throw ConfigError("config: bell.variant must be laser or microwave");
    }
    if (sweep_n_max < 0) throw ConfigError("config: sweep.n_max must be >= 0");
    if (n_max < -1) throw ConfigError("config: thermal.n_max must be >= 0 (or -1 for automatic)");
    if (!(t_ms > 0)) throw ConfigError("config: gate.t_ms must be positive");
    thermal.validate();
    drive().validate();
    system().validate();
    noise.validate();
    detector.validate();
    chsh.validate();
}

MSDriveParams ExperimentConfig::drive() const {
    MSDriveParams d = gate_condition_drive(t_ms, model);
    if (delta != 0) d.delta = delta;
    for (Species s : kAllSpecies) {
        const int i = idx(s);
        d.rabi[i] = rabi[i] != 0 ? rabi[i] : d.delta / 4;
        d.ledger.set_sideband_phases(s, phi_r[i], phi_b[i]);
        d.ledger.set_path_offset(s, path[i]);
        d.stark_shift[i] = stark[i];
        d.spectator[i] = spectator[i];
    }
    d.ledger.set_ms_rf_offset(rf_offset);
    d.spectator_enabled = spectator_enabled;
    return d;
}

IonSystem ExperimentConfig::system() const {
    IonSystem base;
    base.mode.omega_z = omega_z;
    for (Species s : kAllSpecies) {
        base[s].eta = eta[idx(s)];
        base[s].microwave_rabi = microwave_rabi[idx(s)];
    }
    return system_for_drive(drive(), base);
}

NoiseBudget ExperimentConfig::budget() const { return noise_enabled ? noise : NoiseBudget::none(); }

}  // namespace mixedion
