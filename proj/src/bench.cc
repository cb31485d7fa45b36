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
#include "mixedion/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mixedion/errors.h"
#include "mixedion/estimators.h"
#include "mixedion/format.h"
#include "mixedion/parallel.h"
#include "mixedion/sequences.h"

namespace mixedion {

namespace {

struct Context {
    const ExperimentConfig &cfg;
    MSDriveParams drive;
    IonSystem system;
    int threads;
    Executor clean;
    GCalibration cal;
    ResultSet result;
    std::uint64_t next_shot = 0;

    explicit Context(const ExperimentConfig &c)
        : cfg(c),
          drive(c.drive()),
          system(c.system()),
          threads(c.threads > 0 ? c.threads : default_threads()),
          clean(system, drive, NoiseBudget::none(), c.detector, threads),
          cal(calibrate_G(clean, drive)) {
        result.experiment = c.experiment;
        result.config_hash = config_hash(c);
        result.seed = c.seed;
    }

    Executor noisy() const { return Executor(system, drive, cfg.budget(), cfg.detector, threads); }

    InitialEnsemble ensemble(double nbar) const {
        InitialEnsemble e;
        e.thermal = cfg.thermal;
        e.thermal.nbar = nbar;
        e.n_max = cfg.n_max;
        return e;
    }

    std::vector<ShotRecord> shots(const Executor &ex, const Sequence &seq, const InitialEnsemble &ens) {
        auto records = ex.execute(seq, ens, cfg.shots, cfg.seed, next_shot);
        next_shot += static_cast<std::uint64_t>(cfg.shots);
        return records;
    }

    void point(const std::string &name, double x, double value, double err, long n) {
        result.rows.push_back({"point", name, x, value, err, n});
    }
    void exact(const std::string &name, double x, double value) {
        result.rows.push_back({"exact", name, x, value, 0, 0});
    }
    void fit(const std::string &name, double value, double err = 0) {
        result.rows.push_back({"fit", name, std::nullopt, value, err, 0});
    }
    void metric(const std::string &name, double value, double err = 0, long n = 0) {
        result.rows.push_back({"metric", name, std::nullopt, value, err, n});
    }
};

BellVariant bell_variant(const ExperimentConfig &cfg) {
    return cfg.bell_variant == "microwave" ? BellVariant::Microwave : BellVariant::Laser;
}

PhaseTemplate parity_template(const Context &ctx) {
    BellVariant v = bell_variant(ctx.cfg);
    return [&ctx, v](double phi) {
        return build_bell(v, ctx.cal, ctx.drive, ctx.system, std::array<double, 2>{phi, phi});
    };
}

void add_parity_rows(Context &ctx, const ParityCurve &curve) {
    for (const CurvePoint &p : curve.points) ctx.point("parity", p.x, p.y, p.stderr_, ctx.cfg.shots);
    ctx.fit("parity_amplitude", curve.fit.amplitude, curve.fit.amplitude_stderr);
    ctx.fit("parity_phase", curve.fit.phase);
    ctx.fit("parity_offset", curve.fit.offset);
    ctx.fit("parity_k1_amplitude", curve.fit_k1.amplitude, curve.fit_k1.amplitude_stderr);
}

void run_bell(Context &ctx) {
    Executor ex = ctx.noisy();
    InitialEnsemble ens = ctx.ensemble(ctx.cfg.thermal.nbar);
    BellVariant v = bell_variant(ctx.cfg);
    Populations pops = populations(ctx.shots(ex, build_bell(v, ctx.cal, ctx.drive, ctx.system), ens));
    ParityCurve curve = parity_scan(ex, parity_template(ctx), phase_grid(ctx.cfg.scan_points), ctx.cfg.shots, ens,
                                    ctx.cfg.seed, ctx.next_shot);
    ctx.next_shot += static_cast<std::uint64_t>(ctx.cfg.shots) * ctx.cfg.scan_points;
    add_parity_rows(ctx, curve);
    static const char *names[4] = {"P_upup", "P_updown", "P_downup", "P_downdown"};
    for (int i = 0; i < 4; ++i) ctx.metric(names[i], pops.p[i], pops.stderr_[i], pops.shots);
    double pop_err = *std::max_element(pops.stderr_.begin(), pops.stderr_.end());
    BellEstimate est = bell_fidelity(pops.p, curve.fit.amplitude, pop_err, curve.fit.amplitude_stderr);
    ctx.metric("parity_contrast", est.contrast, curve.fit.amplitude_stderr, ctx.cfg.shots * ctx.cfg.scan_points);
    ctx.metric("fidelity", est.fidelity, est.fidelity_stderr, pops.shots + ctx.cfg.shots * ctx.cfg.scan_points);
    SpinMatrix rho = ctx.clean.thermal_density(build_bell(v, ctx.cal, ctx.drive, ctx.system), ens);
    ctx.metric("exact_fidelity", bell_fidelity_local_frame(rho));
}

void run_parity_scan(Context &ctx) {
    Executor ex = ctx.noisy();
    InitialEnsemble ens = ctx.ensemble(ctx.cfg.thermal.nbar);
    auto grid = phase_grid(ctx.cfg.scan_points);
    ParityCurve curve = parity_scan(ex, parity_template(ctx), grid, ctx.cfg.shots, ens, ctx.cfg.seed, 0);
    add_parity_rows(ctx, curve);
    ParityCurve ideal = exact_parity_curve(ctx.clean, parity_template(ctx), grid, ens);
    for (const CurvePoint &p : ideal.points) ctx.exact("parity", p.x, p.y);
    ctx.metric("parity_contrast", curve.fit.amplitude, curve.fit.amplitude_stderr,
               ctx.cfg.shots * ctx.cfg.scan_points);
    ctx.metric("exact_parity_contrast", ideal.fit.amplitude);
}

void run_chsh(Context &ctx) {
    Executor ex = ctx.noisy();
    InitialEnsemble ens = ctx.ensemble(ctx.cfg.thermal.nbar);
    BellVariant v = bell_variant(ctx.cfg);
    SettingsTemplate make = [&ctx, v](std::array<double, 2> phases) {
        return build_bell(v, ctx.cal, ctx.drive, ctx.system, phases);
    };
    CHSHResult r = chsh(ex, make, ctx.cfg.chsh, ctx.cfg.shots, ens, ctx.cfg.seed, 0);
    static const char *names[4] = {"E_a_b", "E_a_b'", "E_a'_b", "E_a'_b'"};
    for (int i = 0; i < 4; ++i) ctx.metric(names[i], r.e[i], r.e_stderr[i], ctx.cfg.shots);
    ctx.metric("B", r.b, r.b_stderr, 4 * ctx.cfg.shots);
    ctx.fit("phase_offset", r.phase_offset);
}

std::string nbar_tag(double nbar) { return "nbar=" + format_double(nbar); }

// Noisy and noiseless P(Mg ↓) over the grid, with the fitted contrasts.
template <typename Make>
void contrast_scan(Context &ctx, const Executor &ex, const std::string &name, double nbar, Make make) {
    InitialEnsemble ens = ctx.ensemble(nbar);
    std::vector<CurvePoint> curve;
    std::vector<CurvePoint> ideal;
    for (double x : phase_grid(ctx.cfg.scan_points)) {
        Sequence seq = make(x);
        CurvePoint p = down_fraction(x, ctx.shots(ex, seq, ens), Species::Mg);
        ctx.point(name, x, p.y, p.stderr_, ctx.cfg.shots);
        curve.push_back(p);
        auto pops = ctx.clean.thermal_populations(seq, ens);
        ideal.push_back({x, pops[1] + pops[3], 0});
        ctx.exact(name, x, ideal.back().y);
    }
    SinusoidFit f;
    double c = population_contrast(curve, &f);
    ctx.metric("contrast:" + name, c, 2 * f.amplitude_stderr, ctx.cfg.shots * ctx.cfg.scan_points);
    ctx.metric("exact_contrast:" + name, population_contrast(ideal));
}

void run_qls_compare(Context &ctx) {
    Executor ex = ctx.noisy();
    for (double nbar : ctx.cfg.scan_nbar) {
        for (QLSVariant v : {QLSVariant::Conventional, QLSVariant::CnotTransfer}) {
            contrast_scan(ctx, ex, std::string(variant_name(v)) + ":" + nbar_tag(nbar), nbar, [&](double theta) {
                return build_qls(v, theta, ctx.cal, ctx.drive, ctx.system);
            });
        }
    }
}

void run_swap_ramsey(Context &ctx) {
    Executor ex = ctx.noisy();
    for (double nbar : ctx.cfg.scan_nbar) {
        contrast_scan(ctx, ex, nbar_tag(nbar), nbar,
                      [&](double phi) { return build_swap_ramsey(phi, ctx.cal, ctx.drive, ctx.system); });
    }
}

SpinMatrix ideal_G() {
    SpinMatrix g = SpinMatrix::Zero();
    g(0, 0) = 1;
    g(1, 1) = cplx(0, 1);
    g(2, 2) = cplx(0, 1);
    g(3, 3) = 1;
    return g;
}

void run_calibrate_g(Context &ctx) {
    const GCalibration &cal = ctx.cal;
    for (Species s : kAllSpecies) {
        std::string sp = s == Species::Be ? "be" : "mg";
        ctx.metric("ramsey_phase_correction_" + sp, cal.ramsey_phase_corrections[idx(s)]);
        ctx.metric("stark_shift_compensation_" + sp, cal.stark_shift_compensation[idx(s)]);
    }
    ctx.metric("ms_phase_setting", cal.ms_phase_setting);
    ctx.metric("calibration_population", cal.population);
    Sequence g = build_phase_gate_G(cal, ctx.drive, ctx.system);
    ctx.metric("g_distance_n0", gate_distance(spin_unitary(ctx.clean, g, 0), ideal_G()));
}

void run_gate_sweep(Context &ctx) {
    Sequence bell = build_bell(BellVariant::Laser, ctx.cal, ctx.drive, ctx.system);
    Sequence g = build_phase_gate_G(ctx.cal, ctx.drive, ctx.system);
    const int n_top = ctx.cfg.sweep_n_max;
    RegisterShape shape(std::max(16, n_top + 24));
    double f_min = 1, f_max = 0, d_max = 0;
    for (int n = 0; n <= n_top; ++n) {
        QuantumState out = ctx.clean.evolve(bell, compose_state(Level::Up, Level::Up, n, shape));
        double f = bell_fidelity_local_frame(reduced_qubit_density(out));
        ctx.exact("bell_fidelity", n, f);
        f_min = std::min(f_min, f);
        f_max = std::max(f_max, f);
    }
    for (int n = 0; n <= n_top; ++n) {
        double d = gate_distance(spin_unitary(ctx.clean, g, n, shape.n_max()), ideal_G());
        ctx.exact("g_distance", n, d);
        d_max = std::max(d_max, d);
    }
    ctx.metric("bell_fidelity_min", f_min);
    ctx.metric("bell_fidelity_max", f_max);
    ctx.metric("g_distance_max", d_max);
}

}  // namespace

const ResultRow &ResultSet::metric(const std::string &name) const {
    for (const ResultRow &r : rows) {
        if (r.kind == "metric" && r.name == name) return r;
    }
    throw std::out_of_range("result has no metric '" + name + "'");
}

std::vector<ResultRow> ResultSet::points(const std::string &name, const std::string &kind) const {
    std::vector<ResultRow> out;
    for (const ResultRow &r : rows) {
        if (r.kind == kind && r.name == name) out.push_back(r);
    }
    return out;
}

ResultSet run(const ExperimentConfig &config) {
    config.validate();
    Context ctx(config);
    const std::string &e = config.experiment;
    if (e == "bell") {
        run_bell(ctx);
    } else if (e == "parity-scan") {
        run_parity_scan(ctx);
    } else if (e == "chsh") {
        run_chsh(ctx);
    } else if (e == "qls-compare") {
        run_qls_compare(ctx);
    } else if (e == "swap-ramsey") {
        run_swap_ramsey(ctx);
    } else if (e == "calibrate-g") {
        run_calibrate_g(ctx);
    } else {
        run_gate_sweep(ctx);
    }
    if (!config.out.empty()) write_csv(ctx.result, config.out);
    return ctx.result;
}

std::string to_csv(const ResultSet &result) {
    std::string out = "# mixedion " + result.version + " experiment=" + result.experiment +
                      " config_hash=" + hash_hex(result.config_hash) + " seed=" + std::to_string(result.seed) + "\n";
    out += "kind,name,x,value,stderr,n\n";
    for (const ResultRow &r : result.rows) {
        out += r.kind + "," + r.name + "," + (r.x ? format_double(*r.x) : "") + "," + format_double(r.value) + "," +
               format_double(r.stderr_) + "," + std::to_string(r.n) + "\n";
    }
    return out;
}

void write_csv(const ResultSet &result, const std::string &path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << to_csv(result);
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

CsvHeader parse_csv_header(const std::string &csv) {
    std::string line = csv.substr(0, csv.find('\n'));
    std::istringstream in(line);
    std::string hash_mark, tool;
    CsvHeader h;
    if (!(in >> hash_mark >> tool >> h.version) || hash_mark != "#" || tool != "mixedion") {
        throw DataInconsistency("csv: missing mixedion header");
    }
    bool have_hash = false, have_seed = false;
    std::string field;
    while (in >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw DataInconsistency("csv: malformed header field '" + field + "'");
        std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        try {
            if (key == "experiment") {
                h.experiment = value;
            } else if (key == "config_hash") {
                h.config_hash = std::stoull(value, nullptr, 16);
                have_hash = true;
            } else if (key == "seed") {
                h.seed = std::stoull(value);
                have_seed = true;
            }
        } catch (const std::exception &) {
            throw DataInconsistency("csv: malformed header field '" + field + "'");
        }
    }
    if (!have_hash || !have_seed || h.experiment.empty()) throw DataInconsistency("csv: incomplete header");
    return h;
}

bool csv_matches(const std::string &csv, const ExperimentConfig &config) {
    CsvHeader h = parse_csv_header(csv);
    return h.experiment == config.experiment && h.config_hash == config_hash(config) && h.seed == config.seed;
}

std::string summarize(const ResultSet &result) {
    std::size_t width = 8;
    for (const ResultRow &r : result.rows) {
        if (r.kind == "metric") width = std::max(width, r.name.size());
    }
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %14s   %-12s %10s\n", static_cast<int>(width), "quantity", "estimate",
                  "stderr", "n");
    out += buf;
    out += std::string(width + 41, '-') + "\n";
    for (const ResultRow &r : result.rows) {
        if (r.kind != "metric") continue;
        // Values below the printed precision show as 0 rather than -0.000000.
        auto shown = [](double v) { return std::abs(v) < 5e-7 ? 0.0 : v; };
        std::snprintf(buf, sizeof buf, "%-*s %14.6f ± %-12.6f %10ld\n", static_cast<int>(width), r.name.c_str(),
                      shown(r.value), shown(r.stderr_), r.n);
        out += buf;
    }
    return out;
}

}  // namespace mixedion
