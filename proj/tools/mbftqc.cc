// Copyright 2026 The mbftqc Authors
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


// Command-line driver: benchmarks, sweeps, fits, resource estimates and circuit dumps.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbftqc/mbftqc.h"

#ifndef MBFTQC_GIT_REVISION
#define MBFTQC_GIT_REVISION "unknown"
#endif

using namespace mbftqc;
using nlohmann::ordered_json;

namespace {

constexpr const char *TOOL_VERSION = "0.1.0";

std::string g_command_line;

struct Common {
    uint64_t seed = 1;
    unsigned workers = 0;
    std::string readout = "flip";
    std::string ancilla = "model";
    std::string out;
    std::string steps_out;
    std::string manifest;
    double target_ci = 0;

    RunOptions options() const {
        RunOptions o;
        o.seed = seed;
        o.workers = workers ? workers : default_workers();
        o.readout = readout_from_name(readout);
        o.mode = ancilla_mode_from_name(ancilla);
        o.target_rel_ci = target_ci;
        return o;
    }
};

struct Job {
    std::string experiment = "gate-bench";
    std::string code = "steane";
    std::string gate = "h";
    std::vector<double> p = {1e-3};
    int r = 1;
    uint64_t shots = 1'000'000;
    uint64_t tele_shots = 0;
    uint32_t q_max = 12;
    bool fit = false;
    std::optional<double> fixed_alpha;
    uint64_t min_events = 100;
};

uint64_t fnv1a(const std::string &s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << v;
    return out.str();
}

/// Output sink: a file when a path is given, else stdout.
class Sink {
   public:
    explicit Sink(const std::string &path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw ConfigError("cannot open '" + path + "' for writing");
            }
        }
    }
    std::ostream &get() {
        return file_ ? *file_ : std::cout;
    }

   private:
    std::unique_ptr<std::ofstream> file_;
};

void write_manifest(const Common &c, const std::string &command, ordered_json config,
                    const std::vector<BenchmarkResult> &rows) {
    std::string path = c.manifest;
    if (path.empty() && !c.out.empty()) {
        path = c.out + ".manifest.json";
    }
    if (path.empty()) {
        return;
    }
    auto opt = c.options();
    config["seed"] = c.seed;
    config["readout"] = readout_name(opt.readout);
    config["ancilla"] = ancilla_mode_name(opt.mode);
    config["target_ci"] = c.target_ci;
    ordered_json m;
    m["tool"] = "mbftqc";
    m["version"] = TOOL_VERSION;
    m["git_revision"] = MBFTQC_GIT_REVISION;
    m["command"] = command;
    m["argv"] = g_command_line;
    m["config"] = config;
    m["config_hash"] = hex64(fnv1a(config.dump()));
    m["workers"] = opt.workers;
    m["outputs"] = {{"csv", c.out}, {"steps_csv", c.steps_out}};
    ordered_json cells = ordered_json::array();
    for (const auto &r : rows) {
        cells.push_back({{"experiment", r.experiment},
                         {"code", r.code},
                         {"gate", r.gate},
                         {"p", r.p},
                         {"r", r.r},
                         {"seed", r.seed},
                         {"n_shots", r.n_shots}});
    }
    m["cells"] = cells;
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    f << m.dump(2) << "\n";
}

void emit(const Common &c, const std::string &command, const ordered_json &config,
          const std::vector<BenchmarkResult> &rows, const std::vector<std::pair<Job, PowerLawFit>> &fits = {}) {
    {
        Sink sink(c.out);
        auto &out = sink.get();
        out << CSV_HEADER << "\n";
        for (const auto &r : rows) {
            write_csv_row(out, r);
        }
        for (const auto &[job, fit] : fits) {
            write_fit_row(out, job.code, job.gate, job.experiment == "distill" ? job.r : 0, fit);
        }
    }
    if (!c.steps_out.empty()) {
        Sink sink(c.steps_out);
        sink.get() << STEPS_CSV_HEADER << "\n";
        for (const auto &r : rows) {
            write_steps_rows(sink.get(), r);
        }
    }
    write_manifest(c, command, config, rows);
}

ordered_json job_config(const Job &j) {
    ordered_json o;
    o["experiment"] = j.experiment;
    o["code"] = j.code;
    o["gate"] = j.gate;
    o["p"] = j.p;
    o["r"] = j.r;
    o["shots"] = j.shots;
    o["tele_shots"] = j.tele_shots;
    o["q_max"] = j.q_max;
    if (j.fit) {
        o["fit"] = true;
        o["min_events"] = j.min_events;
        if (j.fixed_alpha) {
            o["fixed_alpha"] = *j.fixed_alpha;
        }
    }
    return o;
}

/// Runs one cell of a job at physical error rate p. Cells use seed + index so sweeps stay independent.
BenchmarkResult run_cell(const Job &j, double p, const RunOptions &opt) {
    if (j.experiment == "prep") {
        return prep_benchmark(purification_zero(code_by_name(j.code), opt.noise(p)), j.shots, opt.seed, opt.workers,
                              opt.target_rel_ci);
    }
    if (j.experiment == "gate-bench") {
        return repeated_gate_benchmark(bench_gate_from_name(j.gate), code_by_name(j.code), p, j.q_max, j.shots, opt);
    }
    if (j.experiment == "distill") {
        if (j.code != "golay") {
            throw ConfigError("distillation runs on the golay code");
        }
        auto b = prep_benchmark(distillation(j.r, opt.noise(p), opt.mode), j.shots, opt.seed, opt.workers,
                                opt.target_rel_ci);
        b.experiment = "distill";
        b.gate = "S_distill";
        b.r = j.r;
        return b;
    }
    throw ConfigError("unknown experiment '" + j.experiment + "' (expected prep, gate-bench or distill)");
}

std::vector<BenchmarkResult> run_job(const Job &j, const Common &c) {
    std::vector<BenchmarkResult> rows;
    auto opt = c.options();
    for (size_t i = 0; i < j.p.size(); i++) {
        RunOptions o = opt;
        o.seed = opt.seed + i;
        rows.push_back(run_cell(j, j.p[i], o));
    }
    return rows;
}

PowerLawFit fit_rows(const std::vector<BenchmarkResult> &rows, const Job &j) {
    std::vector<FitPoint> pts;
    for (const auto &r : rows) {
        pts.push_back(fit_point(r));
    }
    return fit_power_law(pts, j.fixed_alpha, j.min_events);
}

void print_fit(const PowerLawFit &f) {
    std::cerr << "fit: p_L = " << f.C << " p^" << f.alpha;
    if (!f.alpha_fixed) {
        std::cerr << " (alpha 95% half-width " << f.alpha_half_width() << ")";
    }
    std::cerr << ", " << f.n_points << " points in [" << f.p_min << ", " << f.p_max << "]\n";
}

// ---------------------------------------------------------------------------
// fit: reads rows of a results CSV.

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) {
        out.push_back(cur);
    }
    if (!line.empty() && line.back() == ',') {
        out.push_back("");
    }
    return out;
}

/// Points from a results CSV. The CSV has no at-risk counts, so sigma comes from the Wilson
/// interval and the event count is estimated as p_L * accepted.
std::vector<FitPoint> read_points(const std::string &path, const Job &j) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read '" + path + "'");
    }
    std::string line;
    std::getline(in, line);
    auto header = split(line);
    auto col = [&](const std::string &name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ConfigError("CSV has no column '" + name + "'");
        }
        return static_cast<size_t>(it - header.begin());
    };
    size_t c_exp = col("experiment"), c_code = col("code"), c_gate = col("gate"), c_p = col("p"), c_r = col("r"),
           c_acc = col("accepted"), c_pl = col("p_L"), c_lo = col("ci_lo"), c_hi = col("ci_hi");
    std::vector<FitPoint> pts;
    while (std::getline(in, line)) {
        auto f = split(line);
        if (f.size() != header.size() || f[c_exp] == "fit" || f[c_code] != j.code || f[c_gate] != j.gate) {
            continue;
        }
        if (j.experiment == "distill" && f[c_r] != std::to_string(j.r)) {
            continue;
        }
        FitPoint pt;
        pt.p = std::stod(f[c_p]);
        pt.p_L = std::stod(f[c_pl]);
        pt.sigma = (std::stod(f[c_hi]) - std::stod(f[c_lo])) / (2 * 1.959963984540054);
        pt.events = static_cast<uint64_t>(std::llround(pt.p_L * std::stod(f[c_acc])));
        pts.push_back(pt);
    }
    return pts;
}

// ---------------------------------------------------------------------------
// estimate.

struct EstimateArgs {
    bool reference_rates = false;
    bool json = false;
    std::optional<double> p_h, p_cz, p_rz, p_t;
};

ordered_json estimate_json(const ResourceEstimate &e) {
    ordered_json o;
    o["m"] = e.m;
    o["m_raw"] = e.m_raw;
    o["eta"] = e.eta;
    o["n_physical"] = e.n_physical;
    if (e.delta > 0) {
        o["delta"] = e.delta;
        o["n_t"] = e.n_t;
    }
    return o;
}

int run_estimate(const EstimateArgs &a) {
    GateErrorRates steane{6.23e-6, 2.80e-5, 2.05e-5};
    double p_t = 4.76e-10;
    if (!a.reference_rates && !a.p_h && !a.p_cz && !a.p_rz && !a.p_t) {
        throw ConfigError("estimate needs --reference-rates or explicit rates");
    }
    steane.p_H = a.p_h.value_or(steane.p_H);
    steane.p_CZ = a.p_cz.value_or(steane.p_CZ);
    steane.p_nonclifford = a.p_rz.value_or(steane.p_nonclifford);
    p_t = a.p_t.value_or(p_t);
    auto s = qv_steane(steane);
    auto g = qv_golay(p_t);
    auto rz = rz_equivalent_t_count(steane.p_nonclifford);
    std::vector<WorkloadReport> loads = {workload("femoco54_qpe", 1137, 1.3e9, p_t),
                                         workload("rsa2048", 1399, 2.8e9, p_t)};
    if (a.json) {
        ordered_json o;
        o["steane"] = estimate_json(s);
        o["steane"]["rates"] = {{"p_H", steane.p_H}, {"p_CZ", steane.p_CZ}, {"p_RZ", steane.p_nonclifford}};
        o["steane"]["rz_equivalent"] = {{"t_per_rotation", rz.t_per_rotation},
                                        {"rotations", rz.rotations},
                                        {"t_equivalents", rz.t_equivalents}};
        o["golay"] = estimate_json(g);
        o["golay"]["p_T"] = p_t;
        o["golay"]["qv100_physical_qubits"] = golay_physical_qubits(100);
        ordered_json w = ordered_json::array();
        for (const auto &l : loads) {
            w.push_back({{"name", l.name},
                         {"logical_qubits", l.logical_qubits},
                         {"t_count", l.t_count},
                         {"physical_qubits", l.n_physical},
                         {"total_error", l.total_error},
                         {"headroom", l.headroom},
                         {"feasible", l.feasible}});
        }
        o["workloads"] = w;
        std::cout << o.dump(2) << "\n";
        return 0;
    }
    std::printf("steane  p_H=%.3g p_CZ=%.3g p_RZ=%.3g  m=%lld (raw %.2f)  eta=%d  physical=%lld\n", steane.p_H,
                steane.p_CZ, steane.p_nonclifford, static_cast<long long>(s.m), s.m_raw, s.eta,
                static_cast<long long>(s.n_physical));
    std::printf("        R_Z ~ %lld T gates; %.3g rotations ~ %.3g T-equivalents\n",
                static_cast<long long>(rz.t_per_rotation), rz.rotations, rz.t_equivalents);
    std::printf("golay   p_T=%.3g  delta=%.4g  N=%lld  m=%lld (raw %.2f)  eta=%d  physical=%lld  (m=100: %lld)\n", p_t,
                g.delta, static_cast<long long>(g.n_t), static_cast<long long>(g.m), g.m_raw, g.eta,
                static_cast<long long>(g.n_physical), static_cast<long long>(golay_physical_qubits(100)));
    for (const auto &l : loads) {
        std::printf("%-13s logical=%lld  T=%.3g  physical=%lld  total error=%.3f  headroom=%.3f  %s\n", l.name.c_str(),
                    static_cast<long long>(l.logical_qubits), l.t_count, static_cast<long long>(l.n_physical),
                    l.total_error, l.headroom, l.feasible ? "feasible" : "NOT feasible");
    }
    return 0;
}

void add_common(CLI::App *sub, Common &c) {
    sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    sub->add_option("--workers", c.workers, "Worker threads (default: MBFTQC_WORKERS or all cores)");
    sub->add_option("--readout", c.readout, "Readout noise: flip or depolarize")
        ->check(CLI::IsMember({"flip", "depolarize"}))
        ->capture_default_str();
    sub->add_option("--ancilla", c.ancilla, "Ancilla preparation: model or explicit")
        ->check(CLI::IsMember({"model", "explicit"}))
        ->capture_default_str();
    sub->add_option("--target-ci", c.target_ci,
                    "Stop early once the 95% Wilson half-width is below this fraction of p_L (shots become a cap)");
    sub->add_option("-o,--out", c.out, "Results CSV (default stdout)");
    sub->add_option("--steps-out", c.steps_out, "Per-step p(Q) CSV");
    sub->add_option("--manifest", c.manifest, "Run manifest JSON (default <out>.manifest.json)");
}

CLI::Option *add_job(CLI::App *sub, Job &j, bool with_p_list) {
    auto *code = sub->add_option("--code", j.code, "steane or golay (distillation: golay)")
                     ->check(CLI::IsMember({"steane", "golay"}));
    if (with_p_list) {
        sub->add_option("--p", j.p, "Physical error rates (comma separated)")->delimiter(',')->capture_default_str();
    } else {
        sub->add_option("--p", j.p, "Physical error rate")->expected(1)->capture_default_str();
    }
    sub->add_option("--shots", j.shots, "Shots per cell")->capture_default_str();
    sub->add_option("--q-max", j.q_max, "Repeated-gate steps")->check(CLI::Range(1u, 64u))->capture_default_str();
    return code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"mbftqc: Monte Carlo benchmarks for measurement-based fault-tolerant gadgets"};
    app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    for (int i = 0; i < argc; i++) {
        g_command_line += (i ? " " : "") + std::string(argv[i]);
    }

    Common common;
    Job job;

    auto *prep = app.add_subcommand("prep", "Purified |0>_L: logical error and discard rate");
    add_common(prep, common);
    add_job(prep, job, true);

    auto *bench = app.add_subcommand("gate-bench", "Repeated logical gate benchmark, p(Q) and p_L");
    add_common(bench, common);
    add_job(bench, job, true);
    bench->add_option("--gate", job.gate, "h, cz, rz_tele or t_tele")->capture_default_str();

    uint64_t rot_shots = 1'000'000;
    auto *rz = app.add_subcommand("rz-budget", "Analog R_Z error budget (steane): p_rot, p_tele, p_RZ");
    add_common(rz, common);
    add_job(rz, job, false);
    rz->add_option("--rot-shots", rot_shots, "Shots for the rotated-ancilla preparation")->capture_default_str();

    auto *distill = app.add_subcommand("distill", "S-state distillation (golay) and optional T teleportation");
    add_common(distill, common);
    auto *distill_code = add_job(distill, job, true);
    distill->add_option("--r", job.r, "Hadamard-test rounds")->check(CLI::Range(1, 3))->capture_default_str();
    distill->add_option("--tele-shots", job.tele_shots, "Shots for the T-teleportation benchmark (0: skip)");

    auto *sweep = app.add_subcommand("sweep", "Run one experiment over a list of p, optionally fit C p^alpha");
    add_common(sweep, common);
    auto *sweep_code = add_job(sweep, job, true);
    sweep->add_option("--experiment", job.experiment, "prep, gate-bench or distill")
        ->check(CLI::IsMember({"prep", "gate-bench", "distill"}))
        ->capture_default_str();
    sweep->add_option("--gate", job.gate, "Gate for gate-bench")->capture_default_str();
    sweep->add_option("--r", job.r, "Rounds for distill")->check(CLI::Range(1, 3));
    sweep->add_flag("--fit", job.fit, "Append a fit row");

    std::string fit_in;
    auto *fit = app.add_subcommand("fit", "Fit C p^alpha to rows of a results CSV");
    fit->add_option("--in", fit_in, "Results CSV")->required();
    fit->add_option("--experiment", job.experiment, "Experiment of the rows (distill filters on --r)");
    fit->add_option("--code", job.code, "Code column to select")->capture_default_str();
    fit->add_option("--gate", job.gate, "Gate column to select")->capture_default_str();
    fit->add_option("--r", job.r, "Rounds column to select (distill)");
    for (auto *sub : {sweep, fit}) {
        sub->add_option("--fixed-alpha", job.fixed_alpha, "Pin the exponent");
        sub->add_option("--min-events", job.min_events, "Ignore points with fewer failures")->capture_default_str();
    }

    EstimateArgs est;
    auto *estimate = app.add_subcommand("estimate", "Quantum-volume and workload resource estimates");
    estimate->add_flag("--reference-rates", est.reference_rates, "Use the p = 1e-4 logical error rates");
    estimate->add_flag("--json", est.json, "Machine-readable output");
    estimate->add_option("--p-h", est.p_h, "Steane logical H error");
    estimate->add_option("--p-cz", est.p_cz, "Steane logical CZ error");
    estimate->add_option("--p-rz", est.p_rz, "Steane logical R_Z error");
    estimate->add_option("--p-t", est.p_t, "Golay logical T error");

    auto *circuit = app.add_subcommand("circuit", "Circuit utilities");
    circuit->require_subcommand(1);
    auto *dump = circuit->add_subcommand("dump", "Print a gadget circuit in text form");
    std::string gadget = "lobt_h";
    GadgetRequest req;
    req.p = 1e-3;
    req.readout = Readout::FLIP;
    std::string dump_readout = "flip", dump_ancilla = "model";
    bool stats = false;
    dump->add_option("--gadget", gadget, "Registered gadget name")->capture_default_str();
    dump->add_option("--code", req.code, "steane or golay")->capture_default_str();
    dump->add_option("--p", req.p, "Physical error rate")->capture_default_str();
    dump->add_option("--r", req.r, "Distillation rounds")->capture_default_str();
    dump->add_option("--q-max", req.q_max, "Repeated-gate steps")->capture_default_str();
    dump->add_option("--readout", dump_readout, "flip or depolarize")->capture_default_str();
    dump->add_option("--ancilla", dump_ancilla, "model or explicit")->capture_default_str();
    dump->add_flag("--stats", stats, "Print sizes instead of the circuit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        // Help and version requests exit 0; any bad flag or config key is a configuration error.
        return app.exit(e) == 0 ? 0 : 2;
    }

    // Distillation only exists on the golay code, so it is the default there.
    if ((distill->parsed() && distill_code->count() == 0) ||
        (sweep->parsed() && job.experiment == "distill" && sweep_code->count() == 0)) {
        job.code = "golay";
    }

    try {
        if (prep->parsed()) {
            job.experiment = "prep";
            emit(common, "prep", job_config(job), run_job(job, common));
        } else if (bench->parsed()) {
            job.experiment = "gate-bench";
            emit(common, "gate-bench", job_config(job), run_job(job, common));
        } else if (rz->parsed()) {
            if (job.code != "steane") {
                throw ConfigError("rz-budget runs on the steane code");
            }
            auto b = rz_budget(job.p.at(0), rot_shots, job.shots, job.q_max, common.options());
            std::cerr << "p_rot=" << b.p_rot << " p_tele=" << b.p_tele << " p_RZ=" << b.p_RZ << "\n";
            auto cfg = job_config(job);
            cfg["rot_shots"] = rot_shots;
            emit(common, "rz-budget", cfg, {b.rot, b.tele});
        } else if (distill->parsed()) {
            if (job.code != "golay") {
                throw ConfigError("distillation runs on the golay code");
            }
            std::vector<BenchmarkResult> rows;
            for (size_t i = 0; i < job.p.size(); i++) {
                auto opt = common.options();
                opt.seed += 2 * i;
                auto b = distill_budget(job.p[i], job.r, job.shots, job.tele_shots, job.q_max, opt);
                std::cerr << "p=" << b.p << " r=" << b.r << " p_S=" << b.p_S << " success=" << b.success;
                if (job.tele_shots) {
                    std::cerr << " p_tele=" << b.p_tele << " p_T=" << b.p_T;
                }
                std::cerr << "\n";
                b.distill.gate = "S_distill";
                rows.push_back(b.distill);
                if (job.tele_shots) {
                    rows.push_back(b.tele);
                }
            }
            emit(common, "distill", job_config(job), rows);
        } else if (sweep->parsed()) {
            auto rows = run_job(job, common);
            std::vector<std::pair<Job, PowerLawFit>> fits;
            if (job.fit) {
                auto f = fit_rows(rows, job);
                print_fit(f);
                if (job.experiment == "distill") {
                    job.gate = "S_distill";
                }
                fits.push_back({job, f});
            }
            emit(common, "sweep", job_config(job), rows, fits);
        } else if (fit->parsed()) {
            if (job.experiment == "distill" && job.gate == "h") {
                job.gate = "S_distill";
            }
            auto f = fit_power_law(read_points(fit_in, job), job.fixed_alpha, job.min_events);
            print_fit(f);
            std::cout << CSV_HEADER << "\n";
            write_fit_row(std::cout, job.code, job.gate, job.experiment == "distill" ? job.r : 0, f);
        } else if (estimate->parsed()) {
            return run_estimate(est);
        } else if (dump->parsed()) {
            req.readout = readout_from_name(dump_readout);
            req.mode = ancilla_mode_from_name(dump_ancilla);
            auto it = gadget_registry().find(gadget);
            if (it == gadget_registry().end()) {
                std::string names;
                for (const auto &[name, fn] : gadget_registry()) {
                    names += " " + name;
                }
                throw ConfigError("unknown gadget '" + gadget + "'; registered:" + names);
            }
            auto g = it->second(req);
            if (stats) {
                auto s = compile(g.circuit);
                std::cout << "gadget " << g.name << "\nqubits " << g.circuit.n_qubits << "\nops " << g.circuit.ops.size()
                          << "\nmeasurements " << g.circuit.num_slots() << "\ndetectors " << g.circuit.detectors.size()
                          << "\npostselect " << g.postselect_detectors.size() << "\nchecks "
                          << g.validation_observables.size() << "\nnoise_sites " << s.error_sites.size() << "\n";
            } else {
                std::cout << g.circuit.str();
            }
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedError &e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 2;
    } catch (const NumericError &e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
