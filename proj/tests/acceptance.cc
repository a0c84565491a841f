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


// Acceptance checks. Each criterion prints one PASS/FAIL line followed by indented detail lines.
// Usage: acceptance [--criterion N]... [--out DIR] [--workers K] [--long]

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fault_oracle.h"
#include "mbftqc/mbftqc.h"

using namespace mbftqc;

namespace {

// ---------------------------------------------------------------------------
// Pinned reference values and tolerances.

constexpr uint64_t SEED = 20260101;

// Criterion 4.
constexpr double C4_P = 1e-3;
constexpr uint64_t C4_SHOTS = 10'000'000;
constexpr double C4_SIGMAS = 3;

// Criterion 5: reference rates at p = 1e-3.
constexpr double C5_P = 1e-3;
constexpr double C5_REL_TOL = 0.15;
constexpr double C5_SIGMAS = 3;
constexpr double C5_STEANE_H = 5.88e-4;
constexpr double C5_STEANE_CZ = 2.59e-3;
constexpr double C5_STEANE_RZ = 8.85e-4;
constexpr double C5_GOLAY_H = 1.33e-5;
constexpr double C5_GOLAY_CZ = 9.41e-5;
constexpr double C5_GOLAY_T = 4.98e-6;
constexpr uint64_t C5_SHOTS = 10'000'000;
constexpr uint64_t C5_GOLAY_H_SHOTS = 100'000'000;
constexpr uint64_t C5_GOLAY_T_SHOTS = 10'000'000'000;

// Criterion 6.
constexpr double C6_STEANE_ALPHA = 2, C6_STEANE_TOL = 0.3;
constexpr double C6_GOLAY_ALPHA = 4, C6_GOLAY_TOL = 0.5;
constexpr double C6_DISTILL_TOL = 0.5;
constexpr uint64_t C6_MIN_EVENTS = 100;
constexpr double C6_TARGET_REL_CI = 0.18;  // about 120 events
constexpr uint64_t C6_SHOT_CAP = 300'000'000;
const std::vector<double> C6_STEANE_GRID = {1e-3, 3e-3, 1e-2};
const std::vector<double> C6_GOLAY_GRID = {3e-3, 1e-2, 3e-2};
const std::vector<double> C6_DISTILL_GRID = {3e-3, 5e-3, 1e-2, 2e-2, 3e-2};
// Extrapolation of p_T to p = 1e-4 with the exponent pinned at 4.
constexpr double C6_PT_REFERENCE = 4.76e-10;
constexpr double C6_PT_EXTRAPOLATE_TO = 1e-4;
const std::vector<double> C6_TTELE_GRID = {1e-3, 1.5e-3, 2e-3};
constexpr uint64_t C6_TTELE_SHOTS = 100'000'000;
constexpr double C6_PT_SIGMAS = 3;

// Criterion 7: discard-rate ceilings.
constexpr uint64_t C7_SHOTS = 1'000'000;

// Criterion 8.
constexpr double C8_P = 1e-4;
constexpr double C8_P_ROT = 6.67e-6, C8_P_ROT_TOL = 0.10;
constexpr double C8_P_TELE = 3.59e-6, C8_P_TELE_TOL = 0.20;
constexpr double C8_P_RZ = 2.05e-5, C8_P_RZ_TOL = 0.10;
constexpr uint64_t C8_ROT_SHOTS = 100'000'000;
constexpr uint64_t C8_TELE_SHOTS = 100'000'000;
constexpr double C8_SIGMAS = 3;

// Criterion 9.
constexpr double C9_DELTA = 3.53e-8, C9_DELTA_TOL = 0.01;

// Criterion 10.
constexpr uint64_t C10_ZERO_SHOTS = 100'000;
constexpr uint64_t C10_PATTERN_SHOTS = 10'000'000;
constexpr double C10_Z95 = 1.6448536269514722;  // one-sided 95%
constexpr double C10_CHI2_95_2DOF = 5.991464547107979;

// ---------------------------------------------------------------------------

struct Context {
    unsigned workers = 1;
    std::filesystem::path out;
    bool long_runs = false;
};

class Report {
   public:
    void line(const std::string &s) {
        lines_.push_back(s);
    }
    bool check(bool ok, const std::string &s) {
        line(std::string(ok ? "[ok]   " : "[FAIL] ") + s);
        all_ &= ok;
        return ok;
    }
    bool passed() const {
        return all_;
    }
    const std::vector<std::string> &lines() const {
        return lines_;
    }

   private:
    std::vector<std::string> lines_;
    bool all_ = true;
};

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

RunOptions flip_options(const Context &ctx, uint64_t seed = SEED) {
    RunOptions o;
    o.seed = seed;
    o.workers = ctx.workers;
    o.readout = Readout::FLIP;
    return o;
}

bool within(double got, double want, double sigma, double rel_tol, double sigmas) {
    return std::abs(got - want) <= std::max(sigmas * sigma, rel_tol * want);
}

std::string describe(const BenchmarkResult &r) {
    return fmt("p_L=%.4g (Q*=%u, %llu events, sigma %.2g) shots=%llu discard=%.4g", r.p_L, r.q_star,
               static_cast<unsigned long long>(r.failures), r.sigma(), static_cast<unsigned long long>(r.n_shots),
               r.discard_rate);
}

void write_rows(const Context &ctx, const std::string &file, const std::vector<BenchmarkResult> &rows,
                const std::vector<std::tuple<std::string, std::string, int, PowerLawFit>> &fits = {}) {
    if (ctx.out.empty()) {
        return;
    }
    std::filesystem::create_directories(ctx.out);
    std::ofstream csv(ctx.out / (file + ".csv"));
    csv << CSV_HEADER << "\n";
    for (const auto &r : rows) {
        write_csv_row(csv, r);
    }
    for (const auto &[code, gate, r, fit] : fits) {
        write_fit_row(csv, code, gate, r, fit);
    }
    std::ofstream steps(ctx.out / (file + "_steps.csv"));
    steps << STEPS_CSV_HEADER << "\n";
    for (const auto &r : rows) {
        write_steps_rows(steps, r);
    }
}

// ---------------------------------------------------------------------------
// 1. Decoder exactness.

bool criterion_1(const Context &, Report &rep) {
    for (const auto &code : {steane_code(), golay_code()}) {
        auto table = default_lookup(code);
        size_t want_size = size_t{1} << code.num_checks();
        rep.check(table->size() == want_size,
                  fmt("%s lookup has %zu entries (want %zu)", code.name.c_str(), table->size(), want_size));
        // Noiseless outcomes of |0>_L and |1>_L are stabilizer codewords, optionally times logical X.
        std::vector<uint64_t> words{0};
        for (auto row : code.h_z) {
            size_t k = words.size();
            for (size_t i = 0; i < k; i++) {
                words.push_back(words[i] ^ row);
            }
        }
        size_t t = (code.d - 1) / 2;
        std::vector<uint64_t> errors;
        for (uint64_t e = 0; e < (uint64_t{1} << code.n); e++) {
            if (static_cast<size_t>(std::popcount(e)) <= t) {
                errors.push_back(e);
            }
        }
        uint64_t checked = 0, wrong = 0;
        for (auto basis : {Basis::Z, Basis::X}) {
            for (int logical = 0; logical < 2; logical++) {
                uint64_t flip = logical ? (basis == Basis::Z ? code.logical_x_support : code.logical_z_support) : 0;
                for (auto w : words) {
                    for (auto e : errors) {
                        auto v = corrected_logical(code, *table, w ^ flip ^ e, basis);
                        checked++;
                        wrong += !v || *v != static_cast<bool>(logical);
                    }
                }
            }
        }
        rep.check(wrong == 0, fmt("%s: %zu errors of weight <= %zu, %llu decodes, %llu wrong", code.name.c_str(),
                                  errors.size(), t, static_cast<unsigned long long>(checked),
                                  static_cast<unsigned long long>(wrong)));
    }
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 2. Frame sampler against the tableau oracle, exhaustive over fault pairs.

bool criterion_2(const Context &, Report &rep) {
    std::vector<std::pair<std::string, GadgetCircuit>> circuits;
    circuits.push_back({"steane purification", purification_zero(steane_code(), NoisePolicy::uniform(1e-3))});
    circuits.push_back({"steane lobt_h (transversal model)",
                        lobt_h(steane_code(), AncillaMode::TRANSVERSAL_MODEL, NoisePolicy::uniform(1e-3))});
    circuits.push_back({"steane lobt_h (explicit purification)",
                        lobt_h(steane_code(), AncillaMode::EXPLICIT_PURIFICATION, NoisePolicy::uniform(1e-3))});
    for (const auto &[label, g] : circuits) {
        auto s = compile(g.circuit);
        oracle::TableauGadgetOracle tab(g);
        auto singles = oracle::all_single_faults(s);
        uint64_t sets = 0, mismatched = 0;
        FrameBlock st;
        st.resize(s);
        std::vector<Injection> inj;
        auto compare = [&](const std::vector<std::vector<Fault>> &batch) {
            for (size_t start = 0; start < batch.size(); start += SHOTS_PER_BLOCK) {
                size_t end = std::min(batch.size(), start + SHOTS_PER_BLOCK);
                std::vector<std::vector<Fault>> part(batch.begin() + start, batch.begin() + end);
                auto outcomes = evaluate_fault_sets(g, s, part);
                inj.clear();
                for (size_t i = 0; i < part.size(); i++) {
                    add_fault_injections(s, part[i], static_cast<uint32_t>(i), inj);
                }
                sort_injections(inj);
                simulate_block_injected(s, st, inj);
                auto flips = block_detector_flips(s, st);
                for (size_t i = 0; i < part.size(); i++) {
                    auto want = tab.replay(part[i]);
                    bool same = outcomes[i] == want.outcome;
                    for (size_t d = 0; d < want.detector_flips.size(); d++) {
                        bool got = (flips[d * BLOCK_WORDS + i / 64] >> (i % 64)) & 1;
                        same &= got == static_cast<bool>(want.detector_flips[d]);
                    }
                    sets++;
                    mismatched += !same;
                }
            }
        };
        std::vector<std::vector<Fault>> single_sets{{}};
        for (const auto &f : singles) {
            single_sets.push_back({f});
        }
        compare(single_sets);
        oracle::for_each_fault_pair(singles, 16 * SHOTS_PER_BLOCK, compare);
        rep.check(mismatched == 0,
                  fmt("%s: %zu sites, %zu single faults, %llu fault sets (weight <= 2), %llu mismatches", label.c_str(),
                      s.error_sites.size(), singles.size(), static_cast<unsigned long long>(sets),
                      static_cast<unsigned long long>(mismatched)));
    }
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 3. The R_ZZ site: ZZ is the only undetected fault.

bool criterion_3(const Context &, Report &rep) {
    auto g = analog_ancilla_prep(true, NoisePolicy::uniform(1e-3));
    auto s = compile(g.circuit);
    size_t site = g.named_sites.at("rot.rzz");
    auto faults = site_faults(s, site);
    std::vector<std::vector<Fault>> sets;
    for (const auto &f : faults) {
        sets.push_back({f});
    }
    auto out = evaluate_fault_sets(g, s, sets);
    oracle::TableauGadgetOracle tab(g);
    size_t detected = 0, silent_flip = 0, other = 0;
    std::string survivors;
    for (size_t k = 0; k < faults.size(); k++) {
        if (!(out[k] == tab.evaluate(sets[k]))) {
            other++;
        }
        if (!out[k].accepted) {
            detected++;
        } else if (out[k].failed) {
            silent_flip++;
            survivors += std::string(1, faults[k].p0) + faults[k].p1 + " ";
        } else {
            other++;
        }
    }
    bool zz_only = silent_flip == 1 && survivors == "ZZ ";
    rep.check(faults.size() == 15 && detected == 14 && zz_only && other == 0,
              fmt("%zu two-qubit Paulis at rot.rzz: %zu detected, accepted-and-flipping: %s(oracle disagreements or "
                  "silent non-flips: %zu)",
                  faults.size(), detected, survivors.c_str(), other));
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 4. Per-qubit Pauli frequencies of accepted purified |0>_L.

bool criterion_4(const Context &ctx, Report &rep) {
    for (const auto &code : {steane_code(), golay_code()}) {
        auto f = purified_zero_frequencies(code, C4_P, C4_SHOTS, flip_options(ctx));
        double trials = static_cast<double>(f.accepted) * static_cast<double>(f.n);
        const std::pair<const char *, std::pair<uint64_t, double>> rows[] = {
            {"X", {f.x, 6 * C4_P / 15}}, {"Y", {f.y, 2 * C4_P / 15}}, {"Z", {f.z, 2 * C4_P / 15}}};
        for (const auto &[name, cv] : rows) {
            double rate = f.rate(cv.first);
            double sigma = std::sqrt(cv.second * (1 - cv.second) / trials);
            rep.check(std::abs(rate - cv.second) <= C4_SIGMAS * sigma,
                      fmt("%s %s: %.4e per qubit (model %.4e, %.2f sigma; %llu accepted of %llu)", code.name.c_str(),
                          name, rate, cv.second, (rate - cv.second) / sigma,
                          static_cast<unsigned long long>(f.accepted), static_cast<unsigned long long>(f.shots)));
        }
    }
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 5. Gate error rates at p = 1e-3.

bool criterion_5(const Context &ctx, Report &rep) {
    auto opt = flip_options(ctx);
    std::vector<BenchmarkResult> rows;
    auto gate = [&](const char *label, BenchGate g, const CssCode &code, uint64_t shots, double want) {
        auto r = repeated_gate_benchmark(g, code, C5_P, 12, shots, opt);
        rows.push_back(r);
        rep.check(within(r.p_L, want, r.sigma(), C5_REL_TOL, C5_SIGMAS),
                  fmt("%s: %s; reference %.3g (%+.1f%%)", label, describe(r).c_str(), want,
                      100 * (r.p_L / want - 1)));
    };
    gate("steane H", BenchGate::H, steane_code(), C5_SHOTS, C5_STEANE_H);
    gate("steane CZ", BenchGate::CZ, steane_code(), C5_SHOTS, C5_STEANE_CZ);
    auto b = rz_budget(C5_P, C5_SHOTS, C5_SHOTS, 12, opt);
    rows.push_back(b.rot);
    rows.push_back(b.tele);
    double sigma_rz = 2 * std::hypot(b.rot.sigma(), b.tele.sigma());
    rep.check(within(b.p_RZ, C5_STEANE_RZ, sigma_rz, C5_REL_TOL, C5_SIGMAS),
              fmt("steane R_Z = 2(p_rot + p_tele) = 2(%.4g + %.4g) = %.4g (sigma %.2g); reference %.3g (%+.1f%%)",
                  b.p_rot, b.p_tele, b.p_RZ, sigma_rz, C5_STEANE_RZ, 100 * (b.p_RZ / C5_STEANE_RZ - 1)));
    gate("golay H", BenchGate::H, golay_code(), C5_GOLAY_H_SHOTS, C5_GOLAY_H);
    gate("golay CZ", BenchGate::CZ, golay_code(), C5_SHOTS, C5_GOLAY_CZ);
    if (ctx.long_runs) {
        auto d = distill_budget(C5_P, 2, C5_GOLAY_T_SHOTS, C5_SHOTS, 12, opt);
        rows.push_back(d.distill);
        rows.push_back(d.tele);
        double sigma_t = std::hypot(2 * d.distill.sigma(), d.tele.sigma());
        rep.check(within(d.p_T, C5_GOLAY_T, sigma_t, C5_REL_TOL, C5_SIGMAS),
                  fmt("golay T (r=2) = 2 p_S + p_tele = 2(%.4g) + %.4g = %.4g; reference %.3g", d.p_S, d.p_tele,
                      d.p_T, C5_GOLAY_T));
    } else {
        rep.line("[skip] golay T (r=2): needs about 1e10 shots; run with --long");
    }
    write_rows(ctx, "criterion5", rows);
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 6. Scaling exponents.

struct Sweep {
    std::vector<BenchmarkResult> rows;
    std::optional<PowerLawFit> fit;
    std::string error;
};

Sweep sweep(const std::vector<double> &grid, std::optional<double> pinned,
            const std::function<BenchmarkResult(double)> &run) {
    Sweep s;
    std::vector<FitPoint> pts;
    for (double p : grid) {
        s.rows.push_back(run(p));
        pts.push_back(fit_point(s.rows.back()));
    }
    try {
        s.fit = fit_power_law(pts, pinned, C6_MIN_EVENTS);
    } catch (const NumericError &e) {
        s.error = e.what();
    }
    return s;
}

void describe_sweep(Report &rep, const Sweep &s) {
    for (const auto &r : s.rows) {
        rep.line(fmt("         p=%.3g: %s%s", r.p, describe(r).c_str(),
                     r.failures < C6_MIN_EVENTS ? " (below the event floor, not fitted)" : ""));
    }
}

bool check_alpha(Report &rep, const std::string &label, const Sweep &s, double want, double tol) {
    if (!s.fit) {
        rep.check(false, fmt("%s: no fit (%s); target alpha %.1f +- %.1f", label.c_str(), s.error.c_str(), want, tol));
        describe_sweep(rep, s);
        return false;
    }
    bool ok = rep.check(std::abs(s.fit->alpha - want) <= tol,
                        fmt("%s: alpha = %.3f +- %.3f (95%%), C = %.4g over %zu points in [%.3g, %.3g]; target %.1f +- "
                            "%.1f",
                            label.c_str(), s.fit->alpha, s.fit->alpha_half_width(), s.fit->C, s.fit->n_points,
                            s.fit->p_min, s.fit->p_max, want, tol));
    describe_sweep(rep, s);
    return ok;
}

bool criterion_6(const Context &ctx, Report &rep) {
    auto opt = flip_options(ctx);
    opt.target_rel_ci = C6_TARGET_REL_CI;
    std::vector<BenchmarkResult> rows;
    std::vector<std::tuple<std::string, std::string, int, PowerLawFit>> fits;
    auto record = [&](const Sweep &s, const std::string &code, const std::string &gate, int r) {
        rows.insert(rows.end(), s.rows.begin(), s.rows.end());
        if (s.fit) {
            fits.push_back({code, gate, r, *s.fit});
        }
    };
    struct Clifford {
        const char *code;
        BenchGate gate;
        const std::vector<double> *grid;
        double alpha, tol;
    };
    const Clifford cliffords[] = {
        {"steane", BenchGate::H, &C6_STEANE_GRID, C6_STEANE_ALPHA, C6_STEANE_TOL},
        {"steane", BenchGate::CZ, &C6_STEANE_GRID, C6_STEANE_ALPHA, C6_STEANE_TOL},
        {"golay", BenchGate::H, &C6_GOLAY_GRID, C6_GOLAY_ALPHA, C6_GOLAY_TOL},
        {"golay", BenchGate::CZ, &C6_GOLAY_GRID, C6_GOLAY_ALPHA, C6_GOLAY_TOL},
    };
    for (const auto &c : cliffords) {
        auto s = sweep(*c.grid, std::nullopt, [&](double p) {
            return repeated_gate_benchmark(c.gate, code_by_name(c.code), p, 12, C6_SHOT_CAP, opt);
        });
        check_alpha(rep, std::string(c.code) + " " + bench_gate_name(c.gate), s, c.alpha, c.tol);
        record(s, c.code, bench_gate_name(c.gate), 0);
    }
    for (int r : {1, 2}) {
        auto s = sweep(C6_DISTILL_GRID, std::nullopt, [&](double p) {
            auto b = prep_benchmark(distillation(r, opt.noise(p)), C6_SHOT_CAP, opt.seed, opt.workers,
                                    opt.target_rel_ci);
            b.experiment = "distill";
            b.r = r;
            return b;
        });
        check_alpha(rep, fmt("golay distillation r=%d", r), s, r + 1, C6_DISTILL_TOL);
        record(s, "golay", "S_distill", r);
    }
    // p_T at 1e-4: T-teleportation fit with the exponent pinned at 4. The S-state term of the
    // assembly is O(p^{r+1}) with r = 3, below the teleportation term by orders of magnitude at 1e-4.
    RunOptions tele_opt = flip_options(ctx, SEED + 1);
    auto tele = sweep(C6_TTELE_GRID, 4.0, [&](double p) {
        return repeated_gate_benchmark(BenchGate::T_TELE, golay_code(), p, 12, C6_TTELE_SHOTS, tele_opt);
    });
    record(tele, "golay", "T_tele", 0);
    if (tele.fit) {
        double pt = tele.fit->eval(C6_PT_EXTRAPOLATE_TO);
        double rel = tele.fit->relative_sigma(C6_PT_EXTRAPOLATE_TO);
        rep.check(std::abs(std::log(pt / C6_PT_REFERENCE)) <= C6_PT_SIGMAS * rel,
                  fmt("p_T(1e-4) ~ p_tele = %.4g p^4 -> %.4g (relative sigma %.3f); reference %.3g (%+.1f%%)",
                      tele.fit->C, pt, rel, C6_PT_REFERENCE, 100 * (pt / C6_PT_REFERENCE - 1)));
    } else {
        rep.check(false, "p_T extrapolation: no fit (" + tele.error + ")");
    }
    describe_sweep(rep, tele);
    write_rows(ctx, "criterion6", rows, fits);
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 7. Discard rates of purified |0>_L.

bool criterion_7(const Context &ctx, Report &rep) {
    struct Row {
        CssCode code;
        double p, ceiling;
    };
    const Row rows[] = {{steane_code(), 1e-3, 0.10}, {steane_code(), 1e-4, 0.01},
                        {golay_code(), 1e-3, 0.50}, {golay_code(), 1e-4, 0.05}};
    std::vector<BenchmarkResult> out;
    for (const auto &row : rows) {
        auto r = prep_benchmark(purification_zero(row.code, NoisePolicy::uniform(row.p, Readout::FLIP)), C7_SHOTS,
                                SEED, ctx.workers);
        out.push_back(r);
        rep.check(r.discard_rate < row.ceiling,
                  fmt("%s p=%.0e: discard %.4f (ceiling %.2f), p_L %.3g", row.code.name.c_str(), row.p,
                      r.discard_rate, row.ceiling, r.p_L));
    }
    write_rows(ctx, "criterion7", out);
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 8. R_Z budget at p = 1e-4.

bool criterion_8(const Context &ctx, Report &rep) {
    auto b = rz_budget(C8_P, C8_ROT_SHOTS, C8_TELE_SHOTS, 12, flip_options(ctx));
    rep.check(std::abs(b.p_rot - C8_P_ROT) <= C8_P_ROT_TOL * C8_P_ROT,
              fmt("p_rot = %.4g (sigma %.2g, %llu events); reference %.3g = p/15 (%+.1f%%, tolerance 10%%)", b.p_rot,
                  b.rot.sigma(), static_cast<unsigned long long>(b.rot.failures), C8_P_ROT,
                  100 * (b.p_rot / C8_P_ROT - 1)));
    rep.check(within(b.p_tele, C8_P_TELE, b.tele.sigma(), C8_P_TELE_TOL, C8_SIGMAS),
              fmt("p_tele = %.4g (sigma %.2g, %llu events); reference %.3g (%+.1f%%)", b.p_tele, b.tele.sigma(),
                  static_cast<unsigned long long>(b.tele.failures), C8_P_TELE, 100 * (b.p_tele / C8_P_TELE - 1)));
    rep.check(std::abs(b.p_RZ - C8_P_RZ) <= C8_P_RZ_TOL * C8_P_RZ,
              fmt("p_RZ = 2(p_rot + p_tele) = %.4g; reference %.3g (%+.1f%%)", b.p_RZ, C8_P_RZ,
                  100 * (b.p_RZ / C8_P_RZ - 1)));
    write_rows(ctx, "criterion8", {b.rot, b.tele});
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 9. Estimator golden numbers.

bool criterion_9(const Context &, Report &rep) {
    auto s = qv_steane({6.23e-6, 2.80e-5, 2.05e-5});
    rep.check(s.m == 64 && s.n_physical == 2240,
              fmt("steane: m = %lld (raw %.2f), %lld qubits; want 64, 2240", static_cast<long long>(s.m), s.m_raw,
                  static_cast<long long>(s.n_physical)));
    auto g = qv_golay(4.76e-10);
    rep.check(std::abs(g.delta / C9_DELTA - 1) <= C9_DELTA_TOL,
              fmt("golay: delta = %.4g; want %.3g within 1%%", g.delta, C9_DELTA));
    rep.check(g.n_t == 74, fmt("golay: N = %lld; want 74", static_cast<long long>(g.n_t)));
    rep.check(std::abs(g.m - 2844) <= 1 && g.n_physical == g.m * 117,
              fmt("golay: m = %lld (raw %.2f), %lld qubits; want 2844 +- 1 (332,748 qubits at m = 2844)",
                  static_cast<long long>(g.m), g.m_raw, static_cast<long long>(g.n_physical)));
    rep.check(golay_physical_qubits(100) == 11700,
              fmt("m = 100: %lld qubits; want 11,700", static_cast<long long>(golay_physical_qubits(100))));
    auto femoco = workload("femoco", 1137, 1.3e9, 4.76e-10);
    rep.check(femoco.n_physical == 133029 && femoco.feasible,
              fmt("FeMoco: 1,137 logical -> %lld qubits, total error %.3f; want 133,029",
                  static_cast<long long>(femoco.n_physical), femoco.total_error));
    auto rsa = workload("rsa2048", 1399, 2.8e9, 4.76e-10);
    rep.check(rsa.n_physical == 175383,
              fmt("RSA-2048: 1,399 logical -> %lld qubits, total error %.3f; want 175,383 (= 1,499 x 117)",
                  static_cast<long long>(rsa.n_physical), rsa.total_error));
    return rep.passed();
}

// ---------------------------------------------------------------------------
// 10. Structural properties.

bool criterion_10(const Context &ctx, Report &rep) {
    size_t gadgets = 0, bad = 0;
    for (const auto &[name, make] : gadget_registry()) {
        for (std::string code : {"steane", "golay"}) {
            if (name == "analog_rz" && code == "golay") {
                continue;
            }
            for (int r : {1, 2, 3}) {
                if (r > 1 && name != "distillation") {
                    continue;
                }
                if (name == "distillation" && code != "golay") {
                    continue;
                }
                GadgetRequest q;
                q.code = code;
                q.p = 0;
                q.r = r;
                auto g = make(q);
                auto s = compile(g.circuit);
                auto t = summarize(simulate_gadget(g, s, C10_ZERO_SHOTS, SEED, ctx.workers), g.num_steps);
                gadgets++;
                if (t.accepted != C10_ZERO_SHOTS || t.failures != 0 || t.survivors != C10_ZERO_SHOTS) {
                    bad++;
                    rep.line(fmt("         %s/%s r=%d: accepted %llu, failures %llu", name.c_str(), code.c_str(), r,
                                 static_cast<unsigned long long>(t.accepted),
                                 static_cast<unsigned long long>(t.failures)));
                }
            }
        }
    }
    rep.check(bad == 0, fmt("p = 0: %zu gadget circuits x %llu shots, %zu with discards or failures", gadgets,
                            static_cast<unsigned long long>(C10_ZERO_SHOTS), bad));

    auto opt = flip_options(ctx);
    auto h = repeated_gate_benchmark(BenchGate::H, steane_code(), 1e-3, 12, C10_PATTERN_SHOTS, opt);
    double z = parity_z_statistic(h, 2);
    rep.check(z > C10_Z95, fmt("steane H p(Q), Q >= 2: odd > even, z = %.2f (one-sided 95%%: %.3f)", z, C10_Z95));
    auto cz = repeated_gate_benchmark(BenchGate::CZ, steane_code(), 1e-3, 12, C10_PATTERN_SHOTS, opt);
    double chi2 = period3_chi2(cz, 3);
    rep.check(chi2 > C10_CHI2_95_2DOF,
              fmt("steane CZ p(Q), Q >= 3: period-3 chi2 = %.1f (95%%, 2 dof: %.3f)", chi2, C10_CHI2_95_2DOF));

    auto csv_for = [&](unsigned workers) {
        RunOptions o = flip_options(ctx);
        o.workers = workers;
        std::ostringstream out;
        out << CSV_HEADER << "\n";
        std::vector<FitPoint> pts;
        for (double p : {2e-3, 5e-3, 1e-2}) {
            auto r = repeated_gate_benchmark(BenchGate::H, steane_code(), p, 12, 300'000, o);
            write_csv_row(out, r);
            pts.push_back(fit_point(r));
        }
        write_fit_row(out, "steane", "H", 0, fit_power_law(pts));
        return out.str();
    };
    auto one = csv_for(1);
    bool same = true;
    for (unsigned w : {2u, 4u, 7u}) {
        same &= csv_for(w) == one;
    }
    rep.check(same, fmt("CSV of a 3-point sweep + fit identical for 1, 2, 4 and 7 workers (%zu bytes)", one.size()));
    return rep.passed();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"mbftqc acceptance checks"};
    std::vector<int> which;
    Context ctx;
    std::string out;
    ctx.workers = default_workers();
    app.add_option("--criterion", which, "Criterion number(s), 1-10; default all")->check(CLI::Range(1, 10));
    app.add_option("--out", out, "Directory for result CSVs");
    app.add_option("--workers", ctx.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--long", ctx.long_runs, "Include the optional long runs");
    CLI11_PARSE(app, argc, argv);
    ctx.out = out;
    if (which.empty()) {
        for (int i = 1; i <= 10; i++) {
            which.push_back(i);
        }
    }
    const std::function<bool(const Context &, Report &)> criteria[] = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    bool all = true;
    for (int n : which) {
        Report rep;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criteria[n - 1](ctx, rep);
        } catch (const std::exception &e) {
            rep.check(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream text;
        text << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << fmt(" (%.1f s)", secs) << "\n";
        for (const auto &l : rep.lines()) {
            text << "    " << l << "\n";
        }
        std::cout << text.str() << std::flush;
        if (!ctx.out.empty()) {
            std::filesystem::create_directories(ctx.out);
            std::ofstream(ctx.out / ("criterion" + std::to_string(n) + ".txt")) << text.str();
        }
        all &= ok;
    }
    return all ? 0 : 1;
}
