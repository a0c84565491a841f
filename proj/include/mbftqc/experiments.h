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

#ifndef MBFTQC_EXPERIMENTS_H
#define MBFTQC_EXPERIMENTS_H

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mbftqc/circuit.h"
#include "mbftqc/frame_sampler.h"
#include "mbftqc/gadgets.h"

namespace mbftqc {

// ---------------------------------------------------------------------------
// Block-level evaluation of a gadget: post-selection, decoding, first-failure tally.

namespace detail {

struct TermPlan {
    std::vector<std::vector<uint32_t>> syndrome;
    std::vector<uint8_t> flip;  // by syndrome: 0, 1, or 2 = not in table (decoder failure)
};

struct CheckPlan {
    std::vector<uint32_t> slots;
    std::vector<uint32_t> terms;
    uint32_t step;
};

inline void xor_slots(const FrameBlock &st, const std::vector<uint32_t> &slots, uint64_t *out) {
    std::fill(out, out + BLOCK_WORDS, 0);
    for (auto k : slots) {
        const uint64_t *r = st.slot(k);
        for (size_t w = 0; w < BLOCK_WORDS; w++) {
            out[w] ^= r[w];
        }
    }
}

}  // namespace detail

/// Knobs shared by the benchmark drivers.
struct RunOptions {
    uint64_t seed = 1;
    unsigned workers = 1;
    AncillaMode mode = AncillaMode::TRANSVERSAL_MODEL;
    Readout readout = Readout::DEPOLARIZE;
    double target_rel_ci = 0;  // > 0 enables early stopping; shot counts become caps

    NoisePolicy noise(double p) const {
        return NoisePolicy::uniform(p, readout);
    }
};

/// Raw counts from simulating a gadget. first_failure[Q] for Q = 1..num_steps (index 0 unused).
struct Tally {
    uint64_t shots = 0;
    uint64_t accepted = 0;
    std::vector<uint64_t> first_failure;
    std::vector<uint64_t> check_failures;  // per validation check, independent of other checks

    void merge(const Tally &o) {
        shots += o.shots;
        accepted += o.accepted;
        if (first_failure.size() < o.first_failure.size()) {
            first_failure.resize(o.first_failure.size(), 0);
        }
        for (size_t i = 0; i < o.first_failure.size(); i++) {
            first_failure[i] += o.first_failure[i];
        }
        if (check_failures.size() < o.check_failures.size()) {
            check_failures.resize(o.check_failures.size(), 0);
        }
        for (size_t i = 0; i < o.check_failures.size(); i++) {
            check_failures[i] += o.check_failures[i];
        }
    }
    uint64_t total_failures() const {
        uint64_t t = 0;
        for (auto v : first_failure) {
            t += v;
        }
        return t;
    }
};

/// Everything needed to turn a simulated block into per-shot accept/fail words.
class GadgetEvaluator {
   public:
    explicit GadgetEvaluator(const GadgetCircuit &g) : num_steps_(g.num_steps) {
        for (auto d : g.postselect_detectors) {
            postselect_.push_back(g.circuit.detectors.at(d).slots);
        }
        std::map<std::pair<std::vector<std::vector<uint32_t>>, uint64_t>, uint32_t> seen;
        for (const auto &chk : g.validation_observables) {
            detail::CheckPlan cp;
            cp.slots = g.circuit.detectors.at(chk.detector).slots;
            cp.step = chk.step;
            for (const auto &t : chk.terms) {
                auto key = std::make_pair(t.syndrome, t.overlap);
                auto it = seen.find(key);
                if (it == seen.end()) {
                    detail::TermPlan tp;
                    tp.syndrome = t.syndrome;
                    tp.flip.assign(t.table->present.size(), 2);
                    for (size_t s = 0; s < tp.flip.size(); s++) {
                        if (t.table->present[s]) {
                            tp.flip[s] = parity(t.table->correction[s] & t.overlap);
                        }
                    }
                    terms_.push_back(std::move(tp));
                    it = seen.emplace(key, static_cast<uint32_t>(terms_.size() - 1)).first;
                }
                cp.terms.push_back(it->second);
            }
            checks_.push_back(std::move(cp));
        }
    }

    uint32_t num_steps() const {
        return num_steps_;
    }
    size_t num_checks() const {
        return checks_.size();
    }

    /// Per-shot words: accepted, and failure of each check. `valid` masks shots beyond the request.
    void evaluate(const FrameBlock &st, const uint64_t *valid, uint64_t *accepted, std::vector<uint64_t> &check_fail) {
        uint64_t tmp[BLOCK_WORDS];
        for (size_t w = 0; w < BLOCK_WORDS; w++) {
            accepted[w] = valid[w];
        }
        for (const auto &slots : postselect_) {
            detail::xor_slots(st, slots, tmp);
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                accepted[w] &= ~tmp[w];
            }
        }
        term_corr_.resize(terms_.size() * BLOCK_WORDS);
        term_fail_.resize(terms_.size() * BLOCK_WORDS);
        std::vector<uint64_t> syn;
        for (size_t t = 0; t < terms_.size(); t++) {
            const auto &tp = terms_[t];
            size_t r = tp.syndrome.size();
            syn.resize(r * BLOCK_WORDS);
            uint64_t *corr = term_corr_.data() + t * BLOCK_WORDS;
            uint64_t *fail = term_fail_.data() + t * BLOCK_WORDS;
            uint64_t nz[BLOCK_WORDS] = {};
            for (size_t k = 0; k < r; k++) {
                detail::xor_slots(st, tp.syndrome[k], syn.data() + k * BLOCK_WORDS);
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    nz[w] |= syn[k * BLOCK_WORDS + w];
                }
            }
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                uint64_t c = 0, f = 0;
                uint64_t bits = nz[w] & accepted[w];
                while (bits) {
                    int b = std::countr_zero(bits);
                    bits &= bits - 1;
                    uint32_t s = 0;
                    for (size_t k = 0; k < r; k++) {
                        s |= static_cast<uint32_t>((syn[k * BLOCK_WORDS + w] >> b) & 1) << k;
                    }
                    uint8_t v = tp.flip[s];
                    c |= uint64_t(v == 1) << b;
                    f |= uint64_t(v == 2) << b;
                }
                corr[w] = c;
                fail[w] = f;
            }
        }
        check_fail.resize(checks_.size() * BLOCK_WORDS);
        for (size_t c = 0; c < checks_.size(); c++) {
            uint64_t *out = check_fail.data() + c * BLOCK_WORDS;
            detail::xor_slots(st, checks_[c].slots, out);
            for (auto t : checks_[c].terms) {
                for (size_t w = 0; w < BLOCK_WORDS; w++) {
                    out[w] ^= term_corr_[t * BLOCK_WORDS + w];
                    out[w] |= term_fail_[t * BLOCK_WORDS + w];
                }
            }
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                out[w] &= accepted[w];
            }
        }
    }

    /// Adds one block's counts into a tally.
    void tally(const FrameBlock &st, const uint64_t *valid, Tally &t) {
        uint64_t acc[BLOCK_WORDS];
        evaluate(st, valid, acc, fail_);
        if (t.first_failure.size() < num_steps_ + 1) {
            t.first_failure.resize(num_steps_ + 1, 0);
        }
        if (t.check_failures.size() < checks_.size()) {
            t.check_failures.resize(checks_.size(), 0);
        }
        uint64_t alive[BLOCK_WORDS];
        for (size_t w = 0; w < BLOCK_WORDS; w++) {
            t.shots += std::popcount(valid[w]);
            t.accepted += std::popcount(acc[w]);
            alive[w] = acc[w];
        }
        step_fail_.assign((num_steps_ + 1) * BLOCK_WORDS, 0);
        for (size_t c = 0; c < checks_.size(); c++) {
            const uint64_t *f = fail_.data() + c * BLOCK_WORDS;
            uint64_t *sf = step_fail_.data() + checks_[c].step * BLOCK_WORDS;
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                t.check_failures[c] += std::popcount(f[w]);
                sf[w] |= f[w];
            }
        }
        for (uint32_t q = 1; q <= num_steps_; q++) {
            const uint64_t *sf = step_fail_.data() + q * BLOCK_WORDS;
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                uint64_t first = alive[w] & sf[w];
                t.first_failure[q] += std::popcount(first);
                alive[w] &= ~first;
            }
        }
    }

   private:
    uint32_t num_steps_;
    std::vector<std::vector<uint32_t>> postselect_;
    std::vector<detail::TermPlan> terms_;
    std::vector<detail::CheckPlan> checks_;
    std::vector<uint64_t> term_corr_, term_fail_, fail_, step_fail_;
};

inline void valid_mask(uint64_t block, uint64_t n_shots, uint64_t *valid) {
    uint64_t base = block * SHOTS_PER_BLOCK;
    for (size_t w = 0; w < BLOCK_WORDS; w++) {
        uint64_t lo = base + 64 * w;
        if (lo + 64 <= n_shots) {
            valid[w] = ~uint64_t{0};
        } else if (lo >= n_shots) {
            valid[w] = 0;
        } else {
            valid[w] = (uint64_t{1} << (n_shots - lo)) - 1;
        }
    }
}

/// Outcome of one shot with explicit faults: post-selection passed, and some validation check failed.
struct FaultOutcome {
    bool accepted = false;
    bool failed = false;
    bool operator==(const FaultOutcome &other) const = default;
};

/// Runs each fault set as one noiseless shot with the faults injected.
inline std::vector<FaultOutcome> evaluate_fault_sets(const GadgetCircuit &g, const CompiledSampler &s,
                                                     const std::vector<std::vector<Fault>> &fault_sets) {
    GadgetEvaluator ev(g);
    FrameBlock st;
    st.resize(s);
    std::vector<FaultOutcome> out(fault_sets.size());
    std::vector<Injection> inj;
    std::vector<uint64_t> fail;
    uint64_t valid[BLOCK_WORDS], acc[BLOCK_WORDS];
    for (size_t start = 0; start < fault_sets.size(); start += SHOTS_PER_BLOCK) {
        size_t end = std::min(fault_sets.size(), start + SHOTS_PER_BLOCK);
        inj.clear();
        for (size_t i = start; i < end; i++) {
            add_fault_injections(s, fault_sets[i], static_cast<uint32_t>(i - start), inj);
        }
        sort_injections(inj);
        simulate_block_injected(s, st, inj);
        valid_mask(0, end - start, valid);
        ev.evaluate(st, valid, acc, fail);
        for (size_t i = start; i < end; i++) {
            size_t k = i - start;
            uint64_t bit = uint64_t{1} << (k % 64);
            out[i].accepted = acc[k / 64] & bit;
            for (size_t c = 0; c < ev.num_checks(); c++) {
                out[i].failed |= (fail[c * BLOCK_WORDS + k / 64] & bit) != 0;
            }
        }
    }
    return out;
}

/// Every non-identity Pauli fault at one noise site (3 for one-qubit sites, 15 for two-qubit sites).
inline std::vector<Fault> site_faults(const CompiledSampler &s, size_t site) {
    std::vector<Fault> out;
    const char *letters = "IXYZ";
    bool two = s.error_sites.at(site).targets.size() == 2;
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < (two ? 4 : 1); b++) {
            if (a || b) {
                out.push_back({site, letters[a], letters[b]});
            }
        }
    }
    return out;
}

/// Default worker count: MBFTQC_WORKERS if set, else hardware concurrency.
inline unsigned default_workers() {
    if (const char *env = std::getenv("MBFTQC_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

/// Simulates shots [0, n_shots) of a compiled gadget. Counts are sums over fixed shot blocks,
/// so the result is identical for every worker count.
template <typename BlockFn>
inline void parallel_blocks(uint64_t n_blocks, unsigned workers, BlockFn &&make_and_run) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<uint64_t>(1, n_blocks))));
    std::atomic<uint64_t> next{0};
    auto body = [&](unsigned wid) {
        make_and_run(wid, next);
    };
    if (workers == 1) {
        body(0);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; w++) {
        pool.emplace_back(body, w);
    }
    for (auto &th : pool) {
        th.join();
    }
}

/// Simulates blocks [first_block, end_block) of a run of n_shots total shots. Counts are sums over
/// fixed shot blocks, so the result is identical for every worker count.
inline Tally simulate_gadget_blocks(const GadgetCircuit &g, const CompiledSampler &s, uint64_t first_block,
                                    uint64_t end_block, uint64_t n_shots, uint64_t seed, unsigned workers = 1) {
    std::vector<Tally> partial(std::max(1u, workers));
    uint64_t n_blocks = end_block > first_block ? end_block - first_block : 0;
    parallel_blocks(n_blocks, workers, [&](unsigned wid, std::atomic<uint64_t> &next) {
        GadgetEvaluator ev(g);
        FrameBlock st;
        st.resize(s);
        Tally local;
        local.first_failure.assign(g.num_steps + 1, 0);
        local.check_failures.assign(g.validation_observables.size(), 0);
        uint64_t valid[BLOCK_WORDS];
        while (true) {
            uint64_t blk = first_block + next.fetch_add(1);
            if (blk >= end_block) {
                break;
            }
            simulate_block(s, st, seed, blk, FrameMode::NOISE_ONLY);
            valid_mask(blk, n_shots, valid);
            ev.tally(st, valid, local);
        }
        partial[wid] = std::move(local);
    });
    Tally total;
    total.first_failure.assign(g.num_steps + 1, 0);
    total.check_failures.assign(g.validation_observables.size(), 0);
    for (const auto &t : partial) {
        total.merge(t);
    }
    return total;
}

inline Tally simulate_gadget(const GadgetCircuit &g, const CompiledSampler &s, uint64_t n_shots, uint64_t seed,
                             unsigned workers = 1) {
    uint64_t n_blocks = (n_shots + SHOTS_PER_BLOCK - 1) / SHOTS_PER_BLOCK;
    return simulate_gadget_blocks(g, s, 0, n_blocks, n_shots, seed, workers);
}

// ---------------------------------------------------------------------------
// Statistics.

struct Interval {
    double lo = 0;
    double hi = 0;
};

/// Wilson score interval for k successes in n trials.
inline Interval wilson_interval(uint64_t k, uint64_t n, double z = 1.959963984540054) {
    if (n == 0) {
        return {0, 1};
    }
    double nn = static_cast<double>(n);
    double ph = static_cast<double>(k) / nn;
    double z2 = z * z;
    double denom = 1 + z2 / nn;
    double center = (ph + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct BenchmarkResult {
    std::string experiment;
    std::string code;
    std::string gate;
    double p = 0;
    int r = 0;
    uint64_t seed = 0;
    std::string ancilla;
    std::string readout;
    uint64_t n_shots = 0;
    uint64_t accepted = 0;
    uint32_t q_max = 1;
    std::vector<uint64_t> first_failure;  // N(Q), index Q (0 unused)
    std::vector<uint64_t> at_risk;        // accepted - sum_{q<Q} N(q)
    std::vector<double> per_step;         // p(Q)
    uint32_t q_star = 1;                  // argmax
    double p_L = 0;
    uint64_t failures = 0;                // N(q_star)
    Interval ci;
    double discard_rate = 0;
    uint64_t survivors = 0;

    double sigma() const {
        if (q_star >= at_risk.size() || at_risk[q_star] == 0) {
            return 0;
        }
        return std::sqrt(std::max(p_L * (1 - p_L), 1e-300) / static_cast<double>(at_risk[q_star]));
    }
};

/// p(Q) = N(Q) / (accepted - sum_{q<Q} N(q)); p_L = max_Q p(Q).
inline BenchmarkResult summarize(const Tally &t, uint32_t q_max) {
    BenchmarkResult r;
    r.n_shots = t.shots;
    r.accepted = t.accepted;
    r.q_max = q_max;
    r.first_failure.assign(q_max + 1, 0);
    r.at_risk.assign(q_max + 1, 0);
    r.per_step.assign(q_max + 1, 0);
    uint64_t remaining = t.accepted;
    for (uint32_t q = 1; q <= q_max; q++) {
        uint64_t n = q < t.first_failure.size() ? t.first_failure[q] : 0;
        r.first_failure[q] = n;
        r.at_risk[q] = remaining;
        r.per_step[q] = remaining ? static_cast<double>(n) / static_cast<double>(remaining) : 0;
        remaining -= n;
    }
    r.survivors = remaining;
    r.q_star = 1;
    for (uint32_t q = 1; q <= q_max; q++) {
        if (r.per_step[q] > r.per_step[r.q_star]) {
            r.q_star = q;
        }
    }
    r.p_L = r.per_step[r.q_star];
    r.failures = r.first_failure[r.q_star];
    r.ci = wilson_interval(r.failures, r.at_risk[r.q_star]);
    r.discard_rate = t.shots ? static_cast<double>(t.shots - t.accepted) / static_cast<double>(t.shots) : 0;
    return r;
}

/// Early stopping: simulation proceeds in doubling chunks of whole blocks and stops once the Wilson
/// half-width of p_L falls below `rel_half_width` of p_L, or at `max_shots`. The stopping point
/// depends only on the counts, so it is reproducible.
struct StopRule {
    uint64_t max_shots = 0;
    double rel_half_width = 0;  // 0 disables early stopping
    uint64_t first_chunk = 64 * SHOTS_PER_BLOCK;
};

inline bool precise_enough(const BenchmarkResult &r, double rel_half_width) {
    return rel_half_width > 0 && r.failures > 0 && (r.ci.hi - r.ci.lo) / 2 < rel_half_width * r.p_L;
}

inline Tally simulate_adaptive(const GadgetCircuit &g, const CompiledSampler &s, const StopRule &rule, uint64_t seed,
                               unsigned workers = 1) {
    if (rule.rel_half_width <= 0) {
        return simulate_gadget(g, s, rule.max_shots, seed, workers);
    }
    uint64_t total_blocks = (rule.max_shots + SHOTS_PER_BLOCK - 1) / SHOTS_PER_BLOCK;
    uint64_t done = 0;
    uint64_t chunk = std::max<uint64_t>(1, rule.first_chunk / SHOTS_PER_BLOCK);
    Tally t;
    t.first_failure.assign(g.num_steps + 1, 0);
    t.check_failures.assign(g.validation_observables.size(), 0);
    while (done < total_blocks) {
        uint64_t end = std::min(total_blocks, done + chunk);
        t.merge(simulate_gadget_blocks(g, s, done, end, rule.max_shots, seed, workers));
        done = end;
        chunk = done;
        if (precise_enough(summarize(t, g.num_steps), rule.rel_half_width)) {
            break;
        }
    }
    return t;
}

/// State-preparation benchmark: failures among accepted shots.
inline BenchmarkResult prep_benchmark(const GadgetCircuit &g, uint64_t n_shots, uint64_t seed, unsigned workers = 1,
                                      double target_rel_ci = 0) {
    if (g.validation_observables.empty()) {
        throw ConfigError("gadget has no validation observables");
    }
    auto s = compile(g.circuit);
    auto r = summarize(simulate_adaptive(g, s, {n_shots, target_rel_ci}, seed, workers), g.num_steps);
    r.experiment = "prep";
    r.code = g.code.name;
    r.gate = g.name;
    r.p = g.p;
    r.seed = seed;
    r.ancilla = ancilla_mode_name(g.ancilla);
    r.readout = readout_name(g.readout);
    return r;
}

inline BenchmarkResult repeated_gate_benchmark(BenchGate gate, const CssCode &code, double p, uint32_t q_max,
                                               uint64_t n_shots, const RunOptions &opt = {}) {
    auto g = repeated_gate_circuit(gate, code, opt.noise(p), q_max, opt.mode);
    auto s = compile(g.circuit);
    auto r = summarize(simulate_adaptive(g, s, {n_shots, opt.target_rel_ci}, opt.seed, opt.workers), q_max);
    r.experiment = "gate_bench";
    r.code = code.name;
    r.gate = bench_gate_name(gate);
    r.p = p;
    r.seed = opt.seed;
    r.ancilla = ancilla_mode_name(opt.mode);
    r.readout = readout_name(opt.readout);
    return r;
}

/// Pooled one-sided two-proportion z statistic for p(odd Q) > p(even Q), over Q >= q_min.
inline double parity_z_statistic(const BenchmarkResult &r, uint32_t q_min) {
    double f[2] = {0, 0}, n[2] = {0, 0};
    for (uint32_t q = q_min; q <= r.q_max; q++) {
        f[q % 2] += static_cast<double>(r.first_failure[q]);
        n[q % 2] += static_cast<double>(r.at_risk[q]);
    }
    if (n[0] == 0 || n[1] == 0) {
        return 0;
    }
    double p1 = f[1] / n[1], p0 = f[0] / n[0];
    double pool = (f[0] + f[1]) / (n[0] + n[1]);
    double se = std::sqrt(pool * (1 - pool) * (1 / n[0] + 1 / n[1]));
    return se > 0 ? (p1 - p0) / se : 0;
}

/// Chi-square statistic (2 degrees of freedom) for p(Q) depending on Q mod 3, over Q >= q_min.
inline double period3_chi2(const BenchmarkResult &r, uint32_t q_min) {
    double f[3] = {0, 0, 0}, n[3] = {0, 0, 0};
    for (uint32_t q = q_min; q <= r.q_max; q++) {
        f[q % 3] += static_cast<double>(r.first_failure[q]);
        n[q % 3] += static_cast<double>(r.at_risk[q]);
    }
    double F = f[0] + f[1] + f[2], N = n[0] + n[1] + n[2];
    if (F == 0 || N == 0) {
        return 0;
    }
    double chi2 = 0;
    for (int k = 0; k < 3; k++) {
        double ef = n[k] * F / N, es = n[k] * (N - F) / N;
        if (ef > 0) {
            chi2 += (f[k] - ef) * (f[k] - ef) / ef;
        }
        if (es > 0) {
            chi2 += (n[k] - f[k] - es) * (n[k] - f[k] - es) / es;
        }
    }
    return chi2;
}

// ---------------------------------------------------------------------------
// Per-qubit error statistics of accepted purified |0>_L (the transversal error model).

struct PauliFrequencies {
    uint64_t shots = 0;
    uint64_t accepted = 0;
    uint64_t x = 0, y = 0, z = 0;  // summed over qubits
    size_t n = 0;

    double rate(uint64_t c) const {
        return accepted ? static_cast<double>(c) / static_cast<double>(accepted * n) : 0;
    }
};

/// Decodes both syndrome types of the accepted output block and attributes X/Y/Z per qubit.
inline PauliFrequencies purified_zero_frequencies(const CssCode &code, double p, uint64_t n_shots,
                                                  const RunOptions &opt = {}) {
    const uint64_t seed = opt.seed;
    const unsigned workers = opt.workers;
    auto g = purification_zero(code, opt.noise(p), true);
    auto s = compile(g.circuit);
    const auto &zc = g.slot_groups.at("out.z_checks");
    const auto &xc = g.slot_groups.at("out.x_checks");
    auto table = default_lookup(code);
    uint64_t n_blocks = (n_shots + SHOTS_PER_BLOCK - 1) / SHOTS_PER_BLOCK;
    std::vector<PauliFrequencies> partial(std::max(1u, workers));
    parallel_blocks(n_blocks, workers, [&](unsigned wid, std::atomic<uint64_t> &next) {
        GadgetEvaluator ev(g);
        FrameBlock st;
        st.resize(s);
        PauliFrequencies local;
        uint64_t valid[BLOCK_WORDS], acc[BLOCK_WORDS];
        std::vector<uint64_t> fails;
        while (true) {
            uint64_t blk = next.fetch_add(1);
            if (blk >= n_blocks) {
                break;
            }
            simulate_block(s, st, seed, blk, FrameMode::NOISE_ONLY);
            valid_mask(blk, n_shots, valid);
            ev.evaluate(st, valid, acc, fails);
            for (size_t w = 0; w < BLOCK_WORDS; w++) {
                local.shots += std::popcount(valid[w]);
                local.accepted += std::popcount(acc[w]);
                uint64_t any = 0;
                for (auto k : zc) {
                    any |= st.slot(k)[w];
                }
                for (auto k : xc) {
                    any |= st.slot(k)[w];
                }
                uint64_t bits = any & acc[w];
                while (bits) {
                    int b = std::countr_zero(bits);
                    bits &= bits - 1;
                    uint32_t sz = 0, sx = 0;
                    for (size_t r = 0; r < zc.size(); r++) {
                        sz |= static_cast<uint32_t>((st.slot(zc[r])[w] >> b) & 1) << r;
                        sx |= static_cast<uint32_t>((st.slot(xc[r])[w] >> b) & 1) << r;
                    }
                    uint64_t ex = table->lookup(sz).value_or(0);
                    uint64_t ez = table->lookup(sx).value_or(0);
                    local.x += std::popcount(ex & ~ez);
                    local.y += std::popcount(ex & ez);
                    local.z += std::popcount(ez & ~ex);
                }
            }
        }
        partial[wid] = local;
    });
    PauliFrequencies total;
    total.n = code.n;
    for (const auto &f : partial) {
        total.shots += f.shots;
        total.accepted += f.accepted;
        total.x += f.x;
        total.y += f.y;
        total.z += f.z;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Power-law fits and error budgets.

struct FitPoint {
    double p = 0;
    double p_L = 0;
    double sigma = 0;
    uint64_t events = 0;
};

struct PowerLawFit {
    double C = 0;
    double alpha = 0;
    double var_log_c = 0;
    double var_alpha = 0;
    double cov = 0;
    double p_min = 0;
    double p_max = 0;
    size_t n_points = 0;
    bool alpha_fixed = false;

    double eval(double p) const {
        return C * std::pow(p, alpha);
    }
    double alpha_half_width() const {
        return 1.959963984540054 * std::sqrt(var_alpha);
    }
    /// Relative 1-sigma uncertainty of an extrapolated value at p.
    double relative_sigma(double p) const {
        double lp = std::log(p);
        return std::sqrt(std::max(0.0, var_log_c + lp * lp * var_alpha + 2 * lp * cov));
    }
};

/// Weighted least squares of ln p_L = ln C + alpha ln p, weights (p_L / sigma)^2.
/// Points with fewer than min_events failures are ignored.
inline PowerLawFit fit_power_law(const std::vector<FitPoint> &points, std::optional<double> fixed_alpha = std::nullopt,
                                 uint64_t min_events = 100) {
    std::vector<FitPoint> use;
    for (const auto &pt : points) {
        if (pt.events >= min_events && pt.p > 0 && pt.p_L > 0) {
            use.push_back(pt);
        }
    }
    size_t need = fixed_alpha ? 2 : 3;
    if (use.size() < need) {
        throw NumericError("power-law fit needs at least " + std::to_string(need) + " usable points");
    }
    PowerLawFit f;
    f.n_points = use.size();
    f.p_min = use.front().p;
    f.p_max = use.front().p;
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (const auto &pt : use) {
        double x = std::log(pt.p), y = std::log(pt.p_L);
        double rel = pt.sigma > 0 ? pt.sigma / pt.p_L : 1.0;
        double w = 1 / (rel * rel);
        S += w;
        Sx += w * x;
        Sy += w * y;
        Sxx += w * x * x;
        Sxy += w * x * y;
        f.p_min = std::min(f.p_min, pt.p);
        f.p_max = std::max(f.p_max, pt.p);
    }
    if (fixed_alpha) {
        f.alpha = *fixed_alpha;
        f.alpha_fixed = true;
        double lc = (Sy - f.alpha * Sx) / S;
        f.C = std::exp(lc);
        f.var_log_c = 1 / S;
        return f;
    }
    double det = S * Sxx - Sx * Sx;
    if (!(std::abs(det) > 0)) {
        throw NumericError("degenerate power-law fit");
    }
    f.alpha = (S * Sxy - Sx * Sy) / det;
    double lc = (Sxx * Sy - Sx * Sxy) / det;
    f.C = std::exp(lc);
    f.var_alpha = S / det;
    f.var_log_c = Sxx / det;
    f.cov = -Sx / det;
    return f;
}

inline FitPoint fit_point(const BenchmarkResult &r) {
    return {r.p, r.p_L, r.sigma(), r.failures};
}

struct ErrorBudget {
    double p = 0;
    // Steane path.
    double p_rot = 0;
    double p_tele = 0;
    double p_RZ = 0;
    // Golay path.
    int r = 0;
    double p_S = 0;
    double success = 0;
    double p_T = 0;
    BenchmarkResult rot, tele, distill;
};

inline double rz_total(double p_rot, double p_tele) {
    return 2 * (p_rot + p_tele);
}
inline double t_total(double p_s, double p_tele) {
    return 2 * p_s + p_tele;
}

/// Analog-rotation ancilla error plus R_Z teleportation error; the factor 2 is the expected
/// number of repeat-until-success attempts.
inline ErrorBudget rz_budget(double p, uint64_t n_shots_rot, uint64_t n_shots_tele, uint32_t q_max = 12,
                             const RunOptions &opt = {}) {
    ErrorBudget b;
    b.p = p;
    b.rot = prep_benchmark(analog_ancilla_prep(true, opt.noise(p), opt.mode), n_shots_rot, opt.seed, opt.workers,
                           opt.target_rel_ci);
    b.rot.experiment = "rz_rot";
    RunOptions tele = opt;
    tele.seed = opt.seed + 1;
    tele.mode = AncillaMode::TRANSVERSAL_MODEL;
    b.tele = repeated_gate_benchmark(BenchGate::RZ_TELE, steane_code(), p, q_max, n_shots_tele, tele);
    b.tele.experiment = "rz_tele";
    b.p_rot = b.rot.p_L;
    b.p_tele = b.tele.p_L;
    b.p_RZ = rz_total(b.p_rot, b.p_tele);
    return b;
}

/// S-proxy distillation error and success probability plus T teleportation error (Golay).
/// T states are assumed to fail twice as often as the S proxy.
inline ErrorBudget distill_budget(double p, int r, uint64_t n_shots_distill, uint64_t n_shots_tele,
                                  uint32_t q_max = 12, const RunOptions &opt = {}) {
    ErrorBudget b;
    b.p = p;
    b.r = r;
    b.distill = prep_benchmark(distillation(r, opt.noise(p)), n_shots_distill, opt.seed, opt.workers,
                               opt.target_rel_ci);
    b.distill.experiment = "distill";
    b.distill.r = r;
    b.p_S = b.distill.p_L;
    b.success = 1 - b.distill.discard_rate;
    if (n_shots_tele > 0) {
        RunOptions tele = opt;
        tele.seed = opt.seed + 1;
        tele.mode = AncillaMode::TRANSVERSAL_MODEL;
        b.tele = repeated_gate_benchmark(BenchGate::T_TELE, golay_code(), p, q_max, n_shots_tele, tele);
        b.tele.experiment = "t_tele";
        b.p_tele = b.tele.p_L;
    }
    b.p_T = t_total(b.p_S, b.p_tele);
    return b;
}

// ---------------------------------------------------------------------------
// CSV output.

inline constexpr const char *CSV_HEADER = "experiment,code,gate,p,r,n_shots,accepted,discard_rate,p_L,ci_lo,ci_hi,alpha,C";

inline std::string csv_number(double v) {
    return detail::format_double(v);
}

inline void write_csv_row(std::ostream &out, const BenchmarkResult &r, const PowerLawFit *fit = nullptr) {
    out << r.experiment << "," << r.code << "," << r.gate << "," << csv_number(r.p) << ",";
    if (r.r) {
        out << r.r;
    }
    out << "," << r.n_shots << "," << r.accepted << "," << csv_number(r.discard_rate) << "," << csv_number(r.p_L)
        << "," << csv_number(r.ci.lo) << "," << csv_number(r.ci.hi) << ",";
    if (fit) {
        out << csv_number(fit->alpha) << "," << csv_number(fit->C);
    } else {
        out << ",";
    }
    out << "\n";
}

/// A fit summary row: experiment "fit", p empty, alpha and C filled.
inline void write_fit_row(std::ostream &out, const std::string &code, const std::string &gate, int r,
                          const PowerLawFit &fit) {
    out << "fit," << code << "," << gate << ",,";
    if (r) {
        out << r;
    }
    out << ",,,,,,," << csv_number(fit.alpha) << "," << csv_number(fit.C) << "\n";
}

inline constexpr const char *STEPS_CSV_HEADER = "experiment,code,gate,p,Q,N_Q,at_risk,p_Q";

inline void write_steps_rows(std::ostream &out, const BenchmarkResult &r) {
    for (uint32_t q = 1; q <= r.q_max; q++) {
        out << r.experiment << "," << r.code << "," << r.gate << "," << csv_number(r.p) << "," << q << ","
            << r.first_failure[q] << "," << r.at_risk[q] << "," << csv_number(r.per_step[q]) << "\n";
    }
}

}  // namespace mbftqc

#endif
