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


// Tableau reference for gadget outcomes under explicit faults, and fault enumeration helpers.
// Shared by the unit tests and the acceptance binary.

#ifndef MBFTQC_TESTS_FAULT_ORACLE_H
#define MBFTQC_TESTS_FAULT_ORACLE_H

#include <vector>

#include "mbftqc/experiments.h"
#include "mbftqc/gadgets.h"
#include "mbftqc/tableau.h"

namespace mbftqc::oracle {

/// Evaluates a gadget shot by replaying the faulty circuit on the tableau and decoding every
/// syndrome relative to the noiseless run.
class TableauGadgetOracle {
   public:
    explicit TableauGadgetOracle(const GadgetCircuit &g) : g_(g), clean_(run_tableau(g.circuit)) {
    }

    struct Replay {
        FaultOutcome outcome;
        std::vector<uint8_t> detector_flips;  // relative to the noiseless run
    };

    Replay replay(const std::vector<Fault> &faults) const {
        auto run = run_tableau(instantiate_faults(g_.circuit, faults));
        auto flipped = [&](const std::vector<uint32_t> &slots) {
            bool v = false;
            for (auto s : slots) {
                v ^= (run.bits[s] ^ clean_.bits[s]) != 0;
            }
            return v;
        };
        Replay out;
        for (size_t d = 0; d < run.detector_bits.size(); d++) {
            out.detector_flips.push_back(run.detector_bits[d] ^ clean_.detector_bits[d]);
        }
        out.outcome.accepted = true;
        for (auto d : g_.postselect_detectors) {
            if (out.detector_flips[d]) {
                out.outcome.accepted = false;
            }
        }
        if (!out.outcome.accepted) {
            return out;
        }
        for (const auto &chk : g_.validation_observables) {
            bool v = out.detector_flips[chk.detector] != 0;
            bool undecodable = false;
            for (const auto &t : chk.terms) {
                uint32_t syn = 0;
                for (size_t k = 0; k < t.syndrome.size(); k++) {
                    syn |= static_cast<uint32_t>(flipped(t.syndrome[k])) << k;
                }
                auto corr = t.table->lookup(syn);
                if (!corr) {
                    undecodable = true;
                } else {
                    v ^= (std::popcount(*corr & t.overlap) & 1) != 0;
                }
            }
            out.outcome.failed |= v || undecodable;
        }
        return out;
    }

    FaultOutcome evaluate(const std::vector<Fault> &faults) const {
        return replay(faults).outcome;
    }

   private:
    const GadgetCircuit &g_;
    TableauRun clean_;
};

inline std::vector<Fault> all_single_faults(const CompiledSampler &s) {
    std::vector<Fault> out;
    for (size_t i = 0; i < s.error_sites.size(); i++) {
        for (const auto &f : site_faults(s, i)) {
            out.push_back(f);
        }
    }
    return out;
}

/// Calls fn(batch) for every unordered pair of faults at distinct sites, in batches.
template <typename Fn>
void for_each_fault_pair(const std::vector<Fault> &all, size_t batch, Fn &&fn) {
    std::vector<std::vector<Fault>> sets;
    for (size_t i = 0; i < all.size(); i++) {
        for (size_t j = i + 1; j < all.size(); j++) {
            if (all[i].site == all[j].site) {
                continue;
            }
            sets.push_back({all[i], all[j]});
            if (sets.size() == batch) {
                fn(sets);
                sets.clear();
            }
        }
    }
    if (!sets.empty()) {
        fn(sets);
    }
}

}  // namespace mbftqc::oracle

#endif
