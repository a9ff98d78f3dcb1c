// Copyright 2026 The qee Authors
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


#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qee/channels.hpp"
#include "qee/quantum_system.hpp"
#include "qee/rng.hpp"

namespace qee {

/// What an attack achieved in one run.
struct AttackReport {
    bool detected = false;
    std::size_t detected_at = 0;  // protocol step, 0 if undetected
    /// Best guess at the dense-coded message (message-stealing attacks only).
    std::optional<std::vector<std::uint8_t>> guessed_bits;
    std::vector<std::uint8_t> ancilla_outcomes;
    std::vector<BellOutcome> swap_outcomes;
    /// Trojan photons came back out with the sender's encoded block.
    bool leakage_flag = false;
};

/// An attacker: a channel Interceptor plus hooks into the protocol steps its
/// role lets it influence. The protocol only calls a role hook when
/// `identity()` holds that role (TP1 hooks for TP1, TP2 hooks for TP2).
class Adversary : public Interceptor {
   public:
    virtual std::string kind() const = 0;

    /// Quantum edges to intercept, in registration order.
    virtual std::vector<Edge> quantum_edges() const { return {}; }

    // --- TP1 role -----------------------------------------------------------

    /// Replaces TP1's Step 1 source. Returns one group of k qubits per
    /// position (group[i] goes to participant i + 1), or nullopt to let TP1
    /// act honestly.
    virtual std::optional<std::vector<std::vector<QubitRef>>> tp1_generate(QuantumSystem&, Rng&, std::size_t,
                                                                            std::size_t) {
        return std::nullopt;
    }

    /// Counterfactual where TP1 may announce which Bell state each pair is in.
    virtual std::optional<BellOutcome> declared_state(std::size_t) const { return std::nullopt; }

    // --- TP2 role -----------------------------------------------------------

    /// May overwrite the Step 3 check bases TP2 is about to announce.
    virtual void choose_check_bases(std::span<const std::size_t>, std::vector<Basis>&) {}

    /// TP2 holds the stripped encoded block between Steps 5 and 6.
    virtual void on_tp2_holding(QuantumSystem&, Rng&, std::span<const QubitRef>) {}

    // --- any role -----------------------------------------------------------

    /// Step 3 positions and bases were just announced; participants have not
    /// measured yet.
    virtual void on_check_announced(QuantumSystem&, Rng&, std::span<const std::size_t>, std::span<const Basis>) {}

    /// End of run (any outcome).
    virtual void finish(QuantumSystem&, Rng&) {}

    void mark_detected(std::size_t step) {
        if (!report_.detected) {
            report_.detected = true;
            report_.detected_at = step;
        }
    }

    const AttackReport& report() const noexcept { return report_; }

   protected:
    AttackReport report_;
};

}  // namespace qee
