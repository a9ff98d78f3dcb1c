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

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qee/adversary.hpp"
#include "qee/analysis.hpp"
#include "qee/channels.hpp"
#include "qee/linalg.hpp"
#include "qee/quantum_system.hpp"
#include "qee/rng.hpp"
#include "qee/types.hpp"

namespace qee {

// ---------------------------------------------------------------------------
// Attack specification
// ---------------------------------------------------------------------------

enum class AttackKind : std::uint8_t {
    EntangleMeasure,
    InterceptResend,
    EntanglementSwap,
    CorrelationElicitation,
    DenseCoding,
    Modification,
    TrojanHorse,
};

inline std::string_view to_string(AttackKind k) {
    switch (k) {
        case AttackKind::EntangleMeasure: return "entangle_measure";
        case AttackKind::InterceptResend: return "intercept_resend";
        case AttackKind::EntanglementSwap: return "entanglement_swap";
        case AttackKind::CorrelationElicitation: return "correlation_elicitation";
        case AttackKind::DenseCoding: return "dense_coding";
        case AttackKind::Modification: return "modification";
        case AttackKind::TrojanHorse: return "trojan_horse";
    }
    return "?";
}

inline AttackKind parse_attack_kind(std::string_view s) {
    for (auto k : {AttackKind::EntangleMeasure, AttackKind::InterceptResend, AttackKind::EntanglementSwap,
                   AttackKind::CorrelationElicitation, AttackKind::DenseCoding, AttackKind::Modification,
                   AttackKind::TrojanHorse}) {
        if (to_string(k) == s) return k;
    }
    throw InvalidInput("unknown attack '" + std::string(s) + "'");
}

enum class ModificationStrategy : std::uint8_t { AllSlots, SingleSlot, Tp2DecoyAware };

inline std::string_view to_string(ModificationStrategy s) {
    switch (s) {
        case ModificationStrategy::AllSlots: return "all_slots";
        case ModificationStrategy::SingleSlot: return "single_slot";
        case ModificationStrategy::Tp2DecoyAware: return "tp2_decoy_aware";
    }
    return "?";
}

inline ModificationStrategy parse_modification_strategy(std::string_view s) {
    if (s == "all_slots") return ModificationStrategy::AllSlots;
    if (s == "single_slot") return ModificationStrategy::SingleSlot;
    if (s == "tp2_decoy_aware") return ModificationStrategy::Tp2DecoyAware;
    throw InvalidInput("unknown modification strategy '" + std::string(s) + "'");
}

inline TrojanKind parse_trojan_kind(std::string_view s) {
    if (s == "invisible_photon") return TrojanKind::InvisiblePhoton;
    if (s == "delay_photon") return TrojanKind::DelayPhoton;
    throw InvalidInput("unknown trojan kind '" + std::string(s) + "'");
}

/// One attacker, its position in the network and its parameters. A spec names
/// exactly one actor, so colluding TP1 + TP2 attacks cannot be expressed.
struct AttackSpec {
    AttackKind kind = AttackKind::InterceptResend;
    PartyId actor = PartyId::eve();
    Edge target_edge{PartyId::tp1(), PartyId::alice()};

    /// Entangle-and-measure probe: "cnot", "identity", "haar" or "rotations".
    std::string unitary = "cnot";
    std::vector<double> angles;  // 15 rotation angles for "rotations"
    std::uint64_t unitary_seed = 0;  // for "haar"

    ModificationStrategy strategy = ModificationStrategy::AllSlots;
    TrojanKind trojan = TrojanKind::InvisiblePhoton;
    /// Swap diagnostic: TP1 announces the Bell state each checked pair was
    /// projected onto, and TP2 checks against that instead of |Phi+>.
    bool variable_state = false;

    /// The usual actor and edge for each attack.
    static AttackSpec defaults(AttackKind kind) {
        AttackSpec s;
        s.kind = kind;
        switch (kind) {
            case AttackKind::EntangleMeasure:
            case AttackKind::InterceptResend:
            case AttackKind::DenseCoding:
            case AttackKind::TrojanHorse:
                s.actor = PartyId::eve();
                s.target_edge = {PartyId::tp1(), PartyId::alice()};
                break;
            case AttackKind::EntanglementSwap:
                s.actor = PartyId::tp1();
                s.target_edge = {PartyId::tp1(), PartyId::alice()};
                break;
            case AttackKind::CorrelationElicitation:
                s.actor = PartyId::tp2();
                s.target_edge = {PartyId::tp1(), PartyId::bob()};
                break;
            case AttackKind::Modification:
                s.actor = PartyId::eve();
                s.target_edge = {PartyId::alice(), PartyId::tp2()};
                break;
        }
        return s;
    }

    /// Rejects actor and edge combinations the threat model does not give
    /// that attacker.
    void validate(std::size_t parties = 2) const {
        auto fail = [&](const std::string& why) {
            throw InvalidInput(std::string(to_string(kind)) + " by " + actor.name() + " on " + target_edge.name() +
                               ": " + why);
        };
        const auto& e = target_edge;
        const bool distribution_edge = e.from == PartyId::tp1() && e.to.is_participant() && e.to.index <= parties;
        switch (kind) {
            case AttackKind::EntangleMeasure:
            case AttackKind::InterceptResend:
                if (actor != PartyId::eve() && actor != PartyId::tp2()) fail("actor must be Eve or TP2");
                if (!distribution_edge) fail("edge must carry a Step 1 sequence from TP1");
                break;
            case AttackKind::EntanglementSwap:
                if (actor != PartyId::tp1()) fail("only TP1 can mount the swap attack");
                if (parties != 2) fail("the swap attack is defined for two participants");
                break;
            case AttackKind::CorrelationElicitation:
                if (actor != PartyId::tp2()) fail("only TP2 can mount the CE attack");
                if (e != Edge{PartyId::tp1(), PartyId::bob()}) fail("edge must be TP1->Bob");
                break;
            case AttackKind::DenseCoding:
                if (actor != PartyId::eve()) fail("actor must be Eve");
                if (e != Edge{PartyId::tp1(), PartyId::alice()}) fail("edge must be TP1->Alice");
                break;
            case AttackKind::Modification:
                if (strategy == ModificationStrategy::Tp2DecoyAware) {
                    if (actor != PartyId::tp2()) fail("the decoy-aware strategy belongs to TP2");
                    if (e != Edge{PartyId::alice(), PartyId::tp2()}) fail("edge must be Alice->TP2");
                } else {
                    if (actor != PartyId::eve() && actor != PartyId::tp1()) fail("actor must be Eve or TP1");
                    if (e != Edge{PartyId::alice(), PartyId::tp2()} && e != Edge{PartyId::tp2(), PartyId::bob()}) {
                        fail("edge must be Alice->TP2 or TP2->Bob");
                    }
                }
                break;
            case AttackKind::TrojanHorse:
                if (actor != PartyId::eve()) fail("actor must be Eve");
                if (e != Edge{PartyId::tp1(), PartyId::alice()}) fail("edge must be TP1->Alice");
                break;
        }
        if (kind == AttackKind::EntangleMeasure) {
            if (unitary == "rotations" && angles.size() != 15) fail("rotations need 15 angles");
            if (unitary != "cnot" && unitary != "identity" && unitary != "haar" && unitary != "rotations") {
                fail("unknown probe unitary '" + unitary + "'");
            }
        }
    }

    /// The probe unitary on (target, ancilla) for entangle-and-measure.
    Mat4 probe_unitary() const {
        if (unitary == "cnot") return gates::cnot();
        if (unitary == "identity") return identity_matrix<4>();
        if (unitary == "haar") {
            Rng rng(unitary_seed);
            return haar_unitary4(rng);
        }
        if (unitary == "rotations" && angles.size() == 15) {
            return pauli_rotation_product(std::span<const double, 15>(angles.data(), 15));
        }
        throw InvalidInput("cannot build probe unitary '" + unitary + "'");
    }
};

/// The protocol step whose check the attack is analysed against: the step at
/// which a run aborting counts as "detected". Zero when no discussion can
/// catch it.
inline std::size_t oracle_step(const AttackSpec& spec) {
    switch (spec.kind) {
        case AttackKind::EntanglementSwap: return 3;
        case AttackKind::Modification:
            if (spec.strategy == ModificationStrategy::Tp2DecoyAware) return 0;
            return spec.target_edge.from == PartyId::alice() ? 5 : 7;
        default: return 2;
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Closed-form detection probabilities for n decoys on the attacked channel
/// and c checked positions.
inline double analytic_detection(const AttackSpec& spec, std::size_t n, std::size_t c) {
    switch (spec.kind) {
        case AttackKind::InterceptResend:
        case AttackKind::CorrelationElicitation: return 1.0 - std::pow(0.75, static_cast<double>(n));
        case AttackKind::DenseCoding: return 1.0 - std::pow(0.5, static_cast<double>(n));
        case AttackKind::EntanglementSwap: return 1.0 - std::pow(0.5, static_cast<double>(c));
        default: break;
    }
    throw InvalidInput(std::string("no closed-form detection probability for ") + std::string(to_string(spec.kind)));
}

/// Probability that Pauli p moves decoy state s to the orthogonal state of its
/// own basis: 1 - |<s|p|s>|^2.
inline double pauli_disturbance(PauliCode p, StateLabel s) {
    const Vec2 v = state_vector(s);
    const Vec2 w = apply<2>(gates::pauli(p), v);
    return 1.0 - std::norm(inner<2>(v, w));
}

/// Disturbance of one decoy under a uniformly random Pauli, averaged over the
/// 4 x 4 Pauli by decoy-state table.
inline double random_pauli_decoy_detection() {
    double total = 0.0;
    for (auto p : {PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::iY}) {
        for (auto s : kDecoyStates) {
            total += pauli_disturbance(p, s);
        }
    }
    return total / 16.0;
}

/// Detection probability of a modification attack on one relay leg carrying
/// n decoys and m payload qubits.
inline double modification_detection(ModificationStrategy strategy, std::size_t n, std::size_t m) {
    const double d = random_pauli_decoy_detection();
    switch (strategy) {
        case ModificationStrategy::AllSlots: return 1.0 - std::pow(1.0 - d, static_cast<double>(n));
        case ModificationStrategy::SingleSlot:
            return n + m == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(n + m) * d;
        case ModificationStrategy::Tp2DecoyAware: return 0.0;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace detail {

/// Slots of a block of `length` that are not listed as decoys.
inline std::vector<std::size_t> payload_slots(std::size_t length, std::span<const std::size_t> decoys) {
    std::vector<bool> is_decoy(length, false);
    for (auto p : decoys) {
        if (p < length) is_decoy[p] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < length; ++i) {
        if (!is_decoy[i]) out.push_back(i);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Attacks
// ---------------------------------------------------------------------------

/// Attaches a fresh |0> ancilla to every in-flight qubit and applies U on
/// (qubit, ancilla). Ancillas are measured in Z at the end of the run.
class EntangleMeasure : public Adversary {
   public:
    EntangleMeasure(PartyId actor, Edge edge, const Mat4& u) : actor_(actor), edge_(edge), u_(u) {
        if (!is_unitary<4>(u_, 1e-10)) {
            throw InvalidInput("entangle-and-measure parameters do not define a unitary");
        }
    }

    PartyId identity() const override { return actor_; }
    std::string kind() const override { return "entangle_measure"; }
    std::vector<Edge> quantum_edges() const override { return {edge_}; }

    QuantumMessage on_quantum_in_flight(const Edge&, QuantumMessage msg, InterceptContext& ctx) override {
        for (auto q : msg.qubits) {
            const QubitRef a = ctx.system.prepare_single(StateLabel::Zero);
            ctx.system.apply_gate(q, a, u_);
            ancillas_.push_back(a);
        }
        return msg;
    }

    void finish(QuantumSystem& sys, Rng& rng) override {
        for (auto a : ancillas_) {
            report_.ancilla_outcomes.push_back(sys.measure(a, Basis::Z, rng).bit);
        }
    }

    const std::vector<QubitRef>& ancillas() const noexcept { return ancillas_; }

   private:
    PartyId actor_;
    Edge edge_;
    Mat4 u_;
    std::vector<QubitRef> ancillas_;
};

/// Measures every in-flight qubit in a random basis and forwards a fresh
/// qubit in the observed state. As TP2 it also steers the Step 3 bases to the
/// ones it intercepted with, so the entanglement check does not expose it.
class InterceptResend : public Adversary {
   public:
    InterceptResend(PartyId actor, Edge edge) : actor_(actor), edge_(edge) {}

    PartyId identity() const override { return actor_; }
    std::string kind() const override { return "intercept_resend"; }
    std::vector<Edge> quantum_edges() const override { return {edge_}; }

    QuantumMessage on_quantum_in_flight(const Edge&, QuantumMessage msg, InterceptContext& ctx) override {
        for (auto& q : msg.qubits) {
            const Basis b = ctx.rng.coin() ? Basis::X : Basis::Z;
            const MeasurementOutcome o = ctx.system.measure(q, b, ctx.rng);
            originals_.push_back(q);
            bases_.push_back(b);
            results_.push_back(o.bit);
            q = ctx.system.prepare_single(label_for(b, o.bit));
        }
        return msg;
    }

    void on_classical_observed(const ClassicalMessage& m) override {
        if (!decoys_ && m.sender == PartyId::tp1() && m.receiver == edge_.to) {
            if (const auto* pb = std::get_if<PositionsBases>(&m.payload)) {
                decoys_ = pb->positions;
            }
        }
    }

    void choose_check_bases(std::span<const std::size_t> positions, std::vector<Basis>& bases) override {
        if (!decoys_) return;
        const auto slots = detail::payload_slots(bases_.size(), *decoys_);
        for (std::size_t t = 0; t < positions.size(); ++t) {
            if (positions[t] < slots.size()) bases[t] = bases_[slots[positions[t]]];
        }
    }

    const std::vector<Basis>& bases() const noexcept { return bases_; }
    const std::vector<std::uint8_t>& results() const noexcept { return results_; }
    const std::vector<QubitRef>& originals() const noexcept { return originals_; }

   private:
    PartyId actor_;
    Edge edge_;
    std::vector<QubitRef> originals_;
    std::vector<Basis> bases_;
    std::vector<std::uint8_t> results_;
    std::optional<std::vector<std::size_t>> decoys_;
};

/// TP1 sends halves of two independent EPR pairs per position and keeps the
/// other halves; at each checked position it Bell-measures the kept halves,
/// swapping the distributed qubits into a known Bell state.
class EntanglementSwap : public Adversary {
   public:
    explicit EntanglementSwap(bool variable_state = false) : variable_state_(variable_state) {}

    PartyId identity() const override { return PartyId::tp1(); }
    std::string kind() const override { return "entanglement_swap"; }

    std::optional<std::vector<std::vector<QubitRef>>> tp1_generate(QuantumSystem& sys, Rng&, std::size_t m,
                                                                    std::size_t k) override {
        if (k != 2) {
            throw InvalidInput("the swap attack is defined for two participants");
        }
        std::vector<std::vector<QubitRef>> groups;
        for (std::size_t j = 0; j < m; ++j) {
            const auto [t1, t2] = sys.prepare_epr_pair();
            const auto [t3, t4] = sys.prepare_epr_pair();
            groups.push_back({t1, t3});
            kept_.push_back({t2, t4});
        }
        return groups;
    }

    void on_check_announced(QuantumSystem& sys, Rng& rng, std::span<const std::size_t> positions,
                            std::span<const Basis>) override {
        for (auto p : positions) {
            const BellOutcome b = sys.bell_measure(kept_.at(p)[0], kept_.at(p)[1], rng);
            report_.swap_outcomes.push_back(b);
            projected_[p] = b;
        }
    }

    std::optional<BellOutcome> declared_state(std::size_t position) const override {
        if (!variable_state_) return std::nullopt;
        auto it = projected_.find(position);
        return it == projected_.end() ? std::nullopt : std::optional<BellOutcome>(it->second);
    }

    /// The Bell state TP1 projected position p onto, if it was checked.
    std::optional<BellOutcome> projected(std::size_t p) const {
        auto it = projected_.find(p);
        return it == projected_.end() ? std::nullopt : std::optional<BellOutcome>(it->second);
    }

    const std::vector<std::array<QubitRef, 2>>& kept() const noexcept { return kept_; }

   private:
    bool variable_state_;
    std::vector<std::array<QubitRef, 2>> kept_;
    std::unordered_map<std::size_t, BellOutcome> projected_;
};

/// TP2 CNOTs every qubit of S2 onto a fresh ancilla. Once it holds Alice's
/// encoded block between Steps 5 and 6 it CNOTs each encoded qubit onto the
/// same pair's ancilla and reads the ancilla: 0 for Phi-type, 1 for Psi-type.
class CorrelationElicitation : public Adversary {
   public:
    PartyId identity() const override { return PartyId::tp2(); }
    std::string kind() const override { return "correlation_elicitation"; }
    std::vector<Edge> quantum_edges() const override { return {{PartyId::tp1(), PartyId::bob()}}; }

    QuantumMessage on_quantum_in_flight(const Edge&, QuantumMessage msg, InterceptContext& ctx) override {
        for (auto q : msg.qubits) {
            const QubitRef a = ctx.system.prepare_single(StateLabel::Zero);
            ctx.system.apply_cnot(q, a);
            ancillas_.push_back(a);
        }
        return msg;
    }

    void on_classical_observed(const ClassicalMessage& m) override {
        const auto* pb = std::get_if<PositionsBases>(&m.payload);
        if (!pb || m.receiver != PartyId::bob()) return;
        if (m.sender == PartyId::tp1() && !decoys_) {
            decoys_ = pb->positions;
        } else if (m.sender == PartyId::tp2() && !checked_) {
            checked_ = pb->positions;
        }
    }

    void choose_check_bases(std::span<const std::size_t>, std::vector<Basis>& bases) override {
        std::fill(bases.begin(), bases.end(), Basis::Z);
    }

    void on_tp2_holding(QuantumSystem& sys, Rng& rng, std::span<const QubitRef> held) override {
        const auto slots = detail::payload_slots(ancillas_.size(), decoys_ ? *decoys_ : std::vector<std::size_t>{});
        std::vector<bool> is_checked(slots.size(), false);
        if (checked_) {
            for (auto p : *checked_) {
                if (p < is_checked.size()) is_checked[p] = true;
            }
        }
        std::vector<QubitRef> pair_ancillas;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (!is_checked[i]) pair_ancillas.push_back(ancillas_[slots[i]]);
        }
        if (pair_ancillas.size() != held.size()) {
            throw ContractViolation("CE attacker lost track of the surviving pairs");
        }
        std::vector<std::uint8_t> guess;
        for (std::size_t j = 0; j < held.size(); ++j) {
            sys.apply_cnot(held[j], pair_ancillas[j]);
            const std::uint8_t psi_type = sys.measure(pair_ancillas[j], Basis::Z, rng).bit;
            report_.ancilla_outcomes.push_back(psi_type);
            guess.push_back(psi_type);
            guess.push_back(rng.bit());
        }
        report_.guessed_bits = std::move(guess);
    }

    const std::vector<QubitRef>& ancillas() const noexcept { return ancillas_; }

   private:
    std::vector<QubitRef> ancillas_;
    std::optional<std::vector<std::size_t>> decoys_;
    std::optional<std::vector<std::size_t>> checked_;
};

/// Eve swaps every qubit of S1 for one half of her own EPR pair. When Alice's
/// encoded block passes on its way to TP2, Eve Bell-measures her halves to
/// read the Paulis, re-applies each Pauli to the original qubit and forwards
/// the originals in place of her own.
class DenseCodingAttack : public Adversary {
   public:
    PartyId identity() const override { return PartyId::eve(); }
    std::string kind() const override { return "dense_coding"; }
    std::vector<Edge> quantum_edges() const override {
        return {{PartyId::tp1(), PartyId::alice()}, {PartyId::alice(), PartyId::tp2()}};
    }

    QuantumMessage on_quantum_in_flight(const Edge& edge, QuantumMessage msg, InterceptContext& ctx) override {
        if (edge.from == PartyId::tp1()) {
            for (auto& q : msg.qubits) {
                const auto [e1, e2] = ctx.system.prepare_epr_pair();
                held_[e1.id] = {e2, q};
                q = e1;
            }
            return msg;
        }
        std::vector<std::uint8_t> guess;
        for (auto& q : msg.qubits) {
            auto it = held_.find(q.id);
            if (it == held_.end()) continue;
            const auto [e2, original] = it->second;
            const PauliCode p = pauli_for_bell(ctx.system.bell_measure(q, e2, ctx.rng));
            const auto [b0, b1] = bits_for_pauli(p);
            guess.push_back(b0);
            guess.push_back(b1);
            ctx.system.apply_pauli(original, p);
            q = original;
        }
        report_.guessed_bits = std::move(guess);
        return msg;
    }

   private:
    struct Held {
        QubitRef e2;
        QubitRef original;
    };
    std::unordered_map<std::uint64_t, Held> held_;
};

/// Random Paulis on a relay leg: on every slot, on one random slot, or (as
/// TP2, who knows where the decoys were) on the stripped payload only.
class Modification : public Adversary {
   public:
    Modification(PartyId actor, Edge edge, ModificationStrategy strategy)
        : actor_(actor), edge_(edge), strategy_(strategy) {}

    PartyId identity() const override { return actor_; }
    std::string kind() const override { return "modification"; }
    std::vector<Edge> quantum_edges() const override {
        if (strategy_ == ModificationStrategy::Tp2DecoyAware) return {};
        return {edge_};
    }

    QuantumMessage on_quantum_in_flight(const Edge&, QuantumMessage msg, InterceptContext& ctx) override {
        if (msg.size() == 0) return msg;
        if (strategy_ == ModificationStrategy::AllSlots) {
            for (std::size_t i = 0; i < msg.size(); ++i) {
                hit(ctx.system, ctx.rng, msg.qubits[i], i);
            }
        } else {
            const std::size_t i = static_cast<std::size_t>(ctx.rng.below(msg.size()));
            hit(ctx.system, ctx.rng, msg.qubits[i], i);
        }
        return msg;
    }

    void on_tp2_holding(QuantumSystem& sys, Rng& rng, std::span<const QubitRef> held) override {
        if (strategy_ != ModificationStrategy::Tp2DecoyAware) return;
        for (std::size_t i = 0; i < held.size(); ++i) {
            hit(sys, rng, held[i], i);
        }
    }

    /// (slot, Pauli) pairs applied.
    const std::vector<std::pair<std::size_t, PauliCode>>& applied() const noexcept { return applied_; }

   private:
    void hit(QuantumSystem& sys, Rng& rng, QubitRef q, std::size_t slot) {
        const auto p = static_cast<PauliCode>(rng.below(4));
        sys.apply_pauli(q, p);
        applied_.emplace_back(slot, p);
    }

    PartyId actor_;
    Edge edge_;
    ModificationStrategy strategy_;
    std::vector<std::pair<std::size_t, PauliCode>> applied_;
};

/// Plants a Trojan tag on every slot of S1 and waits for the tags to come
/// back out with Alice's encoded block.
class TrojanHorse : public Adversary {
   public:
    explicit TrojanHorse(TrojanKind kind) : kind_(kind) {}

    PartyId identity() const override { return PartyId::eve(); }
    std::string kind() const override { return "trojan_horse"; }
    std::vector<Edge> quantum_edges() const override {
        return {{PartyId::tp1(), PartyId::alice()}, {PartyId::alice(), PartyId::tp2()}};
    }

    QuantumMessage on_quantum_in_flight(const Edge& edge, QuantumMessage msg, InterceptContext&) override {
        if (edge.from == PartyId::tp1()) {
            for (std::size_t i = 0; i < msg.size(); ++i) {
                msg.set_tag(i, TrojanTag{kind_, PartyId::eve()});
            }
            return msg;
        }
        for (std::size_t i = 0; i < msg.size(); ++i) {
            if (auto t = msg.tag(i); t && t->planted_by == PartyId::eve()) {
                report_.leakage_flag = true;
                msg.tags[i].reset();
            }
        }
        return msg;
    }

   private:
    TrojanKind kind_;
};

/// Builds the attacker described by `spec`.
inline std::unique_ptr<Adversary> make_adversary(const AttackSpec& spec, std::size_t parties = 2) {
    spec.validate(parties);
    switch (spec.kind) {
        case AttackKind::EntangleMeasure:
            return std::make_unique<EntangleMeasure>(spec.actor, spec.target_edge, spec.probe_unitary());
        case AttackKind::InterceptResend: return std::make_unique<InterceptResend>(spec.actor, spec.target_edge);
        case AttackKind::EntanglementSwap: return std::make_unique<EntanglementSwap>(spec.variable_state);
        case AttackKind::CorrelationElicitation: return std::make_unique<CorrelationElicitation>();
        case AttackKind::DenseCoding: return std::make_unique<DenseCodingAttack>();
        case AttackKind::Modification:
            return std::make_unique<Modification>(spec.actor, spec.target_edge, spec.strategy);
        case AttackKind::TrojanHorse: return std::make_unique<TrojanHorse>(spec.trojan);
    }
    throw InvalidInput("unknown attack");
}

}  // namespace qee
