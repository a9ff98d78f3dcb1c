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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qee/adversary.hpp"
#include "qee/channels.hpp"
#include "qee/linalg.hpp"
#include "qee/quantum_system.hpp"
#include "qee/rng.hpp"
#include "qee/types.hpp"

namespace qee {

// ---------------------------------------------------------------------------
// Configuration and results
// ---------------------------------------------------------------------------

/// A decoy inserted by its generator; private until the public discussion.
struct DecoyRecord {
    std::size_t position = 0;  // slot in the interleaved sequence
    Basis basis = Basis::Z;
    MeasurementOutcome expected;
};

struct EstablishmentConfig {
    std::size_t m_pairs = 10;
    std::size_t n_decoys = 10;  // per quantum transmission
    double check_fraction = 0.3;
    /// Step 3 can be switched off only for diagnostic runs.
    bool entanglement_check = true;
    std::uint64_t seed = 0;
    std::size_t parties = 2;
    bool trojan_filters = true;

    /// Number of positions TP2 checks: ceil(check_fraction * m_pairs), with a
    /// small guard so that e.g. 0.3 * 10 counts as 3, not 4.
    std::size_t checked_count() const {
        if (!entanglement_check) {
            return 0;
        }
        return static_cast<std::size_t>(std::ceil(check_fraction * static_cast<double>(m_pairs) - 1e-9));
    }

    void validate() const {
        if (m_pairs < 1) throw InvalidInput("m_pairs must be >= 1");
        if (parties < 2) throw InvalidInput("parties must be >= 2");
        if (parties > 16) throw InvalidInput("parties must be <= 16");
        if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
            throw InvalidInput("check_fraction must lie in (0, 1)");
        }
        if (entanglement_check && checked_count() < 1) {
            throw InvalidInput("entanglement check must sample at least one position");
        }
    }
};

enum class EstablishmentStatus : std::uint8_t { Established, AbortedStep2, AbortedStep3 };

inline std::string_view to_string(EstablishmentStatus s) {
    switch (s) {
        case EstablishmentStatus::Established: return "Established";
        case EstablishmentStatus::AbortedStep2: return "AbortedStep2";
        case EstablishmentStatus::AbortedStep3: return "AbortedStep3";
    }
    return "?";
}

/// One decoy comparison in a public discussion.
struct DecoyLogEntry {
    std::size_t step = 0;
    PartyId holder;
    std::size_t position = 0;
    Basis basis = Basis::Z;
    std::uint8_t expected = 0;
    std::uint8_t observed = 0;
    bool pass = true;
};

/// One Step 3 entanglement check position.
struct CheckLogEntry {
    std::size_t position = 0;
    Basis basis = Basis::Z;
    std::vector<std::uint8_t> outcomes;  // one per participant
    bool pass = true;
};

struct EstablishmentOutcome {
    EstablishmentStatus status = EstablishmentStatus::Established;
    std::optional<PartyId> detected_by;
    std::size_t step = 0;  // aborting step, 0 when established
    /// shares[i] is participant i+1's surviving sequence Q_i'.
    std::vector<std::vector<QubitRef>> shares;
    std::vector<CheckLogEntry> check_log;
    std::vector<DecoyLogEntry> decoy_log;
    std::size_t checked = 0;

    bool established() const noexcept { return status == EstablishmentStatus::Established; }

    std::size_t pairs_established() const { return established() && !shares.empty() ? shares[0].size() : 0; }

    /// The j-th surviving entangled group, one qubit per participant.
    std::vector<QubitRef> group(std::size_t j) const {
        std::vector<QubitRef> g;
        for (const auto& s : shares) {
            g.push_back(s.at(j));
        }
        return g;
    }
};

inline nlohmann::ordered_json to_json(const EstablishmentOutcome& o) {
    nlohmann::ordered_json j;
    j["status"] = to_string(o.status);
    j["detected_by"] = o.detected_by ? nlohmann::ordered_json(o.detected_by->name()) : nlohmann::ordered_json();
    j["step"] = o.step;
    j["pairs_established"] = o.pairs_established();
    auto log = nlohmann::ordered_json::array();
    for (const auto& e : o.check_log) {
        log.push_back({{"position", e.position},
                       {"basis", to_string(e.basis)},
                       {"outcomes", e.outcomes},
                       {"pass", e.pass}});
    }
    j["check_log"] = std::move(log);
    return j;
}

// ---------------------------------------------------------------------------
// Run context
// ---------------------------------------------------------------------------

/// Everything one simulation run owns: the quantum state, the network and its
/// transcript, the per-party random streams and the (optional) adversary.
/// Random streams are split from the run seed by name, so adding an attacker
/// never perturbs the honest parties' choices.
class Run {
   public:
    Run(std::uint64_t seed, Topology topology, Adversary* adversary = nullptr)
        : seed_(seed),
          network_(std::move(topology)),
          nature_(Rng(seed).split(stream::kNature)),
          tp1_(Rng(seed).split(stream::kTp1)),
          tp2_(Rng(seed).split(stream::kTp2)),
          adversary_rng_(Rng(seed).split(stream::kAdversary)),
          adversary_(adversary) {
        if (adversary_) {
            for (const auto& e : adversary_->quantum_edges()) {
                network_.attach(e, adversary_);
            }
            network_.observe(adversary_);
        }
    }

    Run(const Run&) = delete;
    Run& operator=(const Run&) = delete;

    std::uint64_t seed() const noexcept { return seed_; }
    QuantumSystem& system() noexcept { return system_; }
    const QuantumSystem& system() const noexcept { return system_; }
    Network& network() noexcept { return network_; }
    const Network& network() const noexcept { return network_; }
    const Transcript& transcript() const noexcept { return network_.transcript(); }
    Rng& nature() noexcept { return nature_; }
    Adversary* adversary() noexcept { return adversary_; }

    /// The private random stream of a party.
    Rng& rng(PartyId p) {
        if (p == PartyId::tp1()) return tp1_;
        if (p == PartyId::tp2()) return tp2_;
        if (p.role == Role::Eve) return adversary_rng_;
        auto it = party_rngs_.find(p);
        if (it == party_rngs_.end()) {
            it = party_rngs_.emplace(p, Rng(seed_).split(stream::kParty + p.index)).first;
        }
        return it->second;
    }

    Rng& adversary_rng() noexcept { return adversary_rng_; }

    /// The adversary if it holds `role`, else null.
    Adversary* adversary_as(Role role) {
        return adversary_ && adversary_->identity().role == role ? adversary_ : nullptr;
    }

    /// Sends a block over the quantum channel and remembers any Trojan tags
    /// the receiver now unknowingly carries along with the qubits.
    QuantumMessage transmit(QuantumMessage msg) {
        InterceptContext ctx{system_, adversary_rng_};
        QuantumMessage delivered = network_.send_quantum(std::move(msg), ctx);
        for (std::size_t i = 0; i < delivered.size(); ++i) {
            if (auto t = delivered.tag(i)) {
                carried_tags_[delivered.qubits[i].id] = *t;
            }
        }
        return delivered;
    }

    /// A block from `sender`; qubits keep any tags they picked up earlier.
    QuantumMessage compose(PartyId sender, PartyId receiver, std::vector<QubitRef> qubits) const {
        QuantumMessage m{sender, receiver, std::move(qubits), {}};
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (auto it = carried_tags_.find(m.qubits[i].id); it != carried_tags_.end()) {
                m.set_tag(i, it->second);
            }
        }
        return m;
    }

    ClassicalMessage say(PartyId from, PartyId to, ClassicalPayload payload) {
        return network_.send_classical({from, to, std::move(payload)});
    }

    /// Adversary bookkeeping at the end of a top-level run.
    void conclude(std::size_t aborted_step) {
        if (!adversary_) {
            return;
        }
        if (aborted_step != 0) {
            adversary_->mark_detected(aborted_step);
        }
        adversary_->finish(system_, adversary_rng_);
    }

   private:
    std::uint64_t seed_;
    QuantumSystem system_;
    Network network_;
    Rng nature_;
    Rng tp1_;
    Rng tp2_;
    Rng adversary_rng_;
    std::map<PartyId, Rng> party_rngs_;
    Adversary* adversary_;
    std::unordered_map<std::uint64_t, TrojanTag> carried_tags_;
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// n distinct positions drawn uniformly from [0, length), sorted.
inline std::vector<std::size_t> sample_positions(std::size_t length, std::size_t n, Rng& rng) {
    if (n > length) {
        throw InvalidInput("cannot sample more positions than exist");
    }
    std::vector<std::size_t> idx(length);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        std::swap(idx[i], idx[i + rng.below(length - i)]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// A payload sequence with fresh decoys interleaved at random positions.
struct DecoyedSequence {
    std::vector<QubitRef> qubits;
    std::vector<DecoyRecord> decoys;
};

/// Inserts n decoys, each uniform over {|0>,|1>,|+>,|->}, at uniformly random
/// positions of the combined sequence. Payload order is preserved.
inline DecoyedSequence insert_decoys(QuantumSystem& sys, std::span<const QubitRef> payload, std::size_t n,
                                     Rng& rng) {
    DecoyedSequence out;
    const std::size_t length = payload.size() + n;
    const auto positions = sample_positions(length, n, rng);
    out.qubits.reserve(length);
    std::size_t next_payload = 0;
    std::size_t next_decoy = 0;
    for (std::size_t slot = 0; slot < length; ++slot) {
        if (next_decoy < positions.size() && positions[next_decoy] == slot) {
            const Basis basis = rng.coin() ? Basis::X : Basis::Z;
            const std::uint8_t bit = rng.bit();
            out.qubits.push_back(sys.prepare_single(label_for(basis, bit)));
            out.decoys.push_back({slot, basis, {basis, bit}});
            ++next_decoy;
        } else {
            out.qubits.push_back(payload[next_payload++]);
        }
    }
    return out;
}

/// Splits a received sequence into its payload and decoy slots and discards
/// the (already measured) decoys.
inline std::vector<QubitRef> strip_decoys(QuantumSystem& sys, Rng& rng, std::span<const QubitRef> sequence,
                                          std::span<const DecoyRecord> decoys) {
    std::vector<bool> is_decoy(sequence.size(), false);
    for (const auto& d : decoys) {
        is_decoy.at(d.position) = true;
    }
    std::vector<QubitRef> payload;
    payload.reserve(sequence.size() - decoys.size());
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (is_decoy[i]) {
            sys.discard(sequence[i], rng);
        } else {
            payload.push_back(sequence[i]);
        }
    }
    return payload;
}

/// TP1's Step 1 output.
struct Distribution {
    std::vector<QuantumMessage> sequences;          // S_i, addressed to participant i+1
    std::vector<std::vector<DecoyRecord>> decoys;   // TP1's private records per channel
};

/// Step 1: TP1 prepares m entangled groups (EPR pairs, or GHZ states for more
/// than two participants) and sends participant i the i-th qubit of every
/// group, mixed with n independent decoys per channel.
inline Distribution tp1_distribute(Run& run, const EstablishmentConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.parties;
    Rng& rng = run.rng(PartyId::tp1());
    std::vector<std::vector<QubitRef>> groups;
    if (Adversary* tp1 = run.adversary_as(Role::TP1)) {
        if (auto forged = tp1->tp1_generate(run.system(), run.adversary_rng(), cfg.m_pairs, k)) {
            groups = std::move(*forged);
        }
    }
    if (groups.empty()) {
        groups.reserve(cfg.m_pairs);
        for (std::size_t j = 0; j < cfg.m_pairs; ++j) {
            groups.push_back(run.system().prepare_ghz(k));
        }
    }
    if (groups.size() != cfg.m_pairs) {
        throw ContractViolation("TP1 source produced the wrong number of groups");
    }

    Distribution d;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<QubitRef> column;
        column.reserve(cfg.m_pairs);
        for (const auto& g : groups) {
            column.push_back(g.at(i));
        }
        DecoyedSequence s = insert_decoys(run.system(), column, cfg.n_decoys, rng);
        d.sequences.push_back(run.compose(PartyId::tp1(), PartyId::participant(static_cast<std::uint32_t>(i + 1)),
                                          std::move(s.qubits)));
        d.decoys.push_back(std::move(s.decoys));
    }
    return d;
}

struct DiscussionResult {
    bool pass = true;
    std::optional<std::size_t> failed_position;
    std::vector<DecoyLogEntry> log;
};

/// Public discussion of decoys between their `generator` and the `holder` of
/// the received sequence: ack, announcement of positions and bases, holder
/// measures and reports, generator compares. Any mismatch aborts.
inline DiscussionResult discuss_decoys(Run& run, PartyId generator, PartyId holder,
                                       std::span<const QubitRef> sequence, std::span<const DecoyRecord> records,
                                       std::size_t step) {
    run.say(holder, generator, Ack{});

    PositionsBases announcement;
    for (const auto& r : records) {
        announcement.positions.push_back(r.position);
        announcement.bases.push_back(r.basis);
    }
    const auto heard = run.say(generator, holder, announcement);

    const auto& pb = std::get<PositionsBases>(heard.payload);
    MeasurementResults results;
    for (std::size_t i = 0; i < pb.positions.size(); ++i) {
        if (pb.positions[i] >= sequence.size()) {
            throw MalformedAnnouncement("decoy position " + std::to_string(pb.positions[i]) +
                                        " outside a sequence of length " + std::to_string(sequence.size()));
        }
        results.bits.push_back(run.system().measure(sequence[pb.positions[i]], pb.bases[i], run.nature()).bit);
    }
    const auto reported = run.say(holder, generator, results);

    DiscussionResult out;
    const auto& bits = std::get<MeasurementResults>(reported.payload).bits;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const bool ok = bits[i] == records[i].expected.bit;
        out.log.push_back({step, holder, records[i].position, records[i].basis, records[i].expected.bit, bits[i], ok});
        if (!ok && out.pass) {
            out.pass = false;
            out.failed_position = records[i].position;
        }
    }
    if (!out.pass) {
        run.say(generator, holder,
                AbortNotice{step, "decoy mismatch at position " + std::to_string(*out.failed_position)});
    }
    return out;
}

struct CheckResult {
    bool pass = true;
    std::optional<std::size_t> failed_position;
    std::vector<CheckLogEntry> log;
    std::vector<std::size_t> positions;
};

/// Whether the participants' outcomes are consistent with the announced state
/// at one check position.
inline bool correlation_holds(Basis basis, std::span<const std::uint8_t> outcomes,
                              std::optional<BellOutcome> declared = std::nullopt) {
    if (declared) {
        const bool equal = outcomes[0] == outcomes[1];
        const bool phi = *declared == BellOutcome::PhiPlus || *declared == BellOutcome::PhiMinus;
        const bool x_equal = *declared == BellOutcome::PhiPlus || *declared == BellOutcome::PsiPlus;
        return basis == Basis::Z ? equal == phi : equal == x_equal;
    }
    if (basis == Basis::Z) {
        return std::all_of(outcomes.begin(), outcomes.end(), [&](auto b) { return b == outcomes[0]; });
    }
    std::uint8_t parity = 0;
    for (auto b : outcomes) {
        parity ^= b;
    }
    return parity == 0;
}

/// Step 3: TP2 samples positions and a basis for each, announces them to all
/// participants at once, collects their results and checks the correlations
/// of |Phi+> (Z: all equal; X: even parity, which for two parties is equal).
inline CheckResult tp2_entanglement_check(Run& run, const EstablishmentConfig& cfg,
                                          const std::vector<std::vector<QubitRef>>& sequences) {
    if (sequences.size() < 2) {
        throw InvalidInput("entanglement check needs at least two sequences");
    }
    const std::size_t m = sequences[0].size();
    for (const auto& s : sequences) {
        if (s.size() != m) {
            throw InvalidInput("entanglement check on sequences of different lengths");
        }
    }
    const std::size_t k = sequences.size();
    for (std::size_t i = 0; i < k; ++i) {
        run.say(PartyId::participant(static_cast<std::uint32_t>(i + 1)), PartyId::tp2(), Ack{});
    }

    CheckResult out;
    Rng& rng = run.rng(PartyId::tp2());
    EstablishmentConfig sized = cfg;
    sized.m_pairs = m;
    const std::size_t c = sized.checked_count();
    out.positions = sample_positions(m, c, rng);
    std::vector<Basis> bases;
    for (std::size_t t = 0; t < c; ++t) {
        bases.push_back(rng.coin() ? Basis::X : Basis::Z);
    }
    if (Adversary* tp2 = run.adversary_as(Role::TP2)) {
        tp2->choose_check_bases(out.positions, bases);
    }

    const PositionsBases announcement{out.positions, bases};
    for (std::size_t i = 0; i < k; ++i) {
        run.say(PartyId::tp2(), PartyId::participant(static_cast<std::uint32_t>(i + 1)), announcement);
    }
    if (Adversary* adv = run.adversary()) {
        adv->on_check_announced(run.system(), run.adversary_rng(), out.positions, bases);
    }

    std::vector<std::vector<std::uint8_t>> reports(k);
    for (std::size_t i = 0; i < k; ++i) {
        MeasurementResults r;
        for (std::size_t t = 0; t < c; ++t) {
            r.bits.push_back(run.system().measure(sequences[i][out.positions[t]], bases[t], run.nature()).bit);
        }
        const auto heard = run.say(PartyId::participant(static_cast<std::uint32_t>(i + 1)), PartyId::tp2(), r);
        reports[i] = std::get<MeasurementResults>(heard.payload).bits;
    }

    Adversary* tp1 = run.adversary_as(Role::TP1);
    for (std::size_t t = 0; t < c; ++t) {
        CheckLogEntry e{out.positions[t], bases[t], {}, true};
        for (std::size_t i = 0; i < k; ++i) {
            e.outcomes.push_back(reports[i][t]);
        }
        const std::optional<BellOutcome> declared =
            (tp1 && k == 2) ? tp1->declared_state(out.positions[t]) : std::nullopt;
        e.pass = correlation_holds(bases[t], e.outcomes, declared);
        if (!e.pass && out.pass) {
            out.pass = false;
            out.failed_position = out.positions[t];
        }
        out.log.push_back(std::move(e));
    }
    if (!out.pass) {
        for (std::size_t i = 0; i < k; ++i) {
            run.say(PartyId::tp2(), PartyId::participant(static_cast<std::uint32_t>(i + 1)),
                    AbortNotice{3, "correlation failure at position " + std::to_string(*out.failed_position)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full runs
// ---------------------------------------------------------------------------

/// Steps 1-4 without the end-of-run adversary bookkeeping; used directly by
/// protocols that continue on the established groups.
inline EstablishmentOutcome establish_steps(Run& run, const EstablishmentConfig& cfg) {
    cfg.validate();
    const std::size_t k = cfg.parties;
    if (!cfg.trojan_filters) {
        run.network().topology().set_all_filters(false);
    }
    EstablishmentOutcome out;

    // Step 1
    Distribution dist = tp1_distribute(run, cfg);
    std::vector<QuantumMessage> received;
    for (auto& s : dist.sequences) {
        received.push_back(run.transmit(std::move(s)));
    }

    // Step 2
    std::vector<std::vector<QubitRef>> payload(k);
    for (std::size_t i = 0; i < k; ++i) {
        const PartyId holder = PartyId::participant(static_cast<std::uint32_t>(i + 1));
        if (!scan_trojan(run.network().topology(), holder, received[i]).empty()) {
            run.say(holder, PartyId::tp1(), AbortNotice{2, "trojan photons detected"});
            out.status = EstablishmentStatus::AbortedStep2;
            out.detected_by = holder;
            out.step = 2;
            return out;
        }
        DiscussionResult r = discuss_decoys(run, PartyId::tp1(), holder, received[i].qubits, dist.decoys[i], 2);
        out.decoy_log.insert(out.decoy_log.end(), r.log.begin(), r.log.end());
        if (!r.pass) {
            out.status = EstablishmentStatus::AbortedStep2;
            out.detected_by = PartyId::tp1();
            out.step = 2;
            return out;
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        const PartyId holder = PartyId::participant(static_cast<std::uint32_t>(i + 1));
        payload[i] = strip_decoys(run.system(), run.rng(holder), received[i].qubits, dist.decoys[i]);
    }

    // Step 3
    std::vector<bool> checked(cfg.m_pairs, false);
    if (cfg.entanglement_check) {
        CheckResult c = tp2_entanglement_check(run, cfg, payload);
        out.check_log = c.log;
        out.checked = c.positions.size();
        if (!c.pass) {
            out.status = EstablishmentStatus::AbortedStep3;
            out.detected_by = PartyId::tp2();
            out.step = 3;
            return out;
        }
        for (auto p : c.positions) {
            checked[p] = true;
        }
    }

    // Step 4
    out.shares.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const PartyId holder = PartyId::participant(static_cast<std::uint32_t>(i + 1));
        for (std::size_t j = 0; j < payload[i].size(); ++j) {
            if (checked[j]) {
                run.system().discard(payload[i][j], run.rng(holder));
            } else {
                out.shares[i].push_back(payload[i][j]);
            }
        }
    }
    out.status = EstablishmentStatus::Established;
    return out;
}

/// Entanglement establishment between Alice and Bob.
inline EstablishmentOutcome run_establishment(Run& run, const EstablishmentConfig& cfg) {
    if (cfg.parties != 2) {
        throw InvalidInput("run_establishment is the two-party protocol; use run_multiparty");
    }
    EstablishmentOutcome out = establish_steps(run, cfg);
    run.conclude(out.step);
    return out;
}

/// Establishment of a k-party GHZ state; k = 2 is exactly run_establishment.
inline EstablishmentOutcome run_multiparty(Run& run, const EstablishmentConfig& cfg) {
    EstablishmentOutcome out = establish_steps(run, cfg);
    run.conclude(out.step);
    return out;
}

/// (|0...0> + |1...1>)/sqrt(2) over k qubits, textbook ordering.
inline std::vector<cplx> ghz_vector(std::size_t k) {
    std::vector<cplx> v(std::size_t{1} << k);
    v.front() = kInvSqrt2;
    v.back() = kInvSqrt2;
    return v;
}

}  // namespace qee
