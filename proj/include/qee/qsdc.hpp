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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qee/adversary.hpp"
#include "qee/channels.hpp"
#include "qee/protocol.hpp"
#include "qee/quantum_system.hpp"
#include "qee/rng.hpp"
#include "qee/types.hpp"

namespace qee {

/// A secret message: two bits per surviving pair.
struct Message {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    std::size_t pairs() const noexcept { return bits.size() / 2; }

    static Message random(std::size_t nbits, Rng& rng) {
        Message m;
        m.bits.reserve(nbits);
        for (std::size_t i = 0; i < nbits; ++i) {
            m.bits.push_back(rng.bit());
        }
        return m;
    }

    /// MSB-first nibbles; a trailing partial nibble is zero padded.
    std::string to_hex() const {
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string s;
        for (std::size_t i = 0; i < bits.size(); i += 4) {
            unsigned v = 0;
            for (std::size_t k = 0; k < 4; ++k) {
                v = (v << 1) | (i + k < bits.size() ? bits[i + k] : 0u);
            }
            s.push_back(kDigits[v]);
        }
        return s;
    }

    static Message from_hex(std::string_view hex, std::size_t nbits) {
        if (nbits > hex.size() * 4 || nbits + 4 <= hex.size() * 4) {
            throw InvalidInput("hex string of length " + std::to_string(hex.size()) + " cannot hold " +
                               std::to_string(nbits) + " bits");
        }
        Message m;
        for (char c : hex) {
            unsigned v = 0;
            if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
            else throw InvalidInput(std::string("bad hex digit '") + c + "'");
            for (int k = 3; k >= 0; --k) {
                if (m.bits.size() < nbits) m.bits.push_back(static_cast<std::uint8_t>((v >> k) & 1u));
            }
        }
        return m;
    }

    friend bool operator==(const Message&, const Message&) = default;
};

/// Ideal message authentication: tags come from a collision-free table, so
/// verify(m', tag(m)) is false for every m' != m.
class IdealMac {
   public:
    explicit IdealMac(std::uint64_t key = 0) : next_(splitmix64(key) | 1u) {}

    MacTag protect(const Message& m) {
        auto [it, fresh] = table_.try_emplace(m.bits, next_);
        if (fresh) {
            next_ = splitmix64(next_) | 1u;
            while (issued_.contains(next_)) {
                next_ = splitmix64(next_) | 1u;
            }
        }
        issued_.emplace(it->second, m.bits);
        return MacTag{it->second};
    }

    bool verify(const Message& m, MacTag tag) const {
        auto it = issued_.find(tag.value);
        return it != issued_.end() && it->second == m.bits;
    }

   private:
    std::uint64_t next_;
    std::map<std::vector<std::uint8_t>, std::uint64_t> table_;
    std::map<std::uint64_t, std::vector<std::uint8_t>> issued_;
};

/// Step 5 encoding: Pauli per pair from bits (2i, 2i+1) on Alice's qubits.
inline void encode(QuantumSystem& sys, std::span<const QubitRef> alice, const Message& msg) {
    if (msg.size() != 2 * alice.size()) {
        throw InvalidInput("message of " + std::to_string(msg.size()) + " bits does not fit " +
                           std::to_string(alice.size()) + " pairs");
    }
    for (std::size_t i = 0; i < alice.size(); ++i) {
        sys.apply_pauli(alice[i], pauli_for_bits(msg.bits[2 * i], msg.bits[2 * i + 1]));
    }
}

/// Step 7 decoding: Bell-measure each (relayed, own) pair and invert the code.
inline Message decode(QuantumSystem& sys, std::span<const QubitRef> bob, std::span<const QubitRef> relayed,
                      Rng& rng) {
    if (bob.size() != relayed.size()) {
        throw InvalidInput("relayed block and Bob's block differ in length");
    }
    Message m;
    for (std::size_t i = 0; i < bob.size(); ++i) {
        const auto [b0, b1] = bits_for_pauli(pauli_for_bell(sys.bell_measure(relayed[i], bob[i], rng)));
        m.bits.push_back(b0);
        m.bits.push_back(b1);
    }
    return m;
}

enum class QsdcStatus : std::uint8_t { Delivered, AbortedStep2, AbortedStep3, AbortedStep5, AbortedStep7, MacRejected };

inline std::string_view to_string(QsdcStatus s) {
    switch (s) {
        case QsdcStatus::Delivered: return "Delivered";
        case QsdcStatus::AbortedStep2: return "AbortedStep2";
        case QsdcStatus::AbortedStep3: return "AbortedStep3";
        case QsdcStatus::AbortedStep5: return "AbortedStep5";
        case QsdcStatus::AbortedStep7: return "AbortedStep7";
        case QsdcStatus::MacRejected: return "MacRejected";
    }
    return "?";
}

struct QsdcOutcome {
    QsdcStatus status = QsdcStatus::Delivered;
    std::optional<Message> decoded;
    std::size_t detected_step = 0;  // aborting step, 0 if none
    std::optional<PartyId> detected_by;
    /// Adversary's guess, compared with the true message; only on runs that
    /// passed every discussion.
    std::optional<Message> leak_guess;
    std::size_t leak_bits_correct = 0;
    std::size_t leak_bits_total = 0;
    EstablishmentOutcome establishment;

    bool passed_discussions() const noexcept {
        return status == QsdcStatus::Delivered || status == QsdcStatus::MacRejected;
    }
};

inline nlohmann::ordered_json to_json(const QsdcOutcome& o) {
    nlohmann::ordered_json j;
    j["status"] = to_string(o.status);
    j["decoded_hex"] = o.decoded ? nlohmann::ordered_json(o.decoded->to_hex()) : nlohmann::ordered_json();
    j["leak_bits_correct"] = o.leak_bits_correct;
    j["leak_bits_total"] = o.leak_bits_total;
    j["detected_step"] = o.detected_step;
    return j;
}

/// Smallest establishment size M whose surviving count M - ceil(f*M) is
/// exactly `pairs`.
inline std::size_t establishment_pairs_for(std::size_t pairs, const EstablishmentConfig& cfg) {
    if (pairs < 1) {
        throw InvalidInput("a message needs at least one pair");
    }
    for (std::size_t total = pairs;; ++total) {
        EstablishmentConfig c = cfg;
        c.m_pairs = total;
        const std::size_t checked = c.checked_count();
        if (total - checked == pairs) {
            return total;
        }
        if (total - checked > pairs) {
            throw InvalidInput("no establishment size leaves exactly " + std::to_string(pairs) + " pairs");
        }
    }
}

namespace detail {

inline void discard_all(QuantumSystem& sys, std::span<const QubitRef> qs, Rng& rng) {
    for (auto q : qs) {
        if (sys.is_live(q)) {
            sys.discard(q, rng);
        }
    }
}

}  // namespace detail

/// Steps 1-7: establish, encode, relay through TP2 with fresh decoys on each
/// leg, decode and check the MAC. `cfg.m_pairs` is ignored; the run is sized
/// so that exactly msg.pairs() pairs survive Step 4.
inline QsdcOutcome run_qsdc(Run& run, const EstablishmentConfig& cfg, const Message& msg, IdealMac& mac) {
    if (cfg.parties != 2) {
        throw InvalidInput("QSDC runs between Alice and Bob only");
    }
    if (msg.size() == 0 || msg.size() % 2 != 0) {
        throw InvalidInput("message length must be a positive even number of bits");
    }
    EstablishmentConfig ecfg = cfg;
    ecfg.m_pairs = establishment_pairs_for(msg.pairs(), cfg);

    QsdcOutcome out;
    auto finish = [&](QsdcStatus status, std::size_t step, std::optional<PartyId> by) {
        out.status = status;
        out.detected_step = step;
        out.detected_by = by;
        if (!out.establishment.shares.empty()) {
            detail::discard_all(run.system(), out.establishment.shares[1], run.rng(PartyId::bob()));
        }
        run.conclude(step);
        return out;
    };

    out.establishment = establish_steps(run, ecfg);
    if (out.establishment.status == EstablishmentStatus::AbortedStep2) {
        return finish(QsdcStatus::AbortedStep2, 2, out.establishment.detected_by);
    }
    if (out.establishment.status == EstablishmentStatus::AbortedStep3) {
        return finish(QsdcStatus::AbortedStep3, 3, out.establishment.detected_by);
    }
    const auto& alice = out.establishment.shares[0];
    const auto& bob = out.establishment.shares[1];

    // Step 5
    encode(run.system(), alice, msg);
    DecoyedSequence s1 = insert_decoys(run.system(), alice, cfg.n_decoys, run.rng(PartyId::alice()));
    const QuantumMessage at_tp2 = run.transmit(run.compose(PartyId::alice(), PartyId::tp2(), s1.qubits));
    if (!scan_trojan(run.network().topology(), PartyId::tp2(), at_tp2).empty()) {
        run.say(PartyId::tp2(), PartyId::alice(), AbortNotice{5, "trojan photons detected"});
        return finish(QsdcStatus::AbortedStep5, 5, PartyId::tp2());
    }
    DiscussionResult leg1 = discuss_decoys(run, PartyId::alice(), PartyId::tp2(), at_tp2.qubits, s1.decoys, 5);
    if (!leg1.pass) {
        return finish(QsdcStatus::AbortedStep5, 5, PartyId::alice());
    }
    const auto tag = std::get<MacTag>(run.say(PartyId::alice(), PartyId::tp2(), mac.protect(msg)).payload);

    // Step 6
    std::vector<QubitRef> held = strip_decoys(run.system(), run.rng(PartyId::tp2()), at_tp2.qubits, s1.decoys);
    if (Adversary* tp2 = run.adversary_as(Role::TP2)) {
        tp2->on_tp2_holding(run.system(), run.adversary_rng(), held);
    }
    DecoyedSequence s2 = insert_decoys(run.system(), held, cfg.n_decoys, run.rng(PartyId::tp2()));
    const QuantumMessage at_bob = run.transmit(run.compose(PartyId::tp2(), PartyId::bob(), s2.qubits));
    const auto relayed_tag = std::get<MacTag>(run.say(PartyId::tp2(), PartyId::bob(), tag).payload);

    // Step 7
    if (!scan_trojan(run.network().topology(), PartyId::bob(), at_bob).empty()) {
        run.say(PartyId::bob(), PartyId::tp2(), AbortNotice{7, "trojan photons detected"});
        return finish(QsdcStatus::AbortedStep7, 7, PartyId::bob());
    }
    DiscussionResult leg2 = discuss_decoys(run, PartyId::tp2(), PartyId::bob(), at_bob.qubits, s2.decoys, 7);
    if (!leg2.pass) {
        return finish(QsdcStatus::AbortedStep7, 7, PartyId::tp2());
    }
    std::vector<QubitRef> relayed = strip_decoys(run.system(), run.rng(PartyId::bob()), at_bob.qubits, s2.decoys);
    Message decoded = decode(run.system(), bob, relayed, run.rng(PartyId::bob()));
    out.decoded = decoded;

    run.conclude(0);
    out.status = mac.verify(decoded, relayed_tag) ? QsdcStatus::Delivered : QsdcStatus::MacRejected;
    if (Adversary* adv = run.adversary()) {
        if (const auto& guess = adv->report().guessed_bits) {
            out.leak_guess = Message{*guess};
            out.leak_bits_total = std::min(guess->size(), msg.size());
            for (std::size_t i = 0; i < out.leak_bits_total; ++i) {
                out.leak_bits_correct += (*guess)[i] == msg.bits[i];
            }
        }
    }
    return out;
}

}  // namespace qee
