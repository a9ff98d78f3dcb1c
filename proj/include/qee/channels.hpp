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
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qee/quantum_system.hpp"
#include "qee/rng.hpp"
#include "qee/types.hpp"

namespace qee {

// ---------------------------------------------------------------------------
// Parties and edges
// ---------------------------------------------------------------------------

enum class Role : std::uint8_t { Alice, Bob, TP1, TP2, Eve, Participant };

/// A protocol party. Participants are numbered from 1: participant(1) is
/// Alice, participant(2) is Bob, participant(k >= 3) is Participant(k).
struct PartyId {
    Role role = Role::Alice;
    std::uint32_t index = 0;

    static constexpr PartyId alice() { return {Role::Alice, 1}; }
    static constexpr PartyId bob() { return {Role::Bob, 2}; }
    static constexpr PartyId tp1() { return {Role::TP1, 0}; }
    static constexpr PartyId tp2() { return {Role::TP2, 0}; }
    static constexpr PartyId eve() { return {Role::Eve, 0}; }

    static PartyId participant(std::uint32_t k) {
        if (k == 1) return alice();
        if (k == 2) return bob();
        if (k == 0) throw InvalidInput("participants are numbered from 1");
        return {Role::Participant, k};
    }

    bool is_participant() const noexcept {
        return role == Role::Alice || role == Role::Bob || role == Role::Participant;
    }

    bool is_tp() const noexcept { return role == Role::TP1 || role == Role::TP2; }

    std::string name() const {
        switch (role) {
            case Role::Alice: return "Alice";
            case Role::Bob: return "Bob";
            case Role::TP1: return "TP1";
            case Role::TP2: return "TP2";
            case Role::Eve: return "Eve";
            case Role::Participant: return "P" + std::to_string(index);
        }
        return "?";
    }

    static PartyId parse(std::string_view s) {
        if (s == "Alice") return alice();
        if (s == "Bob") return bob();
        if (s == "TP1") return tp1();
        if (s == "TP2") return tp2();
        if (s == "Eve") return eve();
        if (s.size() > 1 && s[0] == 'P') {
            std::uint32_t k = 0;
            for (char c : s.substr(1)) {
                if (c < '0' || c > '9') throw InvalidInput("unknown party '" + std::string(s) + "'");
                k = k * 10 + static_cast<std::uint32_t>(c - '0');
            }
            if (k >= 3) return participant(k);
        }
        throw InvalidInput("unknown party '" + std::string(s) + "'");
    }

    friend auto operator<=>(const PartyId&, const PartyId&) = default;
};

/// A directed use of an (undirected) channel.
struct Edge {
    PartyId from;
    PartyId to;

    friend auto operator<=>(const Edge&, const Edge&) = default;

    std::string name() const { return from.name() + "->" + to.name(); }
};

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

enum class TrojanKind : std::uint8_t { InvisiblePhoton, DelayPhoton };

inline std::string_view to_string(TrojanKind k) {
    return k == TrojanKind::InvisiblePhoton ? "invisible_photon" : "delay_photon";
}

/// Abstract marker for an auxiliary photon riding along with a slot.
struct TrojanTag {
    TrojanKind kind = TrojanKind::InvisiblePhoton;
    PartyId planted_by = PartyId::eve();

    friend bool operator==(const TrojanTag&, const TrojanTag&) = default;
};

/// An ordered block of qubits sent over a quantum channel.
struct QuantumMessage {
    PartyId sender;
    PartyId receiver;
    std::vector<QubitRef> qubits;
    std::vector<std::optional<TrojanTag>> tags;  // empty, or one per slot

    std::size_t size() const noexcept { return qubits.size(); }

    std::optional<TrojanTag> tag(std::size_t slot) const {
        return slot < tags.size() ? tags[slot] : std::nullopt;
    }

    void set_tag(std::size_t slot, TrojanTag t) {
        tags.resize(qubits.size());
        tags.at(slot) = t;
    }
};

struct Ack {
    friend bool operator==(const Ack&, const Ack&) = default;
};

struct PositionsBases {
    std::vector<std::size_t> positions;
    std::vector<Basis> bases;
    friend bool operator==(const PositionsBases&, const PositionsBases&) = default;
};

struct MeasurementResults {
    std::vector<std::uint8_t> bits;
    friend bool operator==(const MeasurementResults&, const MeasurementResults&) = default;
};

struct AbortNotice {
    std::size_t step = 0;
    std::string reason;
    friend bool operator==(const AbortNotice&, const AbortNotice&) = default;
};

struct MacTag {
    std::uint64_t value = 0;
    friend bool operator==(const MacTag&, const MacTag&) = default;
};

using ClassicalPayload = std::variant<Ack, PositionsBases, MeasurementResults, AbortNotice, MacTag>;

inline std::string_view payload_kind(const ClassicalPayload& p) {
    switch (p.index()) {
        case 0: return "ack";
        case 1: return "positions_bases";
        case 2: return "measurement_results";
        case 3: return "abort";
        case 4: return "mac_tag";
    }
    return "?";
}

inline std::string payload_summary(const ClassicalPayload& p) {
    std::ostringstream out;
    out << payload_kind(p);
    if (const auto* pb = std::get_if<PositionsBases>(&p)) {
        out << " [";
        for (std::size_t i = 0; i < pb->positions.size(); ++i) {
            out << (i ? " " : "") << pb->positions[i] << ':' << to_string(pb->bases[i]);
        }
        out << ']';
    } else if (const auto* mr = std::get_if<MeasurementResults>(&p)) {
        out << ' ';
        for (auto b : mr->bits) out << static_cast<int>(b);
    } else if (const auto* ab = std::get_if<AbortNotice>(&p)) {
        out << " step=" << ab->step << ' ' << ab->reason;
    } else if (const auto* tag = std::get_if<MacTag>(&p)) {
        out << ' ' << std::hex << tag->value;
    }
    return out.str();
}

struct ClassicalMessage {
    PartyId sender;
    PartyId receiver;
    ClassicalPayload payload;

    friend bool operator==(const ClassicalMessage&, const ClassicalMessage&) = default;
};

// ---------------------------------------------------------------------------
// Transcript
// ---------------------------------------------------------------------------

enum class EventKind : std::uint8_t { QuantumSend, QuantumDeliver, Classical, Abort };

inline std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::QuantumSend: return "quantum_send";
        case EventKind::QuantumDeliver: return "quantum_deliver";
        case EventKind::Classical: return "classical";
        case EventKind::Abort: return "abort";
    }
    return "?";
}

struct TranscriptEvent {
    std::uint64_t step = 0;
    EventKind kind = EventKind::Classical;
    PartyId from;
    PartyId to;
    std::string summary;
    std::optional<ClassicalPayload> payload;  // classical events only
    std::size_t qubit_count = 0;              // quantum events only
};

/// Append-only log ordered by a logical step counter.
class Transcript {
   public:
    void append(TranscriptEvent e) {
        e.step = events_.size();
        events_.push_back(std::move(e));
    }

    const std::vector<TranscriptEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }

    /// One JSON object per line: {step, kind, from, to, payload_summary}.
    std::string to_jsonl() const {
        std::string out;
        for (const auto& e : events_) {
            nlohmann::ordered_json j;
            j["step"] = e.step;
            j["kind"] = to_string(e.kind);
            j["from"] = e.from.name();
            j["to"] = e.to.name();
            j["payload_summary"] = e.summary;
            out += j.dump();
            out += '\n';
        }
        return out;
    }

   private:
    std::vector<TranscriptEvent> events_;
};

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

/// Undirected quantum and authenticated-classical edges, plus which parties
/// run photon-number-splitter / wavelength-filter checks on arrival.
class Topology {
   public:
    /// TP1 and TP2 each share both channel types with Alice and Bob.
    static Topology two_party() { return multiparty(2); }

    /// TP1 and TP2 each share both channel types with participants 1..k.
    static Topology multiparty(std::size_t k) {
        if (k < 2) {
            throw InvalidInput("need at least two participants");
        }
        Topology t;
        for (std::uint32_t i = 1; i <= k; ++i) {
            const PartyId p = PartyId::participant(i);
            for (PartyId tp : {PartyId::tp1(), PartyId::tp2()}) {
                t.add_quantum_edge(tp, p);
                t.add_classical_edge(tp, p);
            }
            t.filters_.insert(p);
        }
        t.filters_.insert(PartyId::tp2());
        return t;
    }

    void add_quantum_edge(PartyId a, PartyId b) { quantum_.insert(key(a, b)); }
    void add_classical_edge(PartyId a, PartyId b) { classical_.insert(key(a, b)); }

    bool has_quantum_edge(PartyId a, PartyId b) const { return quantum_.contains(key(a, b)); }
    bool has_classical_edge(PartyId a, PartyId b) const { return classical_.contains(key(a, b)); }

    void set_filters(PartyId p, bool on) {
        if (on) {
            filters_.insert(p);
        } else {
            filters_.erase(p);
        }
    }

    void set_all_filters(bool on) {
        if (!on) {
            filters_.clear();
            return;
        }
        for (const auto& [a, b] : quantum_) {
            filters_.insert(a);
            filters_.insert(b);
        }
    }

    bool has_filters(PartyId p) const { return filters_.contains(p); }

   private:
    static std::pair<PartyId, PartyId> key(PartyId a, PartyId b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    std::set<std::pair<PartyId, PartyId>> quantum_;
    std::set<std::pair<PartyId, PartyId>> classical_;
    std::set<PartyId> filters_;
};

/// Ideal photon-number-splitter + wavelength-filter check: returns every tag
/// in the message if the receiver runs the devices, nothing otherwise.
inline std::vector<TrojanTag> scan_trojan(const Topology& topo, PartyId receiver, const QuantumMessage& msg) {
    std::vector<TrojanTag> found;
    if (!topo.has_filters(receiver)) {
        return found;
    }
    for (const auto& t : msg.tags) {
        if (t) {
            found.push_back(*t);
        }
    }
    return found;
}

// ---------------------------------------------------------------------------
// Interceptors and the network
// ---------------------------------------------------------------------------

/// What an interceptor may touch while a message is in flight.
struct InterceptContext {
    QuantumSystem& system;
    Rng& rng;
};

/// A party sitting on channels. On quantum edges it may replace, entangle
/// with, measure or tag in-flight qubits. On authenticated classical edges it
/// only reads; `tamper_classical` exists so an attempted alteration surfaces
/// as a ContractViolation instead of silently succeeding.
class Interceptor {
   public:
    virtual ~Interceptor() = default;

    virtual PartyId identity() const = 0;

    virtual QuantumMessage on_quantum_in_flight(const Edge&, QuantumMessage msg, InterceptContext&) {
        return msg;
    }

    virtual void on_classical_observed(const ClassicalMessage&) {}

    virtual std::optional<ClassicalPayload> tamper_classical(const ClassicalMessage&) { return std::nullopt; }
};

class Network {
   public:
    explicit Network(Topology topology) : topology_(std::move(topology)) {}

    const Topology& topology() const noexcept { return topology_; }
    Topology& topology() noexcept { return topology_; }
    const Transcript& transcript() const noexcept { return transcript_; }

    /// Registers `i` on the quantum edge a->b. Interceptors on one edge run in
    /// registration order.
    void attach(const Edge& e, Interceptor* i) {
        if (!topology_.has_quantum_edge(e.from, e.to)) {
            throw TopologyViolation("no quantum edge " + e.name());
        }
        taps_.emplace_back(e, i);
    }

    /// Registers `i` as a reader of every classical message.
    void observe(Interceptor* i) { observers_.push_back(i); }

    QuantumMessage send_quantum(QuantumMessage msg, InterceptContext& ctx) {
        if (!topology_.has_quantum_edge(msg.sender, msg.receiver)) {
            throw TopologyViolation("no quantum edge " + msg.sender.name() + "->" + msg.receiver.name());
        }
        const Edge edge{msg.sender, msg.receiver};
        transcript_.append({0, EventKind::QuantumSend, msg.sender, msg.receiver, quantum_summary(msg),
                            std::nullopt, msg.size()});
        const std::size_t length = msg.size();
        for (auto& [e, tap] : taps_) {
            if (e == edge) {
                msg = tap->on_quantum_in_flight(edge, std::move(msg), ctx);
                if (msg.size() != length || msg.sender != edge.from || msg.receiver != edge.to) {
                    throw ContractViolation("interceptor changed the shape of a quantum block on " + edge.name());
                }
            }
        }
        transcript_.append({0, EventKind::QuantumDeliver, msg.sender, msg.receiver, quantum_summary(msg),
                            std::nullopt, msg.size()});
        return msg;
    }

    /// Delivers verbatim. Every observer gets a copy.
    ClassicalMessage send_classical(const ClassicalMessage& msg) {
        if (!topology_.has_classical_edge(msg.sender, msg.receiver)) {
            throw TopologyViolation("no authenticated classical edge " + msg.sender.name() + "->" +
                                    msg.receiver.name());
        }
        const bool abort = std::holds_alternative<AbortNotice>(msg.payload);
        transcript_.append({0, abort ? EventKind::Abort : EventKind::Classical, msg.sender, msg.receiver,
                            payload_summary(msg.payload), msg.payload, 0});
        for (auto* o : observers_) {
            o->on_classical_observed(msg);
            if (auto altered = o->tamper_classical(msg); altered && !(*altered == msg.payload)) {
                throw ContractViolation(o->identity().name() + " tried to alter an authenticated message on " +
                                        msg.sender.name() + "->" + msg.receiver.name());
            }
        }
        if (abort) {
            aborted_.insert(msg.sender);
            aborted_.insert(msg.receiver);
        }
        return msg;
    }

    bool is_aborted(PartyId p) const { return aborted_.contains(p); }

   private:
    static std::string quantum_summary(const QuantumMessage& msg) {
        std::size_t tagged = 0;
        for (const auto& t : msg.tags) {
            tagged += t.has_value();
        }
        return "qubits=" + std::to_string(msg.size()) + " tagged=" + std::to_string(tagged);
    }

    Topology topology_;
    Transcript transcript_;
    std::vector<std::pair<Edge, Interceptor*>> taps_;
    std::vector<Interceptor*> observers_;
    std::set<PartyId> aborted_;
};

}  // namespace qee
