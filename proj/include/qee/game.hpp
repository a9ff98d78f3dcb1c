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

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
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

/// Which public discussion the game is played on: P1 is TP1's decoy check
/// with Alice, P2 is TP2's entanglement check.
enum class Discussion : std::uint8_t { P1, P2 };

inline std::string_view to_string(Discussion d) { return d == Discussion::P1 ? "P1" : "P2"; }

inline Discussion parse_discussion(std::string_view s) {
    if (s == "P1") return Discussion::P1;
    if (s == "P2") return Discussion::P2;
    throw InvalidInput("unknown discussion '" + std::string(s) + "'");
}

enum class Query : std::uint8_t { Execute, Send, Reveal, Corrupt, Test };

inline std::string_view to_string(Query q) {
    switch (q) {
        case Query::Execute: return "Execute";
        case Query::Send: return "Send";
        case Query::Reveal: return "Reveal";
        case Query::Corrupt: return "Corrupt";
        case Query::Test: return "Test";
    }
    return "?";
}

inline Query parse_query(std::string_view s) {
    for (auto q : {Query::Execute, Query::Send, Query::Reveal, Query::Corrupt, Query::Test}) {
        if (to_string(q) == s) return q;
    }
    throw InvalidInput("unknown query '" + std::string(s) + "'");
}

struct GameSpec {
    Discussion discussion = Discussion::P1;
    std::set<Query> queries = {Query::Execute, Query::Test};
    std::string strategy = "passive";
};

struct GameResult {
    std::size_t instances = 0;
    std::size_t successes = 0;
    std::size_t valid_instances = 0;
    std::size_t stale_instances = 0;
    double advantage = 0.0;
};

inline nlohmann::ordered_json to_json(const GameResult& r) {
    return {{"instances", r.instances},
            {"successes", r.successes},
            {"valid_instances", r.valid_instances},
            {"stale_instances", r.stale_instances},
            {"advantage", r.advantage}};
}

/// |2 * successes / valid - 1|, or 0 with no valid instance.
inline double advantage(std::size_t successes, std::size_t valid) {
    if (valid == 0) return 0.0;
    return std::abs(2.0 * static_cast<double>(successes) / static_cast<double>(valid) - 1.0);
}

/// One game instance. The adversary interacts only through the five queries
/// its spec allows; the referee reads the hidden bit afterwards.
class GameOracle {
   public:
    GameOracle(const GameSpec& spec, const EstablishmentConfig& cfg, std::uint64_t instance_seed)
        : spec_(spec), cfg_(cfg), seed_(instance_seed), coin_(Rng(instance_seed).split(stream::kGame)) {
        cfg_.parties = 2;
        cfg_.entanglement_check = true;
        cfg_.validate();
        hidden_bit_ = coin_.bit();
    }

    const GameSpec& spec() const noexcept { return spec_; }

    /// Send: substitute a TP1 source of the adversary's own making before the
    /// discussion runs.
    void send(Adversary& impostor) {
        require(Query::Send);
        if (run_) throw ContractViolation("Send must come before the discussion is executed");
        impostor_ = &impostor;
    }

    /// Execute: runs the honest discussion and returns its public transcript.
    /// Measurement result strings are the object of the Test query, so they
    /// are withheld from this view.
    std::vector<TranscriptEvent> execute() {
        require(Query::Execute);
        ensure_run();
        std::vector<TranscriptEvent> view;
        for (const auto& e : run_->transcript().events()) {
            if (e.payload && std::holds_alternative<MeasurementResults>(*e.payload)) continue;
            view.push_back(e);
        }
        return view;
    }

    /// Reveal: the true result string. Voids the instance.
    std::vector<std::uint8_t> reveal() {
        require(Query::Reveal);
        ensure_run();
        stale_ = true;
        return results_;
    }

    /// Corrupt: the secret quantum states (decoy states for P1, the shared
    /// pair state for P2). Voids the instance.
    std::vector<std::vector<cplx>> corrupt() {
        require(Query::Corrupt);
        ensure_run();
        stale_ = true;
        std::vector<std::vector<cplx>> states;
        if (spec_.discussion == Discussion::P1) {
            for (const auto& d : decoys_) {
                const Vec2 v = state_vector(label_for(d.basis, d.expected.bit));
                states.emplace_back(v.begin(), v.end());
            }
        } else {
            const Vec4 v = bell_vector(BellOutcome::PhiPlus);
            for (std::size_t i = 0; i < results_.size(); ++i) {
                states.emplace_back(v.begin(), v.end());
            }
        }
        return states;
    }

    /// Test: the real result string if the hidden bit is 0, else a uniformly
    /// random string of the same length. Once per instance.
    std::vector<std::uint8_t> test() {
        require(Query::Test);
        if (tested_) throw ContractViolation("Test may be asked once per instance");
        tested_ = true;
        ensure_run();
        if (hidden_bit_ == 0) return results_;
        std::vector<std::uint8_t> r;
        for (std::size_t i = 0; i < results_.size(); ++i) {
            r.push_back(coin_.bit());
        }
        return r;
    }

    /// Fiat diagnostic: fresh qubits that copy the pre-images of the result
    /// string (decoy states for P1, Alice's post-measurement states for P2),
    /// each with the basis it was measured in. Not a physical operation.
    std::vector<std::pair<QubitRef, Basis>> fiat_copies() {
        ensure_run();
        std::vector<std::pair<QubitRef, Basis>> out;
        if (spec_.discussion == Discussion::P1) {
            for (const auto& d : decoys_) {
                out.emplace_back(run_->system().prepare_single(label_for(d.basis, d.expected.bit)), d.basis);
            }
        } else {
            for (std::size_t i = 0; i < results_.size(); ++i) {
                out.emplace_back(run_->system().prepare_single(label_for(bases_[i], results_[i])), bases_[i]);
            }
        }
        return out;
    }

    QuantumSystem& system() {
        ensure_run();
        return run_->system();
    }

    /// The bases the result string was measured in (public in both games).
    const std::vector<Basis>& result_bases() {
        ensure_run();
        return bases_;
    }

    bool stale() const noexcept { return stale_; }
    bool tested() const noexcept { return tested_; }

    /// Referee only.
    std::uint8_t hidden_bit() const noexcept { return hidden_bit_; }

   private:
    void require(Query q) const {
        if (!spec_.queries.contains(q)) {
            throw ContractViolation(std::string("query ") + std::string(to_string(q)) + " not allowed in this game");
        }
    }

    void ensure_run() {
        if (run_) return;
        run_ = std::make_unique<Run>(seed_, Topology::two_party(), impostor_);
        if (spec_.discussion == Discussion::P1) {
            Distribution dist = tp1_distribute(*run_, cfg_);
            const QuantumMessage received = run_->transmit(std::move(dist.sequences[0]));
            const DiscussionResult r =
                discuss_decoys(*run_, PartyId::tp1(), PartyId::alice(), received.qubits, dist.decoys[0], 2);
            decoys_ = dist.decoys[0];
            for (const auto& e : r.log) {
                results_.push_back(e.observed);
                bases_.push_back(e.basis);
            }
        } else {
            const EstablishmentOutcome o = establish_steps(*run_, cfg_);
            for (const auto& e : o.check_log) {
                results_.push_back(e.outcomes.at(0));
                bases_.push_back(e.basis);
            }
        }
    }

    GameSpec spec_;
    EstablishmentConfig cfg_;
    std::uint64_t seed_;
    Rng coin_;
    std::uint8_t hidden_bit_ = 0;
    Adversary* impostor_ = nullptr;
    std::unique_ptr<Run> run_;
    std::vector<DecoyRecord> decoys_;
    std::vector<std::uint8_t> results_;
    std::vector<Basis> bases_;
    bool tested_ = false;
    bool stale_ = false;
};

/// An adversary in the game: issues queries and outputs a guess of the
/// hidden bit.
class GameStrategy {
   public:
    virtual ~GameStrategy() = default;
    virtual std::string name() const = 0;
    virtual std::set<Query> queries() const = 0;
    virtual std::uint8_t play(GameOracle& oracle, Rng& rng) = 0;
};

/// Watches the discussion and guesses from the challenge string alone:
/// "real" when it has no more ones than zeros.
class PassiveStrategy : public GameStrategy {
   public:
    std::string name() const override { return "passive"; }
    std::set<Query> queries() const override { return {Query::Execute, Query::Test}; }

    std::uint8_t play(GameOracle& oracle, Rng&) override {
        (void)oracle.execute();
        const auto s = oracle.test();
        std::size_t ones = 0;
        for (auto b : s) ones += b;
        return 2 * ones <= s.size() ? 0 : 1;
    }
};

/// Fiat cloning: measures simulator-made copies of the pre-images in the
/// public bases and calls the challenge real iff it matches.
class FiatCloneStrategy : public GameStrategy {
   public:
    std::string name() const override { return "fiat_clone"; }
    std::set<Query> queries() const override { return {Query::Execute, Query::Test}; }

    std::uint8_t play(GameOracle& oracle, Rng& rng) override {
        (void)oracle.execute();
        std::vector<std::uint8_t> predicted;
        for (const auto& [q, basis] : oracle.fiat_copies()) {
            predicted.push_back(oracle.system().measure(q, basis, rng).bit);
        }
        return oracle.test() == predicted ? 0 : 1;
    }
};

/// Supplies TP1's pairs itself, each |Phi+> alongside a private qubit in a
/// random state of its choosing (a product, as any state passing the check
/// must be), then predicts Alice's results by measuring the private qubits.
class FakeStateStrategy : public GameStrategy {
   public:
    std::string name() const override { return "fake_state"; }
    std::set<Query> queries() const override { return {Query::Send, Query::Execute, Query::Test}; }

    class Source : public Adversary {
       public:
        PartyId identity() const override { return PartyId::tp1(); }
        std::string kind() const override { return "fake_state"; }

        std::optional<std::vector<std::vector<QubitRef>>> tp1_generate(QuantumSystem& sys, Rng& rng, std::size_t m,
                                                                        std::size_t k) override {
            if (k != 2) throw InvalidInput("fake-state source serves two participants");
            std::vector<std::vector<QubitRef>> groups;
            for (std::size_t j = 0; j < m; ++j) {
                const auto [a, b] = sys.prepare_epr_pair();
                const double theta = 3.14159265358979323846 * rng.uniform();
                const double phi = 2.0 * 3.14159265358979323846 * rng.uniform();
                const QubitRef e = sys.prepare_state(
                    Vec2{std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)});
                const BellProductCheck check = is_bell_product(sys, a, b);
                if (!check.product) throw ContractViolation("fake state failed the product-state constraint");
                groups.push_back({a, b});
                private_.push_back(e);
            }
            return groups;
        }

        const std::vector<QubitRef>& private_qubits() const noexcept { return private_; }

       private:
        std::vector<QubitRef> private_;
    };

    std::uint8_t play(GameOracle& oracle, Rng& rng) override {
        if (oracle.spec().discussion != Discussion::P2) {
            throw InvalidInput("the fake-state adversary plays the P2 game");
        }
        oracle.send(source_);
        (void)oracle.execute();
        const auto& bases = oracle.result_bases();
        std::vector<std::uint8_t> predicted;
        for (std::size_t i = 0; i < bases.size() && i < source_.private_qubits().size(); ++i) {
            predicted.push_back(oracle.system().measure(source_.private_qubits()[i], bases[i], rng).bit);
        }
        return oracle.test() == predicted ? 0 : 1;
    }

   private:
    Source source_;
};

/// Corrupts and reveals before testing, so it always wins, but only on stale
/// instances that do not count.
class CorruptingStrategy : public GameStrategy {
   public:
    std::string name() const override { return "corrupting"; }
    std::set<Query> queries() const override { return {Query::Execute, Query::Corrupt, Query::Reveal, Query::Test}; }

    std::uint8_t play(GameOracle& oracle, Rng&) override {
        (void)oracle.execute();
        (void)oracle.corrupt();
        const auto truth = oracle.reveal();
        return oracle.test() == truth ? 0 : 1;
    }
};

inline std::unique_ptr<GameStrategy> make_strategy(std::string_view name) {
    if (name == "passive") return std::make_unique<PassiveStrategy>();
    if (name == "fiat_clone") return std::make_unique<FiatCloneStrategy>();
    if (name == "fake_state") return std::make_unique<FakeStateStrategy>();
    if (name == "corrupting") return std::make_unique<CorruptingStrategy>();
    throw InvalidInput("unknown game strategy '" + std::string(name) + "'");
}

/// Plays `instances` independent games and reports the advantage over the
/// instances no Reveal or Corrupt touched.
inline GameResult run_distinguishing_game(const GameSpec& spec, const EstablishmentConfig& cfg,
                                          std::size_t instances, std::uint64_t seed) {
    if (instances < 1) throw InvalidInput("a game needs at least one instance");
    GameResult r;
    r.instances = instances;
    const Rng master(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        auto strategy = make_strategy(spec.strategy);
        for (auto q : strategy->queries()) {
            if (!spec.queries.contains(q)) {
                throw InvalidInput("strategy " + strategy->name() + " needs query " + std::string(to_string(q)));
            }
        }
        const std::uint64_t instance_seed = master.split(stream::kTrial + i).seed();
        GameOracle oracle(spec, cfg, instance_seed);
        Rng rng = Rng(instance_seed).split(stream::kAdversary);
        const std::uint8_t guess = strategy->play(oracle, rng);
        if (!oracle.tested()) throw ContractViolation("strategy " + strategy->name() + " never asked Test");
        if (oracle.stale()) {
            ++r.stale_instances;
            continue;
        }
        ++r.valid_instances;
        r.successes += guess == oracle.hidden_bit();
    }
    r.advantage = advantage(r.successes, r.valid_instances);
    return r;
}

}  // namespace qee
