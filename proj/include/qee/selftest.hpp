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
#include <string>
#include <vector>

#include "qee/adversaries.hpp"
#include "qee/analysis.hpp"
#include "qee/harness.hpp"
#include "qee/protocol.hpp"
#include "qee/qsdc.hpp"
#include "qee/quantum_system.hpp"

namespace qee {

struct SelfCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// A quick run of the core invariants, sized to finish in a few seconds.
inline std::vector<SelfCheck> run_selftest(std::uint64_t seed = 1) {
    std::vector<SelfCheck> out;
    auto guarded = [&](const std::string& name, auto&& body) {
        SelfCheck c{name, false, {}};
        try {
            body(c);
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("threw: ") + e.what();
        }
        out.push_back(std::move(c));
    };

    guarded("norm_and_bell_basis", [&](SelfCheck& c) {
        Rng rng(seed);
        std::size_t unequal = 0;
        double worst = 0.0;
        for (int t = 0; t < 2000; ++t) {
            QuantumSystem sys;
            const auto [a, b] = sys.prepare_epr_pair();
            const Basis basis = rng.coin() ? Basis::X : Basis::Z;
            worst = std::max(worst, sys.max_norm_error());
            unequal += sys.measure(a, basis, rng).bit != sys.measure(b, basis, rng).bit;
        }
        c.pass = unequal == 0 && worst < 1e-10;
        c.detail = "unequal=" + std::to_string(unequal);
    });

    guarded("dense_coding_round_trip", [&](SelfCheck& c) {
        Rng rng(seed);
        c.pass = true;
        for (auto p : {PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::iY}) {
            QuantumSystem sys;
            const auto [a, b] = sys.prepare_epr_pair();
            sys.apply_pauli(a, p);
            c.pass = c.pass && sys.bell_measure(a, b, rng) == bell_for_pauli(p);
        }
    });

    guarded("no_cloning_sample", [&](SelfCheck& c) {
        Rng rng(seed);
        double best = 0.0;
        for (int t = 0; t < 500; ++t) {
            const auto f = clone_fidelities(haar_unitary4(rng), state_vector(StateLabel::Zero));
            best = std::max(best, std::min({f[0], f[1], f[2], f[3]}));
        }
        c.pass = best < 1.0 - 1e-6;
        c.detail = "best_min_fidelity=" + std::to_string(best);
    });

    guarded("honest_establishment", [&](SelfCheck& c) {
        std::size_t ok = 0;
        for (std::size_t i = 0; i < 100; ++i) {
            Run run(trial_seed(seed, i), Topology::two_party());
            const auto o = run_establishment(run, EstablishmentConfig{});
            bool pairs = o.established() && o.pairs_established() == 7;
            for (std::size_t j = 0; pairs && j < o.pairs_established(); ++j) {
                const auto g = o.group(j);
                pairs = is_bell_product(run.system(), g[0], g[1]).product;
            }
            ok += pairs;
        }
        c.pass = ok == 100;
        c.detail = "established=" + std::to_string(ok) + "/100";
    });

    guarded("honest_qsdc", [&](SelfCheck& c) {
        ExperimentConfig ec;
        ec.scenario = Scenario::Qsdc;
        ec.trials = 100;
        ec.seed = seed;
        const auto r = run_experiment(ec);
        c.pass = r.pass && r.delivered == 100;
        c.detail = "delivered=" + std::to_string(r.delivered);
    });

    guarded("intercept_resend_rate", [&](SelfCheck& c) {
        ExperimentConfig ec;
        ec.attack = AttackSpec::defaults(AttackKind::InterceptResend);
        ec.cfg.n_decoys = 5;
        ec.trials = 2000;
        ec.seed = seed;
        const auto r = run_experiment(ec);
        c.pass = r.pass;
        c.detail = "rate=" + std::to_string(r.detection_rate) + " expected=" + std::to_string(*r.analytic_rate);
    });

    guarded("multiparty_ghz", [&](SelfCheck& c) {
        EstablishmentConfig cfg;
        cfg.parties = 3;
        Run run(seed, Topology::multiparty(3));
        const auto o = run_multiparty(run, cfg);
        double worst = 1.0;
        const auto ghz = ghz_vector(3);
        for (std::size_t j = 0; j < o.pairs_established(); ++j) {
            worst = std::min(worst, run.system().fidelity(o.group(j), ghz));
        }
        c.pass = o.established() && worst >= 1.0 - 1e-10;
    });

    return out;
}

}  // namespace qee
