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


#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "oracles.hpp"
#include "qee/adversaries.hpp"
#include "qee/analysis.hpp"
#include "qee/qsdc.hpp"
#include "test_util.hpp"

namespace {

using namespace qee;

EstablishmentConfig config(std::size_t m, std::size_t n, double f = 0.3) {
    EstablishmentConfig c;
    c.m_pairs = m;
    c.n_decoys = n;
    c.check_fraction = f;
    return c;
}

// Detection rate of `spec` over establishment runs.
double establishment_rate(const AttackSpec& spec, const EstablishmentConfig& cfg, std::size_t trials,
                          std::uint64_t seed) {
    std::size_t hit = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto adv = make_adversary(spec);
        qee::Run run(seed + t, Topology::two_party(), adv.get());
        const auto o = run_establishment(run, cfg);
        hit += !o.established() && o.step == oracle_step(spec);
    }
    return static_cast<double>(hit) / static_cast<double>(trials);
}

double qsdc_rate(const AttackSpec& spec, const EstablishmentConfig& cfg, std::size_t bits, std::size_t trials,
                 std::uint64_t seed) {
    std::size_t hit = 0;
    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        auto adv = make_adversary(spec);
        qee::Run run(rng.next_u64(), Topology::two_party(), adv.get());
        IdealMac mac;
        const auto o = run_qsdc(run, cfg, Message::random(bits, rng), mac);
        hit += o.detected_step == oracle_step(spec);
    }
    return static_cast<double>(hit) / static_cast<double>(trials);
}

TEST(AttackKind, NamesRoundTrip) {
    for (auto k : {AttackKind::EntangleMeasure, AttackKind::InterceptResend, AttackKind::EntanglementSwap,
                   AttackKind::CorrelationElicitation, AttackKind::DenseCoding, AttackKind::Modification,
                   AttackKind::TrojanHorse}) {
        EXPECT_EQ(parse_attack_kind(to_string(k)), k);
        EXPECT_NO_THROW(AttackSpec::defaults(k).validate());
    }
    EXPECT_THROW(parse_attack_kind("photon_number_splitting"), InvalidInput);
}

TEST(AttackSpec, RoleRestrictions) {
    auto with = [](AttackKind k, PartyId actor, Edge e) {
        auto s = AttackSpec::defaults(k);
        s.actor = actor;
        s.target_edge = e;
        return s;
    };
    const Edge tp1_alice{PartyId::tp1(), PartyId::alice()}, tp1_bob{PartyId::tp1(), PartyId::bob()};
    const Edge alice_tp2{PartyId::alice(), PartyId::tp2()}, tp2_bob{PartyId::tp2(), PartyId::bob()};
    EXPECT_THROW(with(AttackKind::EntanglementSwap, PartyId::eve(), tp1_alice).validate(), InvalidInput);
    EXPECT_THROW(with(AttackKind::CorrelationElicitation, PartyId::tp2(), tp1_alice).validate(), InvalidInput);
    EXPECT_THROW(with(AttackKind::CorrelationElicitation, PartyId::eve(), tp1_bob).validate(), InvalidInput);
    EXPECT_THROW(with(AttackKind::InterceptResend, PartyId::tp1(), tp1_alice).validate(), InvalidInput);
    EXPECT_THROW(with(AttackKind::InterceptResend, PartyId::eve(), alice_tp2).validate(), InvalidInput);
    EXPECT_NO_THROW(with(AttackKind::InterceptResend, PartyId::tp2(), tp1_bob).validate());
    EXPECT_THROW(with(AttackKind::DenseCoding, PartyId::eve(), tp1_bob).validate(), InvalidInput);
    EXPECT_THROW(with(AttackKind::TrojanHorse, PartyId::eve(), tp2_bob).validate(), InvalidInput);
    EXPECT_THROW(with(AttackKind::Modification, PartyId::eve(), tp1_alice).validate(), InvalidInput);
    EXPECT_NO_THROW(with(AttackKind::Modification, PartyId::tp1(), tp2_bob).validate());
    auto aware = with(AttackKind::Modification, PartyId::eve(), alice_tp2);
    aware.strategy = ModificationStrategy::Tp2DecoyAware;
    EXPECT_THROW(aware.validate(), InvalidInput);
    aware.actor = PartyId::tp2();
    EXPECT_NO_THROW(aware.validate());
    auto em = AttackSpec::defaults(AttackKind::EntangleMeasure);
    em.unitary = "rotations";
    em.angles.assign(14, 0.1);
    EXPECT_THROW(em.validate(), InvalidInput);
    em.unitary = "toffoli";
    EXPECT_THROW(em.validate(), InvalidInput);
    EXPECT_THROW(AttackSpec::defaults(AttackKind::EntanglementSwap).validate(3), InvalidInput);
    auto far = with(AttackKind::InterceptResend, PartyId::eve(), {PartyId::tp1(), PartyId::participant(5)});
    EXPECT_THROW(far.validate(3), InvalidInput);
    EXPECT_NO_THROW(far.validate(5));
}

TEST(Oracles, ClosedFormsAgreeWithBruteForce) {
    EXPECT_NEAR(1.0 - oracle::intercept_resend_pass(), 0.25, 1e-12);
    EXPECT_NEAR(oracle::dense_coding_decoy_detection(), 0.5, 1e-12);
    EXPECT_NEAR(oracle::swap_pass_probability(), 0.5, 1e-12);
    EXPECT_NEAR(oracle::random_pauli_disturbance(), random_pauli_decoy_detection(), 1e-12);
    EXPECT_NEAR(random_pauli_decoy_detection(), 0.5, 1e-12);
    const auto ce = oracle::ce_decoy_error();
    EXPECT_NEAR((ce[0] + ce[1] + ce[2] + ce[3]) / 4.0, 0.25, 1e-12);
    for (std::size_t n : {1u, 5u, 10u, 20u}) {
        const double nn = static_cast<double>(n);
        EXPECT_NEAR(analytic_detection(AttackSpec::defaults(AttackKind::InterceptResend), n, 0),
                    1.0 - std::pow(oracle::intercept_resend_pass(), nn), 1e-12);
        EXPECT_NEAR(analytic_detection(AttackSpec::defaults(AttackKind::CorrelationElicitation), n, 0),
                    1.0 - std::pow(1.0 - (ce[0] + ce[1] + ce[2] + ce[3]) / 4.0, nn), 1e-12);
        EXPECT_NEAR(analytic_detection(AttackSpec::defaults(AttackKind::DenseCoding), n, 0),
                    1.0 - std::pow(1.0 - oracle::dense_coding_decoy_detection(), nn), 1e-12);
        EXPECT_NEAR(analytic_detection(AttackSpec::defaults(AttackKind::EntanglementSwap), 0, n),
                    1.0 - std::pow(oracle::swap_pass_probability(), nn), 1e-12);
    }
    EXPECT_THROW(analytic_detection(AttackSpec::defaults(AttackKind::EntangleMeasure), 5, 3), InvalidInput);
    EXPECT_NEAR(modification_detection(ModificationStrategy::SingleSlot, 6, 10), 6.0 / 16.0 * 0.5, 1e-12);
    EXPECT_NEAR(modification_detection(ModificationStrategy::AllSlots, 3, 10), 0.875, 1e-12);
    EXPECT_EQ(modification_detection(ModificationStrategy::Tp2DecoyAware, 3, 10), 0.0);
}

TEST(Oracles, PauliDisturbanceTable) {
    // Z flips |+>/|->, X flips |0>/|1>, iY flips all, I flips none.
    const double expect[4][4] = {{0, 0, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}, {1, 1, 1, 1}};
    const PauliCode ps[] = {PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::iY};
    for (int p = 0; p < 4; ++p)
        for (int s = 0; s < 4; ++s) EXPECT_NEAR(pauli_disturbance(ps[p], kDecoyStates[s]), expect[p][s], 1e-12);
}

TEST(Oracles, StepOfEachAttack) {
    EXPECT_EQ(oracle_step(AttackSpec::defaults(AttackKind::InterceptResend)), 2u);
    EXPECT_EQ(oracle_step(AttackSpec::defaults(AttackKind::EntanglementSwap)), 3u);
    auto mod = AttackSpec::defaults(AttackKind::Modification);
    EXPECT_EQ(oracle_step(mod), 5u);
    mod.target_edge = {PartyId::tp2(), PartyId::bob()};
    EXPECT_EQ(oracle_step(mod), 7u);
}

TEST(InterceptResend, PerDecoyErrorMatchesOracle) {
    std::size_t wrong = 0, total = 0, matched_wrong = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        InterceptResend ir(PartyId::eve(), {PartyId::tp1(), PartyId::alice()});
        qee::Run run(s, Topology::two_party(), &ir);
        const auto o = run_establishment(run, config(10, 10));
        for (const auto& e : o.decoy_log) {
            if (e.holder != PartyId::alice()) continue;
            ++total;
            wrong += !e.pass;
            if (ir.bases()[e.position] == e.basis) matched_wrong += !e.pass;
        }
    }
    const double p = 1.0 - oracle::intercept_resend_pass();
    EXPECT_NEAR(static_cast<double>(wrong) / total, p, oracle::sigma3(p, total));
    EXPECT_EQ(matched_wrong, 0u);
}

TEST(InterceptResend, DetectionRatesAcrossDecoyCounts) {
    for (std::size_t n : {1u, 5u, 10u, 20u}) {
        const auto spec = AttackSpec::defaults(AttackKind::InterceptResend);
        const double p = analytic_detection(spec, n, 0);
        EXPECT_NEAR(establishment_rate(spec, config(10, n), 2000, 100 * n), p, oracle::sigma3(p, 2000)) << n;
    }
}

TEST(InterceptResend, AsTp2ItPassesTheEntanglementCheck) {
    auto spec = AttackSpec::defaults(AttackKind::InterceptResend);
    spec.actor = PartyId::tp2();
    for (std::uint64_t s = 0; s < 300; ++s) {
        auto adv = make_adversary(spec);
        qee::Run run(s, Topology::two_party(), adv.get());
        const auto o = run_establishment(run, config(10, 0));
        EXPECT_TRUE(o.established());
    }
}

TEST(EntanglementSwap, OutcomesUniformAndChecksDeterministic) {
    std::vector<std::size_t> outcome_counts(4, 0);
    std::size_t entries = 0, passed = 0;
    for (std::uint64_t s = 0; s < 1500; ++s) {
        EntanglementSwap sw;
        qee::Run run(s, Topology::two_party(), &sw);
        const auto o = run_establishment(run, config(10, 4));
        for (const auto& e : o.check_log) {
            const auto b = sw.projected(e.position);
            ASSERT_TRUE(b.has_value());
            ++outcome_counts[static_cast<int>(*b)];
            const double eq = oracle::equality_pass(static_cast<int>(*b), e.basis == Basis::X);
            EXPECT_EQ(e.pass, eq > 0.5);
            ++entries;
            passed += e.pass;
        }
    }
    const auto dist = oracle::swap_outcome_distribution();
    EXPECT_TRUE(testutil::chi2_consistent(outcome_counts, std::vector<double>(dist.begin(), dist.end())));
    const double p = oracle::swap_pass_probability();
    EXPECT_NEAR(static_cast<double>(passed) / entries, p, oracle::sigma3(p, entries));
}

TEST(EntanglementSwap, DetectionAcrossCheckCounts) {
    const auto spec = AttackSpec::defaults(AttackKind::EntanglementSwap);
    for (double f : {0.1, 0.3, 0.5}) {
        const auto cfg = config(10, 3, f);
        const double p = analytic_detection(spec, cfg.n_decoys, cfg.checked_count());
        EXPECT_NEAR(establishment_rate(spec, cfg, 2000, 7), p, oracle::sigma3(p, 2000)) << f;
    }
}

TEST(EntanglementSwap, VariableStateIsNeverCaught) {
    auto spec = AttackSpec::defaults(AttackKind::EntanglementSwap);
    spec.variable_state = true;
    EXPECT_EQ(establishment_rate(spec, config(10, 5, 0.5), 500, 9), 0.0);
}

TEST(EntanglementSwap, KeptHalvesAreEntangledWithSharedPairs) {
    EntanglementSwap sw;
    qee::Run run(3, Topology::two_party(), &sw);
    auto cfg = config(4, 0);
    cfg.entanglement_check = false;
    const auto o = run_establishment(run, cfg);
    ASSERT_TRUE(o.established());
    for (std::size_t j = 0; j < 4; ++j) {
        // Alice and Bob hold halves of two different pairs: product of maximally mixed states.
        const auto g = o.group(j);
        const auto rho = run.system().reduced_density(g);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(rho.at(r, c)), r == c ? 0.25 : 0.0, 1e-12);
    }
}

TEST(CorrelationElicitation, DecoyErrorsOnlyInX) {
    const auto err = oracle::ce_decoy_error();
    std::size_t z_wrong = 0, x_wrong = 0, x_total = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        CorrelationElicitation ce;
        qee::Run run(s, Topology::two_party(), &ce);
        const auto o = run_establishment(run, config(10, 10));
        for (const auto& e : o.decoy_log) {
            if (e.holder != PartyId::bob()) continue;
            if (e.basis == Basis::Z) z_wrong += !e.pass;
            else {
                ++x_total;
                x_wrong += !e.pass;
            }
        }
    }
    EXPECT_EQ(err[0] + err[1], 0.0);
    EXPECT_EQ(z_wrong, 0u);
    const double p = (err[2] + err[3]) / 2.0;
    EXPECT_NEAR(static_cast<double>(x_wrong) / x_total, p, oracle::sigma3(p, x_total));
}

TEST(CorrelationElicitation, DetectionAcrossDecoyCounts) {
    for (std::size_t n : {1u, 5u, 10u, 20u}) {
        const auto spec = AttackSpec::defaults(AttackKind::CorrelationElicitation);
        const double p = analytic_detection(spec, n, 0);
        EXPECT_NEAR(qsdc_rate(spec, config(10, n), 16, 2000, 31 * n), p, oracle::sigma3(p, 2000)) << n;
    }
}

TEST(CorrelationElicitation, AncillaTableMatchesBruteForce) {
    const auto table = oracle::ce_ancilla_table();
    // Phi-type messages (I, Z) leave the ancilla at 0; Psi-type (X, iY) at 1.
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(table[k][k >= 2 ? 1 : 0], 1.0, 1e-12);
    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        CorrelationElicitation ce;
        qee::Run run(rng.next_u64(), Topology::two_party(), &ce);
        IdealMac mac;
        const auto m = Message::random(10, rng);
        const auto o = run_qsdc(run, config(10, 0), m, mac);
        ASSERT_EQ(o.status, QsdcStatus::Delivered);
        const auto& anc = ce.report().ancilla_outcomes;
        ASSERT_EQ(anc.size(), m.pairs());
        for (std::size_t i = 0; i < m.pairs(); ++i) EXPECT_EQ(anc[i], m.bits[2 * i]);
    }
}

TEST(DenseCoding, PerDecoyErrorAndDetection) {
    std::size_t wrong = 0, total = 0;
    for (std::uint64_t s = 0; s < 300; ++s) {
        DenseCodingAttack dc;
        qee::Run run(s, Topology::two_party(), &dc);
        const auto o = run_establishment(run, config(10, 10));
        for (const auto& e : o.decoy_log) {
            if (e.holder != PartyId::alice()) continue;
            ++total;
            wrong += !e.pass;
        }
    }
    const double p = oracle::dense_coding_decoy_detection();
    EXPECT_NEAR(static_cast<double>(wrong) / total, p, oracle::sigma3(p, total));
    for (std::size_t n : {1u, 5u, 10u, 20u}) {
        const auto spec = AttackSpec::defaults(AttackKind::DenseCoding);
        const double q = analytic_detection(spec, n, 0);
        EXPECT_NEAR(qsdc_rate(spec, config(10, n), 16, 2000, 13 * n), q, oracle::sigma3(q, 2000)) << n;
    }
}

TEST(Modification, RatesMatchEnumeration) {
    struct Case {
        ModificationStrategy strategy;
        Edge edge;
        std::size_t n;
    };
    const Case cases[] = {{ModificationStrategy::AllSlots, {PartyId::alice(), PartyId::tp2()}, 1},
                          {ModificationStrategy::AllSlots, {PartyId::tp2(), PartyId::bob()}, 3},
                          {ModificationStrategy::SingleSlot, {PartyId::alice(), PartyId::tp2()}, 5},
                          {ModificationStrategy::SingleSlot, {PartyId::tp2(), PartyId::bob()}, 10}};
    const std::size_t bits = 8, trials = 3000;
    for (const auto& c : cases) {
        auto spec = AttackSpec::defaults(AttackKind::Modification);
        spec.strategy = c.strategy;
        spec.target_edge = c.edge;
        const double p = modification_detection(c.strategy, c.n, bits / 2);
        EXPECT_NEAR(qsdc_rate(spec, config(10, c.n), bits, trials, 3 + c.n), p, oracle::sigma3(p, trials))
            << to_string(c.strategy) << ' ' << c.n;
    }
}

TEST(Modification, DecoyAwareTp2IsCaughtOnlyByTheMac) {
    auto spec = AttackSpec::defaults(AttackKind::Modification);
    spec.actor = PartyId::tp2();
    spec.strategy = ModificationStrategy::Tp2DecoyAware;
    Rng rng(21);
    std::size_t rejected = 0;
    for (int t = 0; t < 300; ++t) {
        auto adv = make_adversary(spec);
        auto* mod = dynamic_cast<Modification*>(adv.get());
        qee::Run run(rng.next_u64(), Topology::two_party(), adv.get());
        IdealMac mac;
        const auto m = Message::random(8, rng);
        const auto o = run_qsdc(run, config(10, 10), m, mac);
        ASSERT_TRUE(o.passed_discussions());
        bool any = false;
        for (const auto& [slot, p] : mod->applied()) any = any || p != PauliCode::I;
        EXPECT_EQ(o.status == QsdcStatus::MacRejected, any);
        rejected += o.status == QsdcStatus::MacRejected;
    }
    EXPECT_GT(rejected, 250u);
}

TEST(TrojanHorse, FiltersCatchEveryRun) {
    for (auto kind : {TrojanKind::InvisiblePhoton, TrojanKind::DelayPhoton}) {
        for (std::uint64_t s = 0; s < 50; ++s) {
            TrojanHorse th(kind);
            qee::Run run(s, Topology::two_party(), &th);
            const auto o = run_establishment(run, config(10, 10));
            EXPECT_EQ(o.status, EstablishmentStatus::AbortedStep2);
            EXPECT_EQ(o.detected_by, PartyId::alice());
            EXPECT_TRUE(th.report().detected);
        }
    }
}

TEST(TrojanHorse, WithoutFiltersTagsLeakOut) {
    Rng rng(22);
    for (int t = 0; t < 50; ++t) {
        TrojanHorse th(TrojanKind::InvisiblePhoton);
        qee::Run run(rng.next_u64(), Topology::two_party(), &th);
        IdealMac mac;
        auto cfg = config(10, 4);
        cfg.trojan_filters = false;
        const auto m = Message::random(8, rng);
        const auto o = run_qsdc(run, cfg, m, mac);
        EXPECT_EQ(o.status, QsdcStatus::Delivered);
        EXPECT_TRUE(th.report().leakage_flag);
        EXPECT_FALSE(th.report().detected);
    }
}

TEST(EntangleMeasure, CnotDetectionMatchesProfile) {
    const auto prof = profile_probe(gates::cnot(), state_vector(StateLabel::Zero));
    std::size_t wrong = 0, total = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        EntangleMeasure em(PartyId::eve(), {PartyId::tp1(), PartyId::alice()}, gates::cnot());
        qee::Run run(s, Topology::two_party(), &em);
        const auto o = run_establishment(run, config(10, 10));
        for (const auto& e : o.decoy_log) {
            if (e.holder != PartyId::alice()) continue;
            ++total;
            wrong += !e.pass;
        }
    }
    const double p = prof.detection_per_decoy;
    EXPECT_NEAR(static_cast<double>(wrong) / total, p, oracle::sigma3(p, total));
}

TEST(EntangleMeasure, HaarProbesMatchTheirProfiles) {
    for (std::uint64_t useed : {1u, 2u, 3u}) {
        auto spec = AttackSpec::defaults(AttackKind::EntangleMeasure);
        spec.unitary = "haar";
        spec.unitary_seed = useed;
        const auto prof = profile_probe(spec.probe_unitary(), state_vector(StateLabel::Zero));
        std::size_t wrong = 0, total = 0;
        for (std::uint64_t s = 0; s < 300; ++s) {
            auto adv = make_adversary(spec);
            qee::Run run(s, Topology::two_party(), adv.get());
            const auto o = run_establishment(run, config(10, 10));
            for (const auto& e : o.decoy_log) {
                if (e.holder != PartyId::alice()) continue;
                ++total;
                wrong += !e.pass;
            }
        }
        const double p = prof.detection_per_decoy;
        EXPECT_NEAR(static_cast<double>(wrong) / total, p, oracle::sigma3(p, total)) << useed;
    }
}

TEST(EntangleMeasure, IdentityIsHarmlessAndLearnsNothing) {
    auto spec = AttackSpec::defaults(AttackKind::EntangleMeasure);
    spec.unitary = "identity";
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto adv = make_adversary(spec);
        qee::Run run(s, Topology::two_party(), adv.get());
        EXPECT_TRUE(run_establishment(run, config(10, 10)).established());
        for (auto b : adv->report().ancilla_outcomes) EXPECT_EQ(b, 0u);
        EXPECT_EQ(adv->report().ancilla_outcomes.size(), 20u);
    }
}

TEST(EntangleMeasure, NonUnitaryRejected) {
    Mat4 bad = identity_matrix<4>();
    bad[0] = 2.0;
    EXPECT_THROW(EntangleMeasure(PartyId::eve(), {PartyId::tp1(), PartyId::alice()}, bad), InvalidInput);
}

}  // namespace
