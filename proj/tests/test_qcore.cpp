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

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "qee/analysis.hpp"
#include "qee/quantum_system.hpp"
#include "test_util.hpp"

namespace {

using qee::Basis;
using qee::BellOutcome;
using qee::PauliCode;
using qee::QuantumSystem;
using qee::QubitRef;
using qee::Rng;
using qee::StateLabel;

std::vector<qee::cplx> as_vec(const oracle::Vec& v) { return {v.begin(), v.end()}; }

// --- Rng -------------------------------------------------------------------

TEST(Rng, SameSeedSameSequence) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitDependsOnSeedOnly) {
    Rng a(7);
    const auto before = a.split(3).next_u64();
    for (int i = 0; i < 10; ++i) a.next_u64();
    EXPECT_EQ(a.split(3).next_u64(), before);
    EXPECT_NE(a.split(3).next_u64(), a.split(4).next_u64());
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    Rng r(1);
    std::array<std::size_t, 5> counts{};
    for (int i = 0; i < 50000; ++i) {
        const auto v = r.below(5);
        ASSERT_LT(v, 5u);
        ++counts[v];
    }
    const std::array<double, 5> p{0.2, 0.2, 0.2, 0.2, 0.2};
    EXPECT_TRUE(testutil::chi2_consistent(counts, p));
}

TEST(Rng, UniformInUnitInterval) {
    Rng r(9);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 10000.0, 0.5, 0.015);
}

// --- prepare_single --------------------------------------------------------

TEST(PrepareSingle, PlusMeasuredInXIsPlus) {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        QuantumSystem sys;
        EXPECT_EQ(sys.measure(sys.prepare_single(StateLabel::Plus), Basis::X, rng).bit, 0);
    }
}

TEST(PrepareSingle, ZeroMeasuredInXIsFair) {
    Rng rng(2);
    std::array<std::size_t, 2> counts{};
    for (int i = 0; i < 10000; ++i) {
        QuantumSystem sys;
        ++counts[sys.measure(sys.prepare_single("0"), Basis::X, rng).bit];
    }
    const std::array<double, 2> p{0.5, 0.5};
    EXPECT_TRUE(testutil::chi2_consistent(counts, p));
}

TEST(PrepareSingle, OneMeasuredInZIsOne) {
    Rng rng(3);
    QuantumSystem sys;
    EXPECT_EQ(sys.measure(sys.prepare_single("1"), Basis::Z, rng).bit, 1);
}

TEST(PrepareSingle, UnknownLabelRejected) {
    QuantumSystem sys;
    EXPECT_THROW(sys.prepare_single("2"), qee::InvalidInput);
    EXPECT_THROW(sys.prepare_single("plus"), qee::InvalidInput);
    EXPECT_THROW(sys.prepare_state(qee::Vec2{1.0, 1.0}), qee::InvalidInput);
}

// --- EPR and GHZ -----------------------------------------------------------

TEST(Epr, BothBasesGiveEqualFairBits) {
    Rng rng(4);
    for (Basis b : {Basis::Z, Basis::X}) {
        std::array<std::size_t, 2> counts{};
        for (int i = 0; i < 4000; ++i) {
            QuantumSystem sys;
            const auto [a, c] = sys.prepare_epr_pair();
            const auto x = sys.measure(a, b, rng).bit;
            ASSERT_EQ(sys.measure(c, b, rng).bit, x);
            ++counts[x];
        }
        const std::array<double, 2> p{0.5, 0.5};
        EXPECT_TRUE(testutil::chi2_consistent(counts, p));
    }
}

TEST(Epr, FreshPairBellMeasuresPhiPlus) {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        EXPECT_EQ(sys.bell_measure(a, b, rng), BellOutcome::PhiPlus);
    }
}

TEST(Ghz, TwoQubitsMatchEpr) {
    QuantumSystem sys;
    const auto g = sys.prepare_ghz(2);
    EXPECT_LT(testutil::max_density_deviation(sys, g, as_vec(oracle::bell(0))), 1e-12);
}

TEST(Ghz, ThreeQubitsZAllEqual) {
    Rng rng(6);
    std::array<std::size_t, 2> counts{};
    for (int i = 0; i < 4000; ++i) {
        QuantumSystem sys;
        const auto g = sys.prepare_ghz(3);
        const auto a = sys.measure(g[0], Basis::Z, rng).bit;
        ASSERT_EQ(sys.measure(g[1], Basis::Z, rng).bit, a);
        ASSERT_EQ(sys.measure(g[2], Basis::Z, rng).bit, a);
        ++counts[a];
    }
    const std::array<double, 2> p{0.5, 0.5};
    EXPECT_TRUE(testutil::chi2_consistent(counts, p));
}

TEST(Ghz, ThreeQubitsXMatchesBruteForce) {
    const auto expected = oracle::outcome_distribution(oracle::ghz(3), {true, true, true});
    // Frozen from the oracle: even parity strings at 1/4, odd strings never.
    for (std::size_t i = 0; i < 8; ++i) {
        const bool even = (__builtin_popcount(static_cast<unsigned>(i)) % 2) == 0;
        EXPECT_NEAR(expected[i], even ? 0.25 : 0.0, 1e-12);
    }
    Rng rng(7);
    std::array<std::size_t, 8> counts{};
    for (int i = 0; i < 10000; ++i) {
        QuantumSystem sys;
        const auto g = sys.prepare_ghz(3);
        std::size_t idx = 0;
        for (auto q : g) idx = (idx << 1) | sys.measure(q, Basis::X, rng).bit;
        ++counts[idx];
    }
    EXPECT_TRUE(testutil::chi2_consistent(counts, expected));
}

TEST(Ghz, TooFewQubitsRejected) {
    QuantumSystem sys;
    EXPECT_THROW(sys.prepare_ghz(1), qee::InvalidInput);
    EXPECT_THROW(sys.prepare_ghz(0), qee::InvalidInput);
}

// --- Gates -----------------------------------------------------------------

TEST(ApplyPauli, EncodesBellStates) {
    const std::array<PauliCode, 4> codes{PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::iY};
    for (int k = 0; k < 4; ++k) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        sys.apply_pauli(a, codes[k]);
        const std::array<QubitRef, 2> pair{a, b};
        EXPECT_NEAR(sys.fidelity(pair, qee::bell_vector(static_cast<BellOutcome>(k))), 1.0, 1e-12);
        EXPECT_LT(testutil::max_density_deviation(sys, pair,
                                                  as_vec(oracle::apply1(oracle::bell(0), 0,
                                                                        oracle::message_paulis()[k]))),
                  1e-12);
    }
}

TEST(ApplyPauli, ZOnFirstGivesPhiMinusAndIYGivesPsiMinus) {
    QuantumSystem sys;
    const auto [a, b] = sys.prepare_epr_pair();
    sys.apply_pauli(a, PauliCode::Z);
    const std::array<QubitRef, 2> pair{a, b};
    EXPECT_NEAR(sys.fidelity(pair, qee::bell_vector(BellOutcome::PhiMinus)), 1.0, 1e-12);
    QuantumSystem s2;
    const auto [c, d] = s2.prepare_epr_pair();
    s2.apply_pauli(c, PauliCode::iY);
    const std::array<QubitRef, 2> p2{c, d};
    EXPECT_NEAR(s2.fidelity(p2, qee::bell_vector(BellOutcome::PsiMinus)), 1.0, 1e-12);
}

TEST(ApplyCnot, ExtendsEprToGhz) {
    QuantumSystem sys;
    const auto [a, b] = sys.prepare_epr_pair();
    const auto e = sys.prepare_single(StateLabel::Zero);
    sys.apply_cnot(b, e);
    const std::array<QubitRef, 3> all{a, b, e};
    EXPECT_LT(testutil::max_density_deviation(sys, all, as_vec(oracle::ghz(3))), 1e-12);
}

TEST(ApplyCnot, PlusControlMakesPhiPlusInXBasis) {
    QuantumSystem sys;
    const auto d = sys.prepare_single(StateLabel::Plus);
    const auto e = sys.prepare_single(StateLabel::Zero);
    sys.apply_cnot(d, e);
    const std::array<QubitRef, 2> pair{d, e};
    const auto expected = oracle::cnot(oracle::kron(oracle::single(2), oracle::single(0)), 0, 1);
    EXPECT_LT(testutil::max_density_deviation(sys, pair, as_vec(expected)), 1e-12);
    // (|++> + |-->)/sqrt(2) is the same vector.
    const auto pp = oracle::kron(oracle::single(2), oracle::single(2));
    const auto mm = oracle::kron(oracle::single(3), oracle::single(3));
    oracle::Vec sum(4);
    for (int i = 0; i < 4; ++i) sum[i] = (pp[i] + mm[i]) * oracle::kR;
    EXPECT_LT(testutil::max_density_deviation(sys, pair, as_vec(sum)), 1e-12);
}

TEST(ApplyCnot, ControlOffLeavesState) {
    QuantumSystem sys;
    const auto a = sys.prepare_single(StateLabel::Zero);
    const auto b = sys.prepare_single(StateLabel::Zero);
    sys.apply_cnot(a, b);
    const std::array<QubitRef, 2> pair{a, b};
    EXPECT_LT(testutil::max_density_deviation(sys, pair, as_vec(oracle::basis_state(2, 0))), 1e-12);
}

TEST(ApplyCnot, SameQubitAndConsumedRejected) {
    Rng rng(1);
    QuantumSystem sys;
    const auto a = sys.prepare_single(StateLabel::Zero);
    const auto b = sys.prepare_single(StateLabel::Zero);
    EXPECT_THROW(sys.apply_cnot(a, a), qee::InvalidInput);
    sys.discard(b, rng);
    EXPECT_THROW(sys.apply_cnot(a, b), qee::QubitError);
    EXPECT_THROW(sys.apply_pauli(b, PauliCode::X), qee::QubitError);
    EXPECT_THROW(sys.apply_pauli(QubitRef{999}, PauliCode::X), qee::QubitError);
}

// --- Measurement -----------------------------------------------------------

TEST(Measure, MinusInXIsOne) {
    Rng rng(8);
    QuantumSystem sys;
    EXPECT_EQ(sys.measure(sys.prepare_single(StateLabel::Minus), Basis::X, rng).bit, 1);
}

TEST(Measure, CollapsePropagatesToPartner) {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        const auto x = sys.measure(a, Basis::Z, rng).bit;
        EXPECT_EQ(sys.measure(b, Basis::Z, rng).bit, x);

        QuantumSystem s2;
        const auto [c, d] = s2.prepare_epr_pair();
        s2.apply_pauli(c, PauliCode::iY);
        const auto y = s2.measure(c, Basis::Z, rng).bit;
        EXPECT_EQ(s2.measure(d, Basis::Z, rng).bit, 1 - y);
    }
}

TEST(Measure, RepeatedMeasurementIsIdempotent) {
    Rng rng(10);
    for (int i = 0; i < 1000; ++i) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        const Basis basis = rng.coin() ? Basis::X : Basis::Z;
        const auto first = sys.measure(a, basis, rng).bit;
        EXPECT_EQ(sys.measure(a, basis, rng).bit, first);
        EXPECT_TRUE(sys.is_live(a));
    }
}

TEST(Measure, ConsumedRefRejected) {
    Rng rng(1);
    QuantumSystem sys;
    const auto a = sys.prepare_single(StateLabel::Zero);
    sys.discard(a, rng);
    EXPECT_THROW(sys.measure(a, Basis::Z, rng), qee::QubitError);
}

TEST(BellMeasure, SigmaXGivesPsiPlus) {
    Rng rng(11);
    QuantumSystem sys;
    const auto [a, b] = sys.prepare_epr_pair();
    sys.apply_pauli(a, PauliCode::X);
    EXPECT_EQ(sys.bell_measure(a, b, rng), BellOutcome::PsiPlus);
}

TEST(BellMeasure, SwapHalvesUniformAgainstBruteForce) {
    const auto expected = oracle::swap_outcome_distribution();
    for (double p : expected) EXPECT_NEAR(p, 0.25, 1e-12);
    Rng rng(12);
    std::array<std::size_t, 4> counts{};
    for (int i = 0; i < 10000; ++i) {
        QuantumSystem sys;
        const auto [t1, t2] = sys.prepare_epr_pair();
        const auto [t3, t4] = sys.prepare_epr_pair();
        const auto o = sys.bell_measure(t2, t4, rng);
        ++counts[static_cast<std::size_t>(o)];
        // The distributed halves are swapped into the same Bell state.
        const std::array<QubitRef, 2> pair{t1, t3};
        ASSERT_NEAR(sys.fidelity(pair, qee::bell_vector(o)), 1.0, 1e-10);
    }
    EXPECT_TRUE(testutil::chi2_consistent(counts, expected));
}

TEST(BellMeasure, SameQubitRejected) {
    Rng rng(1);
    QuantumSystem sys;
    const auto [a, b] = sys.prepare_epr_pair();
    EXPECT_THROW(sys.bell_measure(a, a, rng), qee::InvalidInput);
}

// --- is_bell_product -------------------------------------------------------

TEST(IsBellProduct, PhiPlusTimesAnything) {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        const double th = 3.14159 * rng.uniform(), ph = 6.28318 * rng.uniform();
        const auto e = sys.prepare_state(qee::Vec2{std::cos(th / 2), std::polar(std::sin(th / 2), ph)});
        sys.apply_gate(e, sys.prepare_single(StateLabel::Plus), qee::gates::cnot());
        const auto r = qee::is_bell_product(sys, a, b);
        EXPECT_TRUE(r.product);
        EXPECT_NEAR(r.purity, 1.0, 1e-12);
    }
}

TEST(IsBellProduct, GhzPairIsMixed) {
    const double expected = oracle::purity(oracle::reduced(oracle::ghz(3), {0, 1}));
    EXPECT_NEAR(expected, 0.5, 1e-12);
    QuantumSystem sys;
    const auto g = sys.prepare_ghz(3);
    const auto r = qee::is_bell_product(sys, g[0], g[1]);
    EXPECT_FALSE(r.product);
    EXPECT_NEAR(r.purity, expected, 1e-12);
}

TEST(IsBellProduct, OtherBellStatesFail) {
    for (auto p : {PauliCode::Z, PauliCode::X, PauliCode::iY}) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        sys.apply_pauli(a, p);
        const auto r = qee::is_bell_product(sys, a, b);
        EXPECT_FALSE(r.product);
        EXPECT_NEAR(r.purity, 1.0, 1e-12);
        EXPECT_NEAR(r.fidelity, 0.0, 1e-12);
    }
}

// --- attempt_clone_unitary -------------------------------------------------

TEST(CloneUnitary, CnotClonesZButNotX) {
    const auto f = qee::clone_fidelities(qee::gates::cnot(), qee::state_vector(StateLabel::Zero));
    for (int s = 0; s < 4; ++s) EXPECT_NEAR(f[s], oracle::cnot_clone_fidelity(s), 1e-12);
    EXPECT_NEAR(f[0], 1.0, 1e-12);
    EXPECT_NEAR(f[1], 1.0, 1e-12);
    EXPECT_NEAR(f[2], 0.5, 1e-12);
    EXPECT_NEAR(f[3], 0.0, 1e-12);
}

TEST(CloneUnitary, IdentityNeverClonesAll) {
    for (auto blank : qee::kDecoyStates) {
        const auto f = qee::clone_fidelities(qee::identity_matrix<4>(), qee::state_vector(blank));
        double lo = 1.0;
        for (int s = 0; s < 4; ++s) {
            const double overlap = std::norm(qee::inner<2>(qee::state_vector(blank), qee::state_vector(qee::kDecoyStates[s])));
            EXPECT_NEAR(f[s], overlap, 1e-12);
            lo = std::min(lo, f[s]);
        }
        EXPECT_LT(lo, 1.0 - 1e-3);
    }
}

TEST(CloneUnitary, RandomUnitariesNeverClone) {
    Rng rng(14);
    double best = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const auto f = qee::clone_fidelities(qee::haar_unitary4(rng), qee::state_vector(StateLabel::Zero));
        best = std::max(best, std::min({f[0], f[1], f[2], f[3]}));
    }
    EXPECT_LT(best, 1.0 - 1e-3);
}

TEST(CloneUnitary, NonUnitaryRejected) {
    qee::Mat4 m = qee::gates::cnot();
    m[0] = 2.0;
    EXPECT_THROW(qee::clone_fidelities(m, qee::state_vector(StateLabel::Zero)), qee::InvalidInput);
}

// --- Properties ------------------------------------------------------------

TEST(Property, NormPreservedUnderRandomCircuits) {
    Rng rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        QuantumSystem sys;
        std::vector<QubitRef> qs;
        for (int i = 0; i < 6; ++i) qs.push_back(sys.prepare_single(qee::kDecoyStates[rng.below(4)]));
        for (int step = 0; step < 40; ++step) {
            const auto a = qs[rng.below(qs.size())];
            switch (rng.below(5)) {
                case 0: sys.apply_pauli(a, static_cast<PauliCode>(rng.below(4))); break;
                case 1: sys.apply_hadamard(a); break;
                case 2: {
                    const auto b = qs[rng.below(qs.size())];
                    if (!(a == b)) sys.apply_cnot(a, b);
                    break;
                }
                case 3: sys.measure(a, rng.coin() ? Basis::X : Basis::Z, rng); break;
                default: {
                    const auto b = qs[rng.below(qs.size())];
                    if (!(a == b)) sys.apply_gate(a, b, qee::haar_unitary4(rng));
                }
            }
            ASSERT_LT(sys.max_norm_error(), 1e-10);
        }
    }
}

TEST(Property, EprSameBasisNeverDisagrees) {
    Rng rng(16);
    std::size_t unequal = 0;
    for (int i = 0; i < 10000; ++i) {
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        const Basis basis = (i % 2) ? Basis::X : Basis::Z;
        unequal += sys.measure(a, basis, rng).bit != sys.measure(b, basis, rng).bit;
    }
    EXPECT_EQ(unequal, 0u);
}

TEST(Property, DenseCodingBijectionExhaustive) {
    Rng rng(17);
    for (auto p : {PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::iY}) {
        for (int rep = 0; rep < 50; ++rep) {
            QuantumSystem sys;
            const auto [a, b] = sys.prepare_epr_pair();
            sys.apply_pauli(a, p);
            ASSERT_EQ(sys.bell_measure(a, b, rng), qee::bell_for_pauli(p));
        }
    }
    EXPECT_EQ(qee::pauli_for_bits(0, 0), PauliCode::I);
    EXPECT_EQ(qee::pauli_for_bits(0, 1), PauliCode::Z);
    EXPECT_EQ(qee::pauli_for_bits(1, 0), PauliCode::X);
    EXPECT_EQ(qee::pauli_for_bits(1, 1), PauliCode::iY);
}

TEST(Property, DoubleCnotAncillaTable) {
    const auto table = oracle::ce_ancilla_table();
    const std::array<PauliCode, 4> codes{PauliCode::I, PauliCode::Z, PauliCode::X, PauliCode::iY};
    for (int k = 0; k < 4; ++k) {
        const bool psi = k >= 2;
        EXPECT_NEAR(table[k][psi ? 1 : 0], 1.0, 1e-12);

        // Encoded pair first, then both CNOTs on a fresh ancilla.
        QuantumSystem sys;
        const auto [a, b] = sys.prepare_epr_pair();
        sys.apply_pauli(a, codes[k]);
        const auto e = sys.prepare_single(StateLabel::Zero);
        sys.apply_cnot(a, e);
        sys.apply_cnot(b, e);
        const std::array<QubitRef, 1> anc{e};
        const auto rho = sys.reduced_density(anc);
        EXPECT_NEAR(rho.at(psi ? 1 : 0, psi ? 1 : 0).real(), 1.0, 1e-10);
        EXPECT_LT(std::abs(rho.at(0, 1)), 1e-10);
        // and the pair is untouched
        const std::array<QubitRef, 2> pair{a, b};
        EXPECT_NEAR(sys.fidelity(pair, qee::bell_vector(static_cast<BellOutcome>(k))), 1.0, 1e-10);
    }
}

TEST(Property, NoSignaling) {
    Rng rng(18);
    const std::array<double, 2> fair{0.5, 0.5};
    auto local_ops = std::vector<std::function<void(QuantumSystem&, QubitRef)>>{
        [](QuantumSystem&, QubitRef) {},
        [](QuantumSystem& s, QubitRef q) { s.apply_pauli(q, PauliCode::X); },
        [](QuantumSystem& s, QubitRef q) { s.apply_hadamard(q); },
        [&](QuantumSystem& s, QubitRef q) { s.measure(q, Basis::X, rng); },
    };
    for (auto& op : local_ops) {
        for (Basis basis : {Basis::Z, Basis::X}) {
            std::array<std::size_t, 2> counts{};
            for (int i = 0; i < 10000; ++i) {
                QuantumSystem sys;
                const auto [a, b] = sys.prepare_epr_pair();
                op(sys, a);
                ++counts[sys.measure(b, basis, rng).bit];
            }
            EXPECT_TRUE(testutil::chi2_consistent(counts, fair));
        }
    }
}

TEST(Property, ReducedStatesAgreeWithBruteForce) {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        QuantumSystem sys;
        const auto g = sys.prepare_ghz(3);
        oracle::Vec ref = oracle::ghz(3);
        for (int step = 0; step < 6; ++step) {
            const std::size_t q = rng.below(3);
            const auto p = static_cast<PauliCode>(rng.below(4));
            sys.apply_pauli(g[q], p);
            ref = oracle::apply1(ref, q, oracle::message_paulis()[static_cast<std::size_t>(p)]);
            const std::size_t t = rng.below(3);
            if (t != q) {
                sys.apply_cnot(g[q], g[t]);
                ref = oracle::cnot(ref, q, t);
            }
        }
        EXPECT_LT(testutil::max_density_deviation(sys, g, as_vec(ref)), 1e-10);
    }
}

}  // namespace
