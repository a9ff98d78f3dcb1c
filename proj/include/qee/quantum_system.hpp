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
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qee/linalg.hpp"
#include "qee/rng.hpp"
#include "qee/state_vector.hpp"
#include "qee/types.hpp"

namespace qee {

/// The quantum state of one simulation run.
///
/// The state is kept as a product of independent dense StateVector factors.
/// A fresh qubit or EPR pair starts as its own factor; a two-qubit gate merges
/// the factors of its operands; a measurement splits the measured qubit back
/// out (it is in a product state after collapse). Registers therefore stay at
/// the size of the largest entangled cluster (a pair plus a few ancillas)
/// regardless of sequence length.
///
/// Measurement is projective and non-destructive; `discard` is the explicit
/// destructive step and invalidates the handle.
class QuantumSystem {
   public:
    QubitRef prepare_single(StateLabel label) { return prepare_state(state_vector(label)); }

    QubitRef prepare_single(std::string_view label) { return prepare_single(parse_state_label(label)); }

    /// Arbitrary normalized single-qubit state.
    QubitRef prepare_state(const Vec2& psi) {
        const double n = std::norm(psi[0]) + std::norm(psi[1]);
        if (std::abs(n - 1.0) > 1e-10) {
            throw InvalidInput("single-qubit state is not normalized");
        }
        const QubitRef q = issue();
        add_factor(StateVector::single(q, psi));
        return q;
    }

    /// (|00> + |11>)/sqrt(2).
    std::pair<QubitRef, QubitRef> prepare_epr_pair() {
        const auto qs = prepare_ghz(2);
        return {qs[0], qs[1]};
    }

    /// (|0...0> + |1...1>)/sqrt(2) over n >= 2 fresh qubits.
    std::vector<QubitRef> prepare_ghz(std::size_t n) {
        if (n < 2) {
            throw InvalidInput("GHZ state needs at least 2 qubits");
        }
        if (n > 20) {
            throw InvalidInput("GHZ state too large for a dense factor");
        }
        std::vector<QubitRef> qs;
        qs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            qs.push_back(issue());
        }
        std::vector<cplx> amps(std::size_t{1} << n);
        amps.front() = kInvSqrt2;
        amps.back() = kInvSqrt2;
        add_factor(StateVector(qs, std::move(amps)));
        return qs;
    }

    void apply_pauli(QubitRef q, PauliCode p) { apply_gate(q, gates::pauli(p)); }

    void apply_hadamard(QubitRef q) { apply_gate(q, gates::hadamard()); }

    void apply_gate(QubitRef q, const Mat2& m) {
        auto& [fid, f] = locate(q);
        f.apply_1q(*f.position_of(q), m);
    }

    void apply_cnot(QubitRef control, QubitRef target) { apply_gate(control, target, gates::cnot()); }

    /// Two-qubit gate; `first` is the most significant qubit of `m`.
    void apply_gate(QubitRef first, QubitRef second, const Mat4& m) {
        if (first == second) {
            throw InvalidInput("two-qubit gate applied to the same qubit twice");
        }
        StateVector& f = merge(first, second);
        f.apply_2q(*f.position_of(first), *f.position_of(second), m);
    }

    /// Born-rule measurement in `basis`. The qubit stays live, left in the
    /// eigenstate of the outcome. Always draws exactly one uniform from `rng`.
    MeasurementOutcome measure(QubitRef q, Basis basis, Rng& rng) {
        const std::uint64_t fid = factor_of(q);
        StateVector& f = factors_.at(fid);
        const std::size_t pos = *f.position_of(q);
        if (basis == Basis::X) {
            f.apply_1q(pos, gates::hadamard());
        }
        double p1 = f.probability_one(pos);
        if (p1 < kSnap) {
            p1 = 0.0;
        } else if (p1 > 1.0 - kSnap) {
            p1 = 1.0;
        }
        const std::uint8_t bit = rng.uniform() < p1 ? 1 : 0;
        f.collapse(pos, bit);
        if (f.qubit_count() > 1) {
            StateVector single = f.split_out(pos, bit);
            if (basis == Basis::X) {
                single.apply_1q(0, gates::hadamard());
            }
            add_factor(std::move(single));
        } else if (basis == Basis::X) {
            f.apply_1q(pos, gates::hadamard());
        }
        return {basis, bit};
    }

    /// Bell-basis measurement; leaves the pair in the observed Bell state.
    BellOutcome bell_measure(QubitRef first, QubitRef second, Rng& rng) {
        if (first == second) {
            throw InvalidInput("Bell measurement needs two distinct qubits");
        }
        apply_cnot(first, second);
        apply_hadamard(first);
        const std::uint8_t phase = measure(first, Basis::Z, rng).bit;
        const std::uint8_t parity = measure(second, Basis::Z, rng).bit;
        apply_hadamard(first);
        apply_cnot(first, second);
        return static_cast<BellOutcome>((parity << 1) | phase);
    }

    /// Destroys the qubit. An entangled qubit is first measured in Z, which is
    /// what tracing it out looks like to everyone else.
    void discard(QubitRef q, Rng& rng) {
        std::uint64_t fid = factor_of(q);
        if (factors_.at(fid).qubit_count() > 1) {
            measure(q, Basis::Z, rng);
            fid = factor_of(q);
        }
        factors_.erase(fid);
        location_.erase(q.id);
    }

    bool is_live(QubitRef q) const { return location_.contains(q.id); }

    std::size_t live_qubits() const { return location_.size(); }
    std::size_t factor_count() const { return factors_.size(); }

    std::size_t largest_factor() const {
        std::size_t m = 0;
        for (const auto& [id, f] : factors_) {
            m = std::max(m, f.qubit_count());
        }
        return m;
    }

    /// Reduced density operator of `qubits`, qubits[0] most significant.
    DensityMatrix reduced_density(std::span<const QubitRef> qubits) const {
        // Gather the distinct factors involved (in first-appearance order) and
        // form their tensor product on a scratch copy.
        std::vector<std::uint64_t> fids;
        for (const auto& q : qubits) {
            const std::uint64_t fid = factor_of(q);
            if (std::find(fids.begin(), fids.end(), fid) == fids.end()) {
                fids.push_back(fid);
            }
        }
        StateVector joint;
        for (auto fid : fids) {
            joint = StateVector::tensor(joint, factors_.at(fid));
        }
        std::vector<std::size_t> positions;
        positions.reserve(qubits.size());
        for (const auto& q : qubits) {
            const auto pos = joint.position_of(q);
            if (std::find(positions.begin(), positions.end(), *pos) != positions.end()) {
                throw InvalidInput("qubit listed twice in reduced_density");
            }
            positions.push_back(*pos);
        }
        return joint.reduced_density(positions);
    }

    /// Fidelity <t| rho |t> of the reduced state of `qubits` with pure `target`.
    double fidelity(std::span<const QubitRef> qubits, std::span<const cplx> target) const {
        return reduced_density(qubits).expectation(target);
    }

    /// Largest |<psi|psi> - 1| over all factors.
    double max_norm_error() const {
        double e = 0.0;
        for (const auto& [id, f] : factors_) {
            e = std::max(e, std::abs(f.norm_squared() - 1.0));
        }
        return e;
    }

    /// The factor currently holding `q` (read-only view for diagnostics).
    const StateVector& factor(QubitRef q) const { return factors_.at(factor_of(q)); }

   private:
    static constexpr double kSnap = 1e-12;

    QubitRef issue() { return QubitRef{next_id_++}; }

    void add_factor(StateVector f) {
        const std::uint64_t fid = next_factor_++;
        for (const auto& q : f.qubits()) {
            location_[q.id] = fid;
        }
        factors_.emplace(fid, std::move(f));
    }

    std::uint64_t factor_of(QubitRef q) const {
        const auto it = location_.find(q.id);
        if (it != location_.end()) {
            return it->second;
        }
        if (q.id != 0 && q.id < next_id_) {
            throw QubitError("qubit " + std::to_string(q.id) + " was consumed");
        }
        throw QubitError("unknown qubit " + std::to_string(q.id));
    }

    std::pair<const std::uint64_t, StateVector>& locate(QubitRef q) {
        return *factors_.find(factor_of(q));
    }

    StateVector& merge(QubitRef a, QubitRef b) {
        const std::uint64_t fa = factor_of(a);
        const std::uint64_t fb = factor_of(b);
        if (fa == fb) {
            return factors_.at(fa);
        }
        StateVector joint = StateVector::tensor(factors_.at(fa), factors_.at(fb));
        factors_.erase(fa);
        factors_.erase(fb);
        add_factor(std::move(joint));
        return factors_.at(next_factor_ - 1);
    }

    std::uint64_t next_id_ = 1;
    std::uint64_t next_factor_ = 1;
    std::map<std::uint64_t, StateVector> factors_;
    std::unordered_map<std::uint64_t, std::uint64_t> location_;
};

/// Diagnostic result of `is_bell_product`.
struct BellProductCheck {
    bool product = false;
    double purity = 0.0;
    double fidelity = 0.0;
};

/// True iff the pair is in a pure state (purity 1 within 1e-9), hence in a
/// product with everything else, and that state is |Phi+> (fidelity >= 1-1e-9).
inline BellProductCheck is_bell_product(const QuantumSystem& sys, QubitRef first, QubitRef second) {
    const std::array<QubitRef, 2> pair = {first, second};
    const DensityMatrix rho = sys.reduced_density(pair);
    const Vec4 phi = bell_vector(BellOutcome::PhiPlus);
    BellProductCheck r;
    r.purity = rho.purity();
    r.fidelity = rho.expectation(phi);
    r.product = std::abs(r.purity - 1.0) <= 1e-9 && r.fidelity >= 1.0 - 1e-9;
    return r;
}

}  // namespace qee
