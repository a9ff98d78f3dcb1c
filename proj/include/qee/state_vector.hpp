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
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qee/linalg.hpp"
#include "qee/types.hpp"

namespace qee {

/// Dense density operator over k qubits (textbook ordering).
class DensityMatrix {
   public:
    explicit DensityMatrix(std::size_t qubits)
        : qubits_(qubits), dim_(std::size_t{1} << qubits), data_(dim_ * dim_) {}

    std::size_t qubits() const noexcept { return qubits_; }
    std::size_t dim() const noexcept { return dim_; }

    cplx& at(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            t += at(i, i).real();
        }
        return t;
    }

    /// tr(rho^2).
    double purity() const {
        double p = 0.0;
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                p += std::norm(at(r, c));
            }
        }
        return p;
    }

    /// <psi| rho |psi>, the fidelity of rho with a pure state.
    double expectation(std::span<const cplx> psi) const {
        if (psi.size() != dim_) {
            throw InvalidInput("target state dimension does not match density matrix");
        }
        cplx s{};
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) {
                s += std::conj(psi[r]) * at(r, c) * psi[c];
            }
        }
        return s.real();
    }

   private:
    std::size_t qubits_;
    std::size_t dim_;
    std::vector<cplx> data_;
};

/// Trace distance between two single-qubit density matrices.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw InvalidInput("trace_distance is defined here for single qubits only");
    }
    // rho - sigma is traceless Hermitian with eigenvalues +-sqrt(d00^2 + |d01|^2).
    const double d00 = (a.at(0, 0) - b.at(0, 0)).real();
    const cplx d01 = a.at(0, 1) - b.at(0, 1);
    return std::sqrt(d00 * d00 + std::norm(d01));
}

/// One tensor factor of a run's quantum state: a dense amplitude vector over
/// an ordered list of qubits. Internally qubit at position p is bit p of the
/// amplitude index.
class StateVector {
   public:
    StateVector() : amplitudes_{cplx{1.0}} {}

    StateVector(std::vector<QubitRef> qubits, std::vector<cplx> amplitudes)
        : qubits_(std::move(qubits)), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != (std::size_t{1} << qubits_.size())) {
            throw InvalidInput("amplitude count must be 2^n");
        }
    }

    static StateVector single(QubitRef q, const Vec2& psi) {
        return StateVector({q}, {psi[0], psi[1]});
    }

    std::size_t qubit_count() const noexcept { return qubits_.size(); }
    std::span<const QubitRef> qubits() const noexcept { return qubits_; }
    std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }

    std::optional<std::size_t> position_of(QubitRef q) const {
        const auto it = std::find(qubits_.begin(), qubits_.end(), q);
        if (it == qubits_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - qubits_.begin());
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amplitudes_) {
            s += std::norm(a);
        }
        return s;
    }

    void apply_1q(std::size_t pos, const Mat2& m) {
        const std::size_t stride = std::size_t{1} << pos;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (i & stride) {
                continue;
            }
            const cplx a0 = amplitudes_[i];
            const cplx a1 = amplitudes_[i | stride];
            amplitudes_[i] = m[0] * a0 + m[1] * a1;
            amplitudes_[i | stride] = m[2] * a0 + m[3] * a1;
        }
    }

    /// Applies a two-qubit matrix whose first (most significant) qubit is at
    /// `pos_first` and second at `pos_second`.
    void apply_2q(std::size_t pos_first, std::size_t pos_second, const Mat4& m) {
        if (pos_first == pos_second) {
            throw InvalidInput("two-qubit gate needs distinct qubits");
        }
        const std::size_t bf = std::size_t{1} << pos_first;
        const std::size_t bs = std::size_t{1} << pos_second;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & bf) || (i & bs)) {
                continue;
            }
            const std::array<std::size_t, 4> idx = {i, i | bs, i | bf, i | bf | bs};
            std::array<cplx, 4> in{};
            for (std::size_t k = 0; k < 4; ++k) {
                in[k] = amplitudes_[idx[k]];
            }
            for (std::size_t r = 0; r < 4; ++r) {
                cplx s{};
                for (std::size_t c = 0; c < 4; ++c) {
                    s += m[r * 4 + c] * in[c];
                }
                amplitudes_[idx[r]] = s;
            }
        }
    }

    double probability_one(std::size_t pos) const {
        const std::size_t b = std::size_t{1} << pos;
        double p = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (i & b) {
                p += std::norm(amplitudes_[i]);
            }
        }
        return p;
    }

    /// Projects qubit `pos` onto Z eigenstate `bit` and renormalizes.
    void collapse(std::size_t pos, std::uint8_t bit) {
        const std::size_t b = std::size_t{1} << pos;
        double kept = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            const bool one = (i & b) != 0;
            if (one != (bit != 0)) {
                amplitudes_[i] = 0.0;
            } else {
                kept += std::norm(amplitudes_[i]);
            }
        }
        if (kept <= 0.0) {
            throw ContractViolation("collapse onto a zero-probability branch");
        }
        const double scale = 1.0 / std::sqrt(kept);
        for (auto& a : amplitudes_) {
            a *= scale;
        }
    }

    /// Removes qubit `pos`, which must already be in Z eigenstate `bit`
    /// (as after `collapse`), and returns it as a one-qubit factor.
    StateVector split_out(std::size_t pos, std::uint8_t bit) {
        const QubitRef q = qubits_[pos];
        const std::size_t low = (std::size_t{1} << pos) - 1;
        std::vector<cplx> rest(amplitudes_.size() / 2);
        for (std::size_t j = 0; j < rest.size(); ++j) {
            const std::size_t i = (j & low) | ((j & ~low) << 1) | (std::size_t{bit} << pos);
            rest[j] = amplitudes_[i];
        }
        amplitudes_ = std::move(rest);
        qubits_.erase(qubits_.begin() + static_cast<std::ptrdiff_t>(pos));
        Vec2 psi{};
        psi[bit] = 1.0;
        return single(q, psi);
    }

    /// a (x) b with a's qubits first.
    static StateVector tensor(const StateVector& a, const StateVector& b) {
        std::vector<QubitRef> qubits(a.qubits_);
        qubits.insert(qubits.end(), b.qubits_.begin(), b.qubits_.end());
        std::vector<cplx> amps(a.amplitudes_.size() * b.amplitudes_.size());
        const std::size_t na = a.amplitudes_.size();
        for (std::size_t j = 0; j < b.amplitudes_.size(); ++j) {
            for (std::size_t i = 0; i < na; ++i) {
                amps[i | (j * na)] = a.amplitudes_[i] * b.amplitudes_[j];
            }
        }
        return StateVector(std::move(qubits), std::move(amps));
    }

    /// Reduced density operator of the qubits at `positions`, in that order
    /// (positions[0] is the most significant qubit of the result).
    DensityMatrix reduced_density(std::span<const std::size_t> positions) const {
        const std::size_t k = positions.size();
        DensityMatrix rho(k);
        std::size_t mask = 0;
        for (auto p : positions) {
            mask |= std::size_t{1} << p;
        }
        const auto sub_index = [&](std::size_t i) {
            std::size_t s = 0;
            for (std::size_t t = 0; t < k; ++t) {
                if (i & (std::size_t{1} << positions[t])) {
                    s |= std::size_t{1} << (k - 1 - t);
                }
            }
            return s;
        };
        // Group amplitudes by the bits outside `positions`.
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (amplitudes_[i] == cplx{}) {
                continue;
            }
            const std::size_t rest = i & ~mask;
            const std::size_t si = sub_index(i);
            for (std::size_t j = 0; j < amplitudes_.size(); ++j) {
                if ((j & ~mask) != rest || amplitudes_[j] == cplx{}) {
                    continue;
                }
                rho.at(si, sub_index(j)) += amplitudes_[i] * std::conj(amplitudes_[j]);
            }
        }
        return rho;
    }

   private:
    std::vector<QubitRef> qubits_;
    std::vector<cplx> amplitudes_;
};

}  // namespace qee
