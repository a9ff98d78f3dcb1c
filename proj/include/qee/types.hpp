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

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qee {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A caller supplied a value outside an operation's domain.
class InvalidInput : public Error {
   public:
    using Error::Error;
};

/// A QubitRef that was never issued, or was consumed by a discard.
class QubitError : public Error {
   public:
    using Error::Error;
};

/// A send on an edge that the configured topology does not contain.
class TopologyViolation : public Error {
   public:
    using Error::Error;
};

/// A component broke a channel or protocol contract (e.g. an interceptor
/// tried to alter an authenticated classical message).
class ContractViolation : public Error {
   public:
    using Error::Error;
};

/// A public-discussion announcement referenced a position that does not exist.
class MalformedAnnouncement : public Error {
   public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Basic quantum vocabulary
// ---------------------------------------------------------------------------

enum class Basis : std::uint8_t { Z, X };

/// The four single-qubit states used for decoys.
enum class StateLabel : std::uint8_t { Zero, One, Plus, Minus };

/// Dense-coding operations, in message order 00, 01, 10, 11.
enum class PauliCode : std::uint8_t { I, Z, X, iY };

enum class BellOutcome : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

/// bit 0 means |0> or |+>, bit 1 means |1> or |->.
struct MeasurementOutcome {
    Basis basis = Basis::Z;
    std::uint8_t bit = 0;

    friend bool operator==(const MeasurementOutcome&, const MeasurementOutcome&) = default;
};

/// Opaque handle naming one qubit of a QuantumSystem. Ids are never reused.
struct QubitRef {
    std::uint64_t id = 0;

    friend auto operator<=>(const QubitRef&, const QubitRef&) = default;
};

inline constexpr Basis basis_of(StateLabel s) noexcept {
    return (s == StateLabel::Zero || s == StateLabel::One) ? Basis::Z : Basis::X;
}

inline constexpr std::uint8_t bit_of(StateLabel s) noexcept {
    return (s == StateLabel::One || s == StateLabel::Minus) ? 1 : 0;
}

inline constexpr StateLabel label_for(Basis b, std::uint8_t bit) noexcept {
    if (b == Basis::Z) {
        return bit ? StateLabel::One : StateLabel::Zero;
    }
    return bit ? StateLabel::Minus : StateLabel::Plus;
}

inline StateLabel parse_state_label(std::string_view s) {
    if (s == "0") return StateLabel::Zero;
    if (s == "1") return StateLabel::One;
    if (s == "+") return StateLabel::Plus;
    if (s == "-") return StateLabel::Minus;
    throw InvalidInput("unknown state label '" + std::string(s) + "' (expected 0, 1, + or -)");
}

inline std::string_view to_string(StateLabel s) noexcept {
    switch (s) {
        case StateLabel::Zero: return "0";
        case StateLabel::One: return "1";
        case StateLabel::Plus: return "+";
        case StateLabel::Minus: return "-";
    }
    return "?";
}

inline std::string_view to_string(Basis b) noexcept { return b == Basis::Z ? "Z" : "X"; }

inline Basis parse_basis(std::string_view s) {
    if (s == "Z" || s == "z") return Basis::Z;
    if (s == "X" || s == "x") return Basis::X;
    throw InvalidInput("unknown basis '" + std::string(s) + "'");
}

inline std::string_view to_string(PauliCode p) noexcept {
    switch (p) {
        case PauliCode::I: return "I";
        case PauliCode::Z: return "Z";
        case PauliCode::X: return "X";
        case PauliCode::iY: return "iY";
    }
    return "?";
}

inline std::string_view to_string(BellOutcome b) noexcept {
    switch (b) {
        case BellOutcome::PhiPlus: return "PhiPlus";
        case BellOutcome::PhiMinus: return "PhiMinus";
        case BellOutcome::PsiPlus: return "PsiPlus";
        case BellOutcome::PsiMinus: return "PsiMinus";
    }
    return "?";
}

// Message bits (first, second) <-> Pauli: 00 I, 01 sigma_z, 10 sigma_x, 11 i*sigma_y.
inline constexpr PauliCode pauli_for_bits(std::uint8_t first, std::uint8_t second) noexcept {
    return static_cast<PauliCode>(((first & 1) << 1) | (second & 1));
}

inline constexpr std::pair<std::uint8_t, std::uint8_t> bits_for_pauli(PauliCode p) noexcept {
    const auto v = static_cast<std::uint8_t>(p);
    return {static_cast<std::uint8_t>(v >> 1), static_cast<std::uint8_t>(v & 1)};
}

// P applied to the first qubit of |Phi+> yields the Bell state with the same index.
inline constexpr BellOutcome bell_for_pauli(PauliCode p) noexcept {
    return static_cast<BellOutcome>(static_cast<std::uint8_t>(p));
}

inline constexpr PauliCode pauli_for_bell(BellOutcome b) noexcept {
    return static_cast<PauliCode>(static_cast<std::uint8_t>(b));
}

}  // namespace qee

template <>
struct std::hash<qee::QubitRef> {
    std::size_t operator()(const qee::QubitRef& q) const noexcept {
        return std::hash<std::uint64_t>{}(q.id);
    }
};
