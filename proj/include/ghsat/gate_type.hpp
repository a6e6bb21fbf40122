#pragma once

/// @file gate_type.hpp
/// @brief The sixteen two-input gate types and the type-set algebra over them.
///
/// Truth-table convention: bit (2a + b) of `tt` holds f(a, b), where a is the
/// left input and b the right input. XOR is therefore 0b0110.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghsat {

class GateType {
  public:
    constexpr GateType() = default;
    constexpr explicit GateType(std::uint8_t tt) : tt_(tt & 0xF) {}

    constexpr std::uint8_t tt() const { return tt_; }

    constexpr bool apply(bool a, bool b) const {
        return (tt_ >> ((a ? 2 : 0) | (b ? 1 : 0))) & 1;
    }

    /// Canonical label, e.g. "AND", "A∧¬B", "¬A∨B".
    std::string_view name() const;
    /// ASCII alias accepted by parsers, e.g. "A_AND_NOT_B".
    std::string_view ascii_name() const;

    /// Accepts canonical labels, ASCII aliases, and common synonyms
    /// (case-insensitive for ASCII).
    static std::optional<GateType> from_name(std::string_view name);

    constexpr auto operator<=>(const GateType&) const = default;

  private:
    std::uint8_t tt_ = 0;
};

namespace types {
inline constexpr GateType FALSE_{0b0000};
inline constexpr GateType NOR{0b0001};
inline constexpr GateType NOT_A_AND_B{0b0010};
inline constexpr GateType NOT_A{0b0011};
inline constexpr GateType A_AND_NOT_B{0b0100};
inline constexpr GateType NOT_B{0b0101};
inline constexpr GateType XOR{0b0110};
inline constexpr GateType NAND{0b0111};
inline constexpr GateType AND{0b1000};
inline constexpr GateType XNOR{0b1001};
inline constexpr GateType B{0b1010};
inline constexpr GateType NOT_A_OR_B{0b1011};
inline constexpr GateType A{0b1100};
inline constexpr GateType A_OR_NOT_B{0b1101};
inline constexpr GateType OR{0b1110};
inline constexpr GateType TRUE_{0b1111};
} // namespace types

/// All sixteen types in ascending truth-table order.
constexpr std::array<GateType, 16> all_gate_types() {
    std::array<GateType, 16> out{};
    for (std::uint8_t i = 0; i < 16; ++i)
        out[i] = GateType(i);
    return out;
}

// Single-type operators.

constexpr GateType neg_out(GateType t) { return GateType(static_cast<std::uint8_t>(~t.tt())); }

constexpr GateType remap(auto&& fn) {
    std::uint8_t tt = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (fn(a != 0, b != 0))
                tt |= static_cast<std::uint8_t>(1u << (2 * a + b));
    return GateType(tt);
}

constexpr GateType neg_left(GateType t) {
    return remap([t](bool a, bool b) { return t.apply(!a, b); });
}
constexpr GateType neg_right(GateType t) {
    return remap([t](bool a, bool b) { return t.apply(a, !b); });
}
constexpr GateType fix_left_true(GateType t) {
    return remap([t](bool, bool b) { return t.apply(true, b); });
}
constexpr GateType fix_right_true(GateType t) {
    return remap([t](bool a, bool) { return t.apply(a, true); });
}

/// A subset of the sixteen gate types, stored as a 16-bit characteristic mask
/// indexed by truth table.
class TypeSet {
  public:
    constexpr TypeSet() = default;
    constexpr explicit TypeSet(std::uint16_t mask) : mask_(mask) {}
    constexpr TypeSet(std::initializer_list<GateType> ts) {
        for (auto t : ts)
            mask_ |= static_cast<std::uint16_t>(1u << t.tt());
    }

    constexpr std::uint16_t mask() const { return mask_; }
    constexpr bool contains(GateType t) const { return (mask_ >> t.tt()) & 1; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool empty() const { return mask_ == 0; }

    constexpr void insert(GateType t) { mask_ |= static_cast<std::uint16_t>(1u << t.tt()); }
    constexpr void erase(GateType t) { mask_ &= static_cast<std::uint16_t>(~(1u << t.tt())); }

    constexpr TypeSet operator|(TypeSet o) const { return TypeSet(mask_ | o.mask_); }
    constexpr TypeSet operator&(TypeSet o) const { return TypeSet(mask_ & o.mask_); }
    constexpr bool subset_of(TypeSet o) const { return (mask_ & ~o.mask_) == 0; }

    std::vector<GateType> members() const {
        std::vector<GateType> out;
        for (std::uint8_t i = 0; i < 16; ++i)
            if ((mask_ >> i) & 1)
                out.emplace_back(i);
        return out;
    }

    /// Image of the set under a single-type operator.
    constexpr TypeSet map(auto&& op) const {
        TypeSet out;
        for (std::uint8_t i = 0; i < 16; ++i)
            if ((mask_ >> i) & 1)
                out.insert(op(GateType(i)));
        return out;
    }

    std::string to_string() const;

    constexpr auto operator<=>(const TypeSet&) const = default;

  private:
    std::uint16_t mask_ = 0;
};

namespace typesets {
using namespace types;
/// Full library.
inline constexpr TypeSet L{0xFFFF};
/// Types sufficient for every gate outside the output layer.
inline constexpr TypeSet R{XOR, OR, NAND, TRUE_, NOT_A, NOT_B, NOT_A_OR_B, A_OR_NOT_B};
/// Gates whose two predecessors both have fanout one.
inline constexpr TypeSet S{AND, NAND, XOR};
/// Gates whose left predecessor is the unique fanout-one predecessor.
inline constexpr TypeSet Z_left{XOR, AND, NAND, NOR, OR, A};
/// Gates whose right predecessor is the unique fanout-one predecessor.
inline constexpr TypeSet Z_right{XOR, AND, NAND, NOR, OR, B};
} // namespace typesets

} // namespace ghsat
