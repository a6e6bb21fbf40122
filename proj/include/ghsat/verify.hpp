#pragma once

/// @file verify.hpp
/// @brief Equivalence checks, brute-force consistency counting and result
/// certification.

#include "ghsat/attack.hpp"
#include "ghsat/encode.hpp"
#include "ghsat/topology.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace ghsat {

inline constexpr std::size_t kExhaustiveGuard = 24;
inline constexpr std::uint64_t kCountGuard = 10'000'000;

/// True iff both assignments agree on every visible input. Hidden inputs (if
/// the partition has any) are fixed to y1 and y2 respectively. Throws
/// GuardError for more than 24 visible inputs.
bool equiv_exhaustive(const Topology& topo, const Assignment& a1, const Assignment& a2,
                      const InputPartition& partition = {}, const BitVector* y1 = nullptr,
                      const BitVector* y2 = nullptr);

/// Same question answered by a concrete two-copy miter (UNSAT = equivalent).
bool equiv_miter(const Topology& topo, const Assignment& a1, const Assignment& a2,
                 const InputPartition& partition = {}, const BitVector* y1 = nullptr,
                 const BitVector* y2 = nullptr);

/// Number of assignments in the domain product (times every hidden vector,
/// when the partition hides inputs) consistent with all rows of `di`.
/// Throws GuardError when the enumeration exceeds 10^7 candidates.
std::uint64_t count_consistent(const Topology& topo, std::span<const TypeSet> domains,
                               const DiscriminatingSet& di, const InputPartition& partition = {});

/// Model enumeration with permanent blocking clauses over encode_circuit;
/// the SAT-side counterpart of count_consistent.
std::uint64_t count_models_sat(const Topology& topo, std::span<const TypeSet> domains,
                               const DiscriminatingSet& di, const InputPartition& partition = {},
                               std::uint64_t limit = kCountGuard);

struct Certification {
    bool miter_equivalent = false;
    /// Set when the visible input space is small enough (<= 16 bits).
    std::optional<bool> exhaustive_equivalent;

    bool ok() const { return miter_equivalent && exhaustive_equivalent.value_or(true); }
};

/// Checks a recovered (T', y') against the known target (T, y).
Certification certify(const Topology& topo, const Assignment& target, const Assignment& recovered,
                      const InputPartition& partition = {}, const BitVector* y_target = nullptr,
                      const BitVector* y_recovered = nullptr);

} // namespace ghsat
