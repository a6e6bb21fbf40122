#pragma once

/// @file simplify.hpp
/// @brief Topology-only restriction of per-gate type domains.
///
/// Classification runs in one pass over the fanout counts:
///   - S:       both predecessors are gates with fanout 1         -> {AND, NAND, XOR}
///   - Z_left:  only the left predecessor is a fanout-1 gate       -> {XOR, AND, NAND, NOR, OR, A}
///   - Z_right: only the right predecessor is a fanout-1 gate      -> {XOR, AND, NAND, NOR, OR, B}
///   - R:       not output layer, not a fanout-1 feeder of an S/Z  -> 8 types
///   - FULL:    everything else                                    -> all 16 types
/// A gate with a primary-input operand is never S or Z.

#include "ghsat/gate_type.hpp"
#include "ghsat/topology.hpp"

#include <string_view>
#include <vector>

namespace ghsat {

enum class SimplifyMode { None, R, ZS, ZSR };

std::string_view to_string(SimplifyMode mode);
/// Accepts "none", "r", "zs", "zsr" (case-insensitive). Throws ParseError.
SimplifyMode parse_simplify_mode(std::string_view text);

enum class GateClass : std::uint8_t { S, ZLeft, ZRight, R, Full };

std::string_view to_string(GateClass c);

struct DomainMap {
    std::vector<TypeSet> domains;
    std::vector<GateClass> classes;
    /// Gate has fanout 1 and feeds an S- or Z-class gate.
    std::vector<bool> must_retain_full;

    std::size_t size() const { return domains.size(); }
};

DomainMap classify_gates(const Topology& topo, SimplifyMode mode);

/// Pushes output negations of non-output-layer gates forward into their
/// consumers, so every gate outside the output layer ends up with a type in
/// R. The result is functionally equivalent to the input assignment.
Assignment rewrite_r_wave(const Topology& topo, const Assignment& asg);

/// Searches for an assignment inside `domains` that reproduces the full truth
/// table of (topo, asg); true iff one exists and is exhaustively equivalent.
/// Throws GuardError when the circuit has more than 12 inputs.
bool validate_domains_sat(const Topology& topo, const Assignment& asg, std::span<const TypeSet> domains);

struct SimplificationReport {
    std::size_t num_s = 0;
    std::size_t num_z = 0;
    std::size_t num_r = 0;
    std::size_t num_full = 0;
    BigInt space_before;
    BigInt space_after;
};

SimplificationReport simplification_report(const Topology& topo, const DomainMap& domains);

} // namespace ghsat
