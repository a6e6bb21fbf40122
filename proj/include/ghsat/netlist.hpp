#pragma once

/// @file netlist.hpp
/// @brief ISCAS .bench ingestion and the JSON circuit interchange format.
///
/// Pipeline: parse_bench -> unroll_sequential -> decompose_multi_input ->
/// normalize. The result uses only two-input gates; NOT and BUFF cells are
/// absorbed into neighbouring gate types.

#include "ghsat/topology.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ghsat {

enum class CellOp { And, Nand, Or, Nor, Xor, Xnor, Not, Buff, Dff };

std::string_view to_string(CellOp op);

struct RawCell {
    CellOp op;
    std::string output;
    std::vector<std::string> operands;
    std::size_t line = 0;
};

struct RawNetlist {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<RawCell> cells;
};

/// Throws ParseError (with line number) on syntax errors, unknown operators,
/// duplicate definitions and undefined wires.
RawNetlist parse_bench(std::string_view text);

/// Replaces every DFF by a fresh primary input (its output wire) and a fresh
/// primary output (its data wire).
RawNetlist unroll_sequential(const RawNetlist& nl);

/// Rewrites cells with more than two operands into left-deep chains of
/// two-input cells; single-operand gates become BUFF or NOT.
RawNetlist decompose_multi_input(const RawNetlist& nl);

/// Converts a DFF-free netlist of fan-in <= 2 cells into the two-input
/// topology model. Throws TopologyError on a combinational cycle.
Circuit normalize(const RawNetlist& nl);

/// Full pipeline on .bench text.
Circuit load_bench(std::string_view text);

/// Reference interpreter over the raw netlist (arbitrary fan-in, NOT, BUFF).
/// The netlist must be DFF-free.
BitVector eval_raw(const RawNetlist& nl, const BitVector& x);

/// JSON interchange:
///   {"n": N, "m": M,
///    "gates":   [{"l": REF, "r": REF, "type": NAME?}, ...],   // topological order
///    "outputs": [REF, ...]}
/// REF is {"in": i} or {"g": j}. NAME is a canonical gate label such as
/// "AND" or "A∧¬B"; ASCII aliases ("A_AND_NOT_B") are accepted on read.
/// Either every gate carries a type or none does. Multi-bit quantities are
/// LSB-first; truth tables use bit (2a + b) = f(a, b).
std::string write_json(const Topology& topo, const Assignment* asg = nullptr);

struct JsonCircuit {
    Topology topology;
    std::optional<Assignment> assignment;
};

/// Throws ParseError on schema violations.
JsonCircuit read_json(std::string_view text);

} // namespace ghsat
