#pragma once

/// @file topology.hpp
/// @brief Public circuit topology, gate-type assignments and evaluation.

#include "ghsat/gate_type.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace ghsat {

using BitVector = std::vector<bool>;
using BigInt = boost::multiprecision::cpp_int;

/// Reference to a primary input or to a gate.
struct NodeRef {
    enum class Kind : std::uint8_t { Input, Gate };

    Kind kind = Kind::Input;
    std::uint32_t index = 0;

    static constexpr NodeRef input(std::uint32_t i) { return {Kind::Input, i}; }
    static constexpr NodeRef gate(std::uint32_t g) { return {Kind::Gate, g}; }

    constexpr bool is_input() const { return kind == Kind::Input; }
    constexpr bool is_gate() const { return kind == Kind::Gate; }

    constexpr auto operator<=>(const NodeRef&) const = default;
};

struct GateNode {
    NodeRef left;
    NodeRef right;

    constexpr auto operator<=>(const GateNode&) const = default;
};

/// Directed acyclic circuit graph with ordered gate inputs. The gate list is
/// a topological order: a gate may only reference inputs and earlier gates.
class Topology {
  public:
    Topology() = default;
    /// Throws TopologyError on dangling or forward references.
    Topology(std::size_t num_inputs, std::vector<GateNode> gates, std::vector<NodeRef> outputs);

    std::size_t num_inputs() const { return n_; }
    std::size_t num_outputs() const { return outputs_.size(); }
    std::size_t num_gates() const { return gates_.size(); }

    const std::vector<GateNode>& gates() const { return gates_; }
    const GateNode& gate(std::size_t g) const { return gates_[g]; }
    const std::vector<NodeRef>& outputs() const { return outputs_; }

    /// Number of gate-input and output references to a node. A gate that
    /// takes the same node on both inputs contributes two.
    std::size_t fanout(NodeRef node) const {
        return node.is_input() ? input_fanout_[node.index] : gate_fanout_[node.index];
    }
    /// True if some primary output references gate g directly.
    bool is_output_layer(std::size_t g) const { return output_layer_[g]; }

    bool operator==(const Topology& o) const {
        return n_ == o.n_ && gates_ == o.gates_ && outputs_ == o.outputs_;
    }

  private:
    std::size_t n_ = 0;
    std::vector<GateNode> gates_;
    std::vector<NodeRef> outputs_;
    std::vector<std::size_t> input_fanout_;
    std::vector<std::size_t> gate_fanout_;
    std::vector<bool> output_layer_;
};

/// Gate-type assignment, index-aligned with Topology::gates().
using Assignment = std::vector<GateType>;

/// A topology together with a concrete assignment.
struct Circuit {
    Topology topology;
    Assignment assignment;
};

constexpr bool apply_gate(GateType t, bool a, bool b) { return t.apply(a, b); }

/// Evaluates the circuit on one input vector. Throws ShapeError on width
/// mismatch.
BitVector eval_circuit(const Topology& topo, const Assignment& asg, const BitVector& x);

/// Bit-parallel evaluation: each input word carries 64 independent input
/// patterns. Returns one word per primary output.
std::vector<std::uint64_t> eval_words(const Topology& topo, const Assignment& asg,
                                      std::span<const std::uint64_t> inputs);

/// Product of the domain sizes. Throws DomainError on an empty domain.
BigInt search_space_size(std::span<const TypeSet> domains);

/// LSB-first helpers used across the library.
BitVector bits_from_uint(std::uint64_t value, std::size_t width);
std::uint64_t uint_from_bits(const BitVector& bits);
std::string bits_to_string(const BitVector& bits);
BitVector bits_from_string(std::string_view text);

} // namespace ghsat

namespace ghsat {

/// Split of a circuit's primary inputs into attacker-visible and hidden
/// positions. Visible bits keep their relative order, as do hidden bits.
class InputPartition {
  public:
    InputPartition() = default;
    /// Throws ShapeError if an index is out of range or repeated.
    InputPartition(std::size_t total_inputs, std::vector<std::uint32_t> hidden);

    static InputPartition all_visible(std::size_t total_inputs) { return InputPartition(total_inputs, {}); }

    std::size_t total() const { return total_; }
    std::size_t num_visible() const { return visible_.size(); }
    std::size_t num_hidden() const { return hidden_.size(); }
    const std::vector<std::uint32_t>& visible() const { return visible_; }
    const std::vector<std::uint32_t>& hidden() const { return hidden_; }

    bool is_hidden(std::uint32_t input) const { return slot_[input] < 0; }
    /// Position of an input inside the visible vector (if visible) or the
    /// hidden vector (if hidden).
    std::size_t slot(std::uint32_t input) const {
        const int s = slot_[input];
        return static_cast<std::size_t>(s < 0 ? -s - 1 : s);
    }

    /// Interleaves a visible vector and a hidden vector into a full input.
    BitVector merge(const BitVector& visible, const BitVector& hidden) const;

  private:
    std::size_t total_ = 0;
    std::vector<std::uint32_t> visible_;
    std::vector<std::uint32_t> hidden_;
    std::vector<int> slot_;
};

} // namespace ghsat
