#include "ghsat/topology.hpp"

#include "ghsat/errors.hpp"

#include <string>

namespace ghsat {

Topology::Topology(std::size_t num_inputs, std::vector<GateNode> gates, std::vector<NodeRef> outputs)
    : n_(num_inputs), gates_(std::move(gates)), outputs_(std::move(outputs)),
      input_fanout_(n_, 0), gate_fanout_(gates_.size(), 0), output_layer_(gates_.size(), false) {
    auto check = [&](NodeRef r, std::size_t limit_gate, const std::string& where) {
        if (r.is_input() && r.index >= n_)
            throw TopologyError(where + " references input " + std::to_string(r.index) +
                                " but circuit has " + std::to_string(n_) + " inputs");
        if (r.is_gate() && r.index >= limit_gate)
            throw TopologyError(where + " references gate " + std::to_string(r.index) +
                                " which is not earlier in topological order");
    };
    auto bump = [&](NodeRef r) {
        if (r.is_input())
            ++input_fanout_[r.index];
        else
            ++gate_fanout_[r.index];
    };
    for (std::size_t g = 0; g < gates_.size(); ++g) {
        check(gates_[g].left, g, "gate " + std::to_string(g));
        check(gates_[g].right, g, "gate " + std::to_string(g));
        bump(gates_[g].left);
        bump(gates_[g].right);
    }
    for (std::size_t h = 0; h < outputs_.size(); ++h) {
        check(outputs_[h], gates_.size(), "output " + std::to_string(h));
        bump(outputs_[h]);
        if (outputs_[h].is_gate())
            output_layer_[outputs_[h].index] = true;
    }
}

BitVector eval_circuit(const Topology& topo, const Assignment& asg, const BitVector& x) {
    if (x.size() != topo.num_inputs())
        throw ShapeError("input vector has width " + std::to_string(x.size()) + ", expected " +
                         std::to_string(topo.num_inputs()));
    if (asg.size() != topo.num_gates())
        throw ShapeError("assignment has " + std::to_string(asg.size()) + " gates, expected " +
                         std::to_string(topo.num_gates()));
    std::vector<bool> value(topo.num_gates());
    auto get = [&](NodeRef r) { return r.is_input() ? x[r.index] : value[r.index]; };
    for (std::size_t g = 0; g < topo.num_gates(); ++g) {
        const auto& node = topo.gate(g);
        value[g] = asg[g].apply(get(node.left), get(node.right));
    }
    BitVector z(topo.num_outputs());
    for (std::size_t h = 0; h < z.size(); ++h)
        z[h] = get(topo.outputs()[h]);
    return z;
}

namespace {

std::uint64_t apply_word(GateType t, std::uint64_t a, std::uint64_t b) {
    const std::uint64_t na = ~a, nb = ~b;
    std::uint64_t out = 0;
    if (t.tt() & 1)
        out |= na & nb;
    if (t.tt() & 2)
        out |= na & b;
    if (t.tt() & 4)
        out |= a & nb;
    if (t.tt() & 8)
        out |= a & b;
    return out;
}

} // namespace

std::vector<std::uint64_t> eval_words(const Topology& topo, const Assignment& asg,
                                      std::span<const std::uint64_t> inputs) {
    if (inputs.size() != topo.num_inputs())
        throw ShapeError("input word count does not match circuit inputs");
    if (asg.size() != topo.num_gates())
        throw ShapeError("assignment length does not match gate count");
    std::vector<std::uint64_t> value(topo.num_gates());
    auto get = [&](NodeRef r) { return r.is_input() ? inputs[r.index] : value[r.index]; };
    for (std::size_t g = 0; g < topo.num_gates(); ++g) {
        const auto& node = topo.gate(g);
        value[g] = apply_word(asg[g], get(node.left), get(node.right));
    }
    std::vector<std::uint64_t> out(topo.num_outputs());
    for (std::size_t h = 0; h < out.size(); ++h)
        out[h] = get(topo.outputs()[h]);
    return out;
}

BigInt search_space_size(std::span<const TypeSet> domains) {
    BigInt product = 1;
    for (std::size_t g = 0; g < domains.size(); ++g) {
        if (domains[g].empty())
            throw DomainError("gate " + std::to_string(g) + " has an empty domain");
        product *= domains[g].size();
    }
    return product;
}

BitVector bits_from_uint(std::uint64_t value, std::size_t width) {
    BitVector out(width);
    for (std::size_t i = 0; i < width && i < 64; ++i)
        out[i] = (value >> i) & 1;
    return out;
}

std::uint64_t uint_from_bits(const BitVector& bits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size() && i < 64; ++i)
        if (bits[i])
            v |= std::uint64_t{1} << i;
    return v;
}

std::string bits_to_string(const BitVector& bits) {
    std::string s;
    s.reserve(bits.size());
    for (bool b : bits)
        s.push_back(b ? '1' : '0');
    return s;
}

BitVector bits_from_string(std::string_view text) {
    BitVector out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1')
            throw ParseError(std::string("invalid bit character '") + c + "'");
        out.push_back(c == '1');
    }
    return out;
}

} // namespace ghsat

namespace ghsat {

InputPartition::InputPartition(std::size_t total_inputs, std::vector<std::uint32_t> hidden)
    : total_(total_inputs), hidden_(std::move(hidden)), slot_(total_inputs, 0) {
    std::vector<bool> is_hidden(total_, false);
    for (std::size_t j = 0; j < hidden_.size(); ++j) {
        const auto h = hidden_[j];
        if (h >= total_)
            throw ShapeError("hidden input index " + std::to_string(h) + " out of range");
        if (is_hidden[h])
            throw ShapeError("hidden input index " + std::to_string(h) + " listed twice");
        is_hidden[h] = true;
        slot_[h] = -static_cast<int>(j) - 1;
    }
    for (std::uint32_t i = 0; i < total_; ++i) {
        if (!is_hidden[i]) {
            slot_[i] = static_cast<int>(visible_.size());
            visible_.push_back(i);
        }
    }
}

BitVector InputPartition::merge(const BitVector& visible, const BitVector& hidden) const {
    if (visible.size() != visible_.size() || hidden.size() != hidden_.size())
        throw ShapeError("visible/hidden widths do not match the input partition");
    BitVector full(total_);
    for (std::size_t i = 0; i < visible_.size(); ++i)
        full[visible_[i]] = visible[i];
    for (std::size_t j = 0; j < hidden_.size(); ++j)
        full[hidden_[j]] = hidden[j];
    return full;
}

} // namespace ghsat
