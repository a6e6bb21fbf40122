#include "ghsat/generators.hpp"

#include "ghsat/errors.hpp"

#include <bit>
#include <deque>

namespace ghsat {

namespace {

struct Builder {
    std::size_t n;
    std::vector<GateNode> gates;
    Assignment types;

    NodeRef in(std::size_t i) const { return NodeRef::input(static_cast<std::uint32_t>(i)); }

    NodeRef add(GateType t, NodeRef a, NodeRef b) {
        gates.push_back({a, b});
        types.push_back(t);
        return NodeRef::gate(static_cast<std::uint32_t>(gates.size() - 1));
    }

    Circuit finish(std::vector<NodeRef> outputs) {
        return {Topology(n, std::move(gates), std::move(outputs)), std::move(types)};
    }
};

/// Unsigned number as LSB-first wires plus its largest possible value.
struct Number {
    std::vector<NodeRef> bits;
    std::uint64_t max = 0;
};

std::size_t bit_length(std::uint64_t v) { return static_cast<std::size_t>(std::bit_width(v)); }

Number add_numbers(Builder& b, const Number& x, const Number& y) {
    using namespace types;
    Number out;
    out.max = x.max + y.max;
    const std::size_t width = bit_length(out.max);
    std::optional<NodeRef> carry;
    for (std::size_t i = 0; i < width; ++i) {
        const bool hx = i < x.bits.size(), hy = i < y.bits.size();
        const bool need_carry = i + 1 < width;
        std::vector<NodeRef> terms;
        if (hx)
            terms.push_back(x.bits[i]);
        if (hy)
            terms.push_back(y.bits[i]);
        if (carry)
            terms.push_back(*carry);
        carry.reset();
        if (terms.size() == 1) {
            out.bits.push_back(terms[0]);
        } else if (terms.size() == 2) {
            out.bits.push_back(b.add(XOR, terms[0], terms[1]));
            if (need_carry)
                carry = b.add(AND, terms[0], terms[1]);
        } else if (terms.size() == 3) {
            const NodeRef p = b.add(XOR, terms[0], terms[1]);
            out.bits.push_back(b.add(XOR, p, terms[2]));
            if (need_carry)
                carry = b.add(OR, b.add(AND, terms[0], terms[1]), b.add(AND, p, terms[2]));
        }
    }
    return out;
}

} // namespace

Circuit gen_adder(std::size_t w) {
    using namespace types;
    if (w == 0)
        throw ShapeError("adder width must be positive");
    Builder b{2 * w, {}, {}};
    std::vector<NodeRef> outs;
    NodeRef carry = b.add(AND, b.in(0), b.in(w));
    outs.push_back(b.add(XOR, b.in(0), b.in(w)));
    for (std::size_t i = 1; i < w; ++i) {
        const NodeRef p = b.add(XOR, b.in(i), b.in(w + i));
        outs.push_back(b.add(XOR, p, carry));
        const NodeRef g = b.add(AND, b.in(i), b.in(w + i));
        const NodeRef t = b.add(AND, p, carry);
        carry = b.add(OR, g, t);
    }
    outs.push_back(carry);
    return b.finish(std::move(outs));
}

Circuit gen_comparator(std::size_t w) {
    using namespace types;
    if (w == 0)
        throw ShapeError("comparator width must be positive");
    Builder b{2 * w, {}, {}};
    const std::size_t top = w - 1;
    NodeRef lt = b.add(NOT_A_AND_B, b.in(top), b.in(w + top));
    NodeRef eq = b.add(XNOR, b.in(top), b.in(w + top));
    for (std::size_t i = top; i-- > 0;) {
        const NodeRef lt_i = b.add(NOT_A_AND_B, b.in(i), b.in(w + i));
        const NodeRef eq_i = b.add(XNOR, b.in(i), b.in(w + i));
        lt = b.add(OR, lt, b.add(AND, eq, lt_i));
        eq = b.add(AND, eq, eq_i);
    }
    return b.finish({lt, eq});
}

Circuit gen_hamming(std::size_t w) {
    if (w == 0)
        throw ShapeError("hamming width must be positive");
    Builder b{2 * w, {}, {}};
    std::deque<Number> level;
    for (std::size_t i = 0; i < w; ++i)
        level.push_back({{b.add(types::XOR, b.in(i), b.in(w + i))}, 1});
    while (level.size() > 1) {
        std::deque<Number> next;
        while (level.size() >= 2) {
            Number x = std::move(level.front());
            level.pop_front();
            Number y = std::move(level.front());
            level.pop_front();
            next.push_back(add_numbers(b, x, y));
        }
        if (!level.empty())
            next.push_back(std::move(level.front()));
        level = std::move(next);
    }
    return b.finish(level.front().bits);
}

Circuit gen_point(const BitVector& target) {
    using namespace types;
    const std::size_t n = target.size();
    if (n == 0)
        throw ShapeError("point function needs at least one input");
    Builder b{n, {}, {}};
    if (n == 1)
        return [&] {
            const NodeRef g = b.add(target[0] ? A : NOT_A, b.in(0), b.in(0));
            return b.finish({g});
        }();
    // Literal polarity folded into the AND: (t0, t1) picks one of the four
    // AND-like types.
    static constexpr GateType first[2][2] = {{NOR, NOT_A_AND_B}, {A_AND_NOT_B, AND}};
    NodeRef acc = b.add(first[target[0]][target[1]], b.in(0), b.in(1));
    for (std::size_t i = 2; i < n; ++i)
        acc = b.add(target[i] ? AND : A_AND_NOT_B, acc, b.in(i));
    return b.finish({acc});
}

Circuit gen_random(std::mt19937_64& rng, const RandomCircuitParams& params) {
    if (params.num_inputs == 0 || params.num_gates == 0)
        throw ShapeError("random circuit needs at least one input and one gate");
    Builder b{params.num_inputs, {}, {}};
    std::bernoulli_distribution from_gate(params.gate_operand_bias);
    std::uniform_int_distribution<int> type_dist(0, 15);
    auto pick = [&]() {
        const std::size_t k = b.gates.size();
        if (k > 0 && from_gate(rng))
            return NodeRef::gate(static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)));
        return b.in(std::uniform_int_distribution<std::size_t>(0, params.num_inputs - 1)(rng));
    };
    for (std::size_t g = 0; g < params.num_gates; ++g) {
        const NodeRef l = pick();
        NodeRef r = pick();
        // Distinct operands where possible: a gate reading one wire twice is
        // legal but rarely interesting.
        for (int tries = 0; tries < 8 && r == l && (params.num_inputs + g) > 1; ++tries)
            r = pick();
        b.add(GateType(static_cast<std::uint8_t>(type_dist(rng))), l, r);
    }
    std::vector<bool> used(b.gates.size(), false);
    for (const auto& gn : b.gates)
        for (NodeRef r : {gn.left, gn.right})
            if (r.is_gate())
                used[r.index] = true;
    std::vector<NodeRef> outs;
    for (std::size_t g = 0; g < used.size(); ++g)
        if (!used[g])
            outs.push_back(NodeRef::gate(static_cast<std::uint32_t>(g)));
    return b.finish(std::move(outs));
}

} // namespace ghsat
