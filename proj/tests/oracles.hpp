#pragma once

// Test-side reference implementations. Nothing here calls into the library's
// evaluation, counting or solving code.

#include "ghsat/netlist.hpp"
#include "ghsat/topology.hpp"

#include <functional>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Fn = std::function<bool(bool, bool)>;

/// Gate semantics by name, written out as Boolean expressions.
inline const std::map<std::string, Fn>& semantics() {
    static const std::map<std::string, Fn> table = {
        {"FALSE", [](bool, bool) { return false; }},
        {"NOR", [](bool a, bool b) { return !(a || b); }},
        {"NOT_A_AND_B", [](bool a, bool b) { return !a && b; }},
        {"NOT_A", [](bool a, bool) { return !a; }},
        {"A_AND_NOT_B", [](bool a, bool b) { return a && !b; }},
        {"NOT_B", [](bool, bool b) { return !b; }},
        {"XOR", [](bool a, bool b) { return a != b; }},
        {"NAND", [](bool a, bool b) { return !(a && b); }},
        {"AND", [](bool a, bool b) { return a && b; }},
        {"XNOR", [](bool a, bool b) { return a == b; }},
        {"B", [](bool, bool b) { return b; }},
        {"NOT_A_OR_B", [](bool a, bool b) { return !a || b; }},
        {"A", [](bool a, bool) { return a; }},
        {"A_OR_NOT_B", [](bool a, bool b) { return a || !b; }},
        {"OR", [](bool a, bool b) { return a || b; }},
        {"TRUE", [](bool, bool) { return true; }},
    };
    return table;
}

/// Function of a gate type, looked up by its ASCII name.
inline Fn fn_of(ghsat::GateType t) { return semantics().at(std::string(t.ascii_name())); }

/// Memoized recursive evaluation from the outputs backwards.
inline ghsat::BitVector eval(const ghsat::Topology& topo, const ghsat::Assignment& asg,
                             const ghsat::BitVector& x) {
    std::vector<std::optional<bool>> memo(topo.num_gates());
    std::function<bool(ghsat::NodeRef)> value = [&](ghsat::NodeRef r) -> bool {
        if (r.is_input())
            return x.at(r.index);
        auto& m = memo[r.index];
        if (!m) {
            const auto& g = topo.gate(r.index);
            m = fn_of(asg[r.index])(value(g.left), value(g.right));
        }
        return *m;
    };
    ghsat::BitVector z;
    for (auto r : topo.outputs())
        z.push_back(value(r));
    return z;
}

inline ghsat::BitVector bits(std::uint64_t v, std::size_t n) {
    ghsat::BitVector b(n);
    for (std::size_t i = 0; i < n; ++i)
        b[i] = (v >> i) & 1;
    return b;
}

/// Interleaves visible bits and hidden bits at the given hidden positions.
inline ghsat::BitVector merge(std::size_t total, const std::vector<std::uint32_t>& hidden_pos,
                              const ghsat::BitVector& visible, const ghsat::BitVector& hidden) {
    ghsat::BitVector full(total);
    std::size_t vi = 0, hi = 0;
    for (std::size_t i = 0; i < total; ++i) {
        bool is_hidden = false;
        for (auto h : hidden_pos)
            is_hidden = is_hidden || h == i;
        full[i] = is_hidden ? hidden[hi++] : visible[vi++];
    }
    return full;
}

inline bool equivalent(const ghsat::Topology& topo, const ghsat::Assignment& a, const ghsat::Assignment& b) {
    const std::size_t n = topo.num_inputs();
    for (std::uint64_t v = 0; v < (1ull << n); ++v)
        if (eval(topo, a, bits(v, n)) != eval(topo, b, bits(v, n)))
            return false;
    return true;
}

/// Every assignment from the domain product, by recursion.
inline void for_each_assignment(const std::vector<ghsat::TypeSet>& domains,
                                const std::function<void(const ghsat::Assignment&)>& f) {
    ghsat::Assignment cur(domains.size());
    std::function<void(std::size_t)> rec = [&](std::size_t g) {
        if (g == domains.size()) {
            f(cur);
            return;
        }
        for (int tt = 0; tt < 16; ++tt) {
            const ghsat::GateType t(static_cast<std::uint8_t>(tt));
            if (domains[g].contains(t)) {
                cur[g] = t;
                rec(g + 1);
            }
        }
    };
    rec(0);
}

/// Plain DPLL with unit propagation over DIMACS-style integer clauses.
inline bool dpll_sat(int num_vars, const std::vector<std::vector<int>>& clauses) {
    std::vector<int> val(num_vars + 1, 0);
    std::function<bool()> rec = [&]() -> bool {
        std::vector<int> trail;
        auto undo = [&] {
            for (int v : trail)
                val[v] = 0;
        };
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto& c : clauses) {
                int unassigned = 0, last = 0;
                bool sat = false;
                for (int l : c) {
                    const int v = val[std::abs(l)];
                    if (v == 0) {
                        ++unassigned;
                        last = l;
                    } else if ((v > 0) == (l > 0)) {
                        sat = true;
                        break;
                    }
                }
                if (sat)
                    continue;
                if (unassigned == 0) {
                    undo();
                    return false;
                }
                if (unassigned == 1) {
                    val[std::abs(last)] = last > 0 ? 1 : -1;
                    trail.push_back(std::abs(last));
                    changed = true;
                }
            }
        }
        int pick = 0;
        for (int v = 1; v <= num_vars && !pick; ++v)
            if (val[v] == 0)
                pick = v;
        if (!pick)
            return true;
        for (int s : {1, -1}) {
            val[pick] = s;
            if (rec())
                return true;
        }
        val[pick] = 0;
        undo();
        return false;
    };
    return rec();
}

/// Random topology built without the library generator.
inline ghsat::Circuit random_circuit(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::vector<ghsat::GateNode> gates;
    ghsat::Assignment asg;
    std::vector<bool> used(k, false);
    for (std::size_t g = 0; g < k; ++g) {
        auto pick = [&]() {
            if (g > 0 && rng() % 2)
                return ghsat::NodeRef::gate(static_cast<std::uint32_t>(rng() % g));
            return ghsat::NodeRef::input(static_cast<std::uint32_t>(rng() % n));
        };
        const auto l = pick(), r = pick();
        for (auto ref : {l, r})
            if (ref.is_gate())
                used[ref.index] = true;
        gates.push_back({l, r});
        asg.push_back(ghsat::GateType(static_cast<std::uint8_t>(rng() % 16)));
    }
    std::vector<ghsat::NodeRef> outs;
    for (std::size_t g = 0; g < k; ++g)
        if (!used[g])
            outs.push_back(ghsat::NodeRef::gate(static_cast<std::uint32_t>(g)));
    return {ghsat::Topology(n, std::move(gates), std::move(outs)), std::move(asg)};
}

/// Multi-input cell semantics by operand count.
inline bool cell_op(ghsat::CellOp op, const std::vector<bool>& v) {
    int ones = 0;
    for (bool b : v)
        ones += b;
    const int n = static_cast<int>(v.size());
    switch (op) {
    case ghsat::CellOp::And:
        return ones == n;
    case ghsat::CellOp::Nand:
        return ones != n;
    case ghsat::CellOp::Or:
        return ones > 0;
    case ghsat::CellOp::Nor:
        return ones == 0;
    case ghsat::CellOp::Xor:
        return ones % 2 == 1;
    case ghsat::CellOp::Xnor:
        return ones % 2 == 0;
    case ghsat::CellOp::Not:
        return !v.at(0);
    case ghsat::CellOp::Buff:
        return v.at(0);
    case ghsat::CellOp::Dff:
        break;
    }
    std::abort();
}

/// Name-keyed recursive interpreter of a combinational netlist.
inline ghsat::BitVector eval_netlist(const ghsat::RawNetlist& nl, const ghsat::BitVector& x) {
    std::map<std::string, const ghsat::RawCell*> driver;
    for (const auto& c : nl.cells)
        driver[c.output] = &c;
    std::map<std::string, bool> value;
    for (std::size_t i = 0; i < nl.inputs.size(); ++i)
        value[nl.inputs[i]] = x.at(i);
    std::function<bool(const std::string&)> get = [&](const std::string& w) -> bool {
        if (auto it = value.find(w); it != value.end())
            return it->second;
        const auto* c = driver.at(w);
        std::vector<bool> ops;
        for (const auto& o : c->operands)
            ops.push_back(get(o));
        return value[w] = cell_op(c->op, ops);
    };
    ghsat::BitVector z;
    for (const auto& o : nl.outputs)
        z.push_back(get(o));
    return z;
}

} // namespace oracle
