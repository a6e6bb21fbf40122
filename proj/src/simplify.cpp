#include "ghsat/simplify.hpp"

#include "ghsat/encode.hpp"
#include "ghsat/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace ghsat {

std::string_view to_string(SimplifyMode mode) {
    switch (mode) {
    case SimplifyMode::None:
        return "none";
    case SimplifyMode::R:
        return "r";
    case SimplifyMode::ZS:
        return "zs";
    case SimplifyMode::ZSR:
        return "zsr";
    }
    return "?";
}

SimplifyMode parse_simplify_mode(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "none")
        return SimplifyMode::None;
    if (lower == "r")
        return SimplifyMode::R;
    if (lower == "zs")
        return SimplifyMode::ZS;
    if (lower == "zsr")
        return SimplifyMode::ZSR;
    throw ParseError("unknown simplification mode '" + std::string(text) + "'");
}

std::string_view to_string(GateClass c) {
    switch (c) {
    case GateClass::S:
        return "S";
    case GateClass::ZLeft:
        return "Z_left";
    case GateClass::ZRight:
        return "Z_right";
    case GateClass::R:
        return "R";
    case GateClass::Full:
        return "FULL";
    }
    return "?";
}

DomainMap classify_gates(const Topology& topo, SimplifyMode mode) {
    const std::size_t k = topo.num_gates();
    DomainMap dm;
    dm.domains.assign(k, typesets::L);
    dm.classes.assign(k, GateClass::Full);
    dm.must_retain_full.assign(k, false);
    if (mode == SimplifyMode::None)
        return dm;

    const bool use_zs = mode == SimplifyMode::ZS || mode == SimplifyMode::ZSR;
    const bool use_r = mode == SimplifyMode::R || mode == SimplifyMode::ZSR;
    auto single_use_gate = [&](NodeRef r) { return r.is_gate() && topo.fanout(r) == 1; };

    if (use_zs) {
        for (std::size_t g = 0; g < k; ++g) {
            const auto& node = topo.gate(g);
            if (node.left.is_input() || node.right.is_input())
                continue;
            const bool l1 = single_use_gate(node.left);
            const bool r1 = single_use_gate(node.right);
            if (l1 && r1) {
                dm.classes[g] = GateClass::S;
                dm.domains[g] = typesets::S;
            } else if (l1) {
                dm.classes[g] = GateClass::ZLeft;
                dm.domains[g] = typesets::Z_left;
            } else if (r1) {
                dm.classes[g] = GateClass::ZRight;
                dm.domains[g] = typesets::Z_right;
            } else {
                continue;
            }
            for (NodeRef pred : {node.left, node.right})
                if (single_use_gate(pred))
                    dm.must_retain_full[pred.index] = true;
        }
    }
    if (use_r) {
        for (std::size_t g = 0; g < k; ++g) {
            if (dm.classes[g] != GateClass::Full || topo.is_output_layer(g) || dm.must_retain_full[g])
                continue;
            dm.classes[g] = GateClass::R;
            dm.domains[g] = typesets::R;
        }
    }
    return dm;
}

Assignment rewrite_r_wave(const Topology& topo, const Assignment& asg) {
    if (asg.size() != topo.num_gates())
        throw ShapeError("assignment length does not match gate count");
    Assignment out(asg.size());
    std::vector<bool> negated(asg.size(), false);
    auto inverted = [&](NodeRef r) { return r.is_gate() && negated[r.index]; };
    for (std::size_t g = 0; g < asg.size(); ++g) {
        GateType t = asg[g];
        const auto& node = topo.gate(g);
        if (inverted(node.left))
            t = neg_left(t);
        if (inverted(node.right))
            t = neg_right(t);
        if (!topo.is_output_layer(g) && !typesets::R.contains(t)) {
            t = neg_out(t);
            negated[g] = true;
        }
        out[g] = t;
    }
    return out;
}

bool validate_domains_sat(const Topology& topo, const Assignment& asg, std::span<const TypeSet> domains) {
    const std::size_t n = topo.num_inputs();
    if (n > 12)
        throw GuardError("validate_domains_sat is limited to 12 inputs, circuit has " + std::to_string(n));
    DiscriminatingSet table;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        BitVector x = bits_from_uint(v, n);
        table.push_back({x, eval_circuit(topo, asg, x)});
    }
    SolverSession session;
    std::optional<CircuitCopy> copy;
    try {
        copy = encode_circuit(session, topo, domains, table);
    } catch (const DomainError&) {
        return false;
    }
    if (session.solve() != sat::Result::Sat)
        return false;
    const Assignment witness = copy->decode(session);
    for (const auto& row : table)
        if (eval_circuit(topo, witness, row.x) != row.z)
            return false;
    return true;
}

SimplificationReport simplification_report(const Topology& topo, const DomainMap& dm) {
    SimplificationReport rep;
    for (auto c : dm.classes) {
        switch (c) {
        case GateClass::S:
            ++rep.num_s;
            break;
        case GateClass::ZLeft:
        case GateClass::ZRight:
            ++rep.num_z;
            break;
        case GateClass::R:
            ++rep.num_r;
            break;
        case GateClass::Full:
            ++rep.num_full;
            break;
        }
    }
    const std::vector<TypeSet> full(topo.num_gates(), typesets::L);
    rep.space_before = search_space_size(full);
    rep.space_after = search_space_size(dm.domains);
    return rep;
}

} // namespace ghsat
