#include "ghsat/netlist.hpp"

#include "ghsat/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ghsat {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::optional<CellOp> parse_op(const std::string& label) {
    static const std::map<std::string, CellOp> ops = {
        {"AND", CellOp::And},  {"NAND", CellOp::Nand}, {"OR", CellOp::Or},
        {"NOR", CellOp::Nor},  {"XOR", CellOp::Xor},   {"XNOR", CellOp::Xnor},
        {"NOT", CellOp::Not},  {"BUFF", CellOp::Buff}, {"BUF", CellOp::Buff},
        {"DFF", CellOp::Dff},
    };
    auto it = ops.find(upper(label));
    if (it == ops.end())
        return std::nullopt;
    return it->second;
}

/// "NAME(args)" -> (NAME, args); no nesting in .bench.
bool split_call(std::string_view text, std::string& head, std::string& args) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        return false;
    if (!trim(text.substr(close + 1)).empty())
        return false;
    head = trim(text.substr(0, open));
    args = std::string(text.substr(open + 1, close - open - 1));
    return true;
}

std::vector<std::string> split_args(const std::string& args) {
    std::vector<std::string> out;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

bool valid_wire(const std::string& w) {
    return !w.empty() && std::none_of(w.begin(), w.end(), [](unsigned char c) {
        return std::isspace(c) || c == '(' || c == ')' || c == ',' || c == '=';
    });
}

/// Cells in dependency order; throws on cycles. Wires not defined by any
/// cell are treated as already available.
std::vector<std::size_t> topo_order(const RawNetlist& nl) {
    std::unordered_map<std::string, std::size_t> driver;
    for (std::size_t i = 0; i < nl.cells.size(); ++i)
        driver.emplace(nl.cells[i].output, i);
    std::vector<std::size_t> order;
    std::vector<int> state(nl.cells.size(), 0);
    for (std::size_t root = 0; root < nl.cells.size(); ++root) {
        if (state[root])
            continue;
        // Iterative DFS: (cell, next operand index).
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        state[root] = 1;
        while (!stack.empty()) {
            auto& [cell, next] = stack.back();
            if (next < nl.cells[cell].operands.size()) {
                const auto& w = nl.cells[cell].operands[next++];
                auto it = driver.find(w);
                if (it == driver.end())
                    continue;
                if (state[it->second] == 1)
                    throw TopologyError("combinational cycle through wire '" + w + "'");
                if (state[it->second] == 0) {
                    state[it->second] = 1;
                    stack.emplace_back(it->second, 0);
                }
            } else {
                state[cell] = 2;
                order.push_back(cell);
                stack.pop_back();
            }
        }
    }
    return order;
}

bool eval_op(CellOp op, const std::vector<bool>& v) {
    switch (op) {
    case CellOp::And:
    case CellOp::Nand: {
        bool r = std::all_of(v.begin(), v.end(), [](bool b) { return b; });
        return op == CellOp::And ? r : !r;
    }
    case CellOp::Or:
    case CellOp::Nor: {
        bool r = std::any_of(v.begin(), v.end(), [](bool b) { return b; });
        return op == CellOp::Or ? r : !r;
    }
    case CellOp::Xor:
    case CellOp::Xnor: {
        bool r = false;
        for (bool b : v)
            r ^= b;
        return op == CellOp::Xor ? r : !r;
    }
    case CellOp::Not:
        return !v.at(0);
    case CellOp::Buff:
        return v.at(0);
    case CellOp::Dff:
        break;
    }
    throw Error("DFF cells cannot be evaluated combinationally");
}

GateType two_input_type(CellOp op) {
    switch (op) {
    case CellOp::And:
        return types::AND;
    case CellOp::Nand:
        return types::NAND;
    case CellOp::Or:
        return types::OR;
    case CellOp::Nor:
        return types::NOR;
    case CellOp::Xor:
        return types::XOR;
    case CellOp::Xnor:
        return types::XNOR;
    default:
        break;
    }
    throw Error("not a two-input operator: " + std::string(to_string(op)));
}

} // namespace

std::string_view to_string(CellOp op) {
    switch (op) {
    case CellOp::And:
        return "AND";
    case CellOp::Nand:
        return "NAND";
    case CellOp::Or:
        return "OR";
    case CellOp::Nor:
        return "NOR";
    case CellOp::Xor:
        return "XOR";
    case CellOp::Xnor:
        return "XNOR";
    case CellOp::Not:
        return "NOT";
    case CellOp::Buff:
        return "BUFF";
    case CellOp::Dff:
        return "DFF";
    }
    return "?";
}

RawNetlist parse_bench(std::string_view text) {
    RawNetlist nl;
    std::unordered_map<std::string, std::size_t> defined_at;
    std::vector<std::pair<std::string, std::size_t>> used;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;

    auto define = [&](const std::string& wire, std::size_t line) {
        if (!valid_wire(wire))
            throw ParseError("invalid wire name '" + wire + "'", line);
        auto [it, inserted] = defined_at.emplace(wire, line);
        if (!inserted)
            throw ParseError("wire '" + wire + "' already defined on line " + std::to_string(it->second), line);
    };

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::string head, args;
            if (!split_call(line, head, args))
                throw ParseError("cannot parse '" + line + "'", lineno);
            const std::string kw = upper(head);
            const std::string wire = trim(args);
            if (kw == "INPUT") {
                define(wire, lineno);
                nl.inputs.push_back(wire);
            } else if (kw == "OUTPUT") {
                if (!valid_wire(wire))
                    throw ParseError("invalid wire name '" + wire + "'", lineno);
                nl.outputs.push_back(wire);
                used.emplace_back(wire, lineno);
            } else {
                throw ParseError("unknown declaration '" + head + "'", lineno);
            }
            continue;
        }
        const std::string lhs = trim(std::string_view(line).substr(0, eq));
        std::string head, args;
        if (!split_call(std::string_view(line).substr(eq + 1), head, args))
            throw ParseError("cannot parse cell definition '" + line + "'", lineno);
        const auto op = parse_op(head);
        if (!op)
            throw ParseError("unknown operator '" + head + "'", lineno);
        RawCell cell{*op, lhs, split_args(args), lineno};
        if (cell.operands.empty() || std::any_of(cell.operands.begin(), cell.operands.end(),
                                                 [](const std::string& w) { return !valid_wire(w); }))
            throw ParseError("malformed operand list for '" + lhs + "'", lineno);
        const bool unary = *op == CellOp::Not || *op == CellOp::Buff || *op == CellOp::Dff;
        if (unary && cell.operands.size() != 1)
            throw ParseError(std::string(to_string(*op)) + " takes exactly one operand", lineno);
        define(lhs, lineno);
        for (const auto& w : cell.operands)
            used.emplace_back(w, lineno);
        nl.cells.push_back(std::move(cell));
    }
    for (const auto& [wire, line] : used)
        if (!defined_at.count(wire))
            throw ParseError("undefined wire '" + wire + "'", line);
    return nl;
}

RawNetlist unroll_sequential(const RawNetlist& nl) {
    RawNetlist out;
    out.inputs = nl.inputs;
    out.outputs = nl.outputs;
    for (const auto& cell : nl.cells) {
        if (cell.op == CellOp::Dff) {
            out.inputs.push_back(cell.output);
            out.outputs.push_back(cell.operands.front());
        } else {
            out.cells.push_back(cell);
        }
    }
    return out;
}

RawNetlist decompose_multi_input(const RawNetlist& nl) {
    RawNetlist out;
    out.inputs = nl.inputs;
    out.outputs = nl.outputs;
    std::unordered_set<std::string> names(nl.inputs.begin(), nl.inputs.end());
    for (const auto& c : nl.cells)
        names.insert(c.output);
    auto fresh = [&](const std::string& base) {
        for (std::size_t i = 1;; ++i) {
            std::string candidate = base + "$" + std::to_string(i);
            if (names.insert(candidate).second)
                return candidate;
        }
    };
    for (const auto& cell : nl.cells) {
        const std::size_t p = cell.operands.size();
        if (cell.op == CellOp::Not || cell.op == CellOp::Buff || cell.op == CellOp::Dff || p == 2) {
            out.cells.push_back(cell);
            continue;
        }
        const bool inverting = cell.op == CellOp::Nand || cell.op == CellOp::Nor || cell.op == CellOp::Xnor;
        if (p == 1) {
            out.cells.push_back({inverting ? CellOp::Not : CellOp::Buff, cell.output, cell.operands, cell.line});
            continue;
        }
        CellOp base = cell.op;
        if (cell.op == CellOp::Nand)
            base = CellOp::And;
        else if (cell.op == CellOp::Nor)
            base = CellOp::Or;
        else if (cell.op == CellOp::Xnor)
            base = CellOp::Xor;
        std::string acc = cell.operands[0];
        for (std::size_t i = 1; i < p; ++i) {
            const bool last = i + 1 == p;
            std::string target = last ? cell.output : fresh(cell.output);
            out.cells.push_back({last ? cell.op : base, target, {acc, cell.operands[i]}, cell.line});
            acc = std::move(target);
        }
    }
    return out;
}

Circuit normalize(const RawNetlist& nl) {
    struct Signal {
        NodeRef node;
        bool inverted = false;
    };
    std::unordered_map<std::string, Signal> signal;
    for (std::uint32_t i = 0; i < nl.inputs.size(); ++i)
        signal[nl.inputs[i]] = {NodeRef::input(i), false};

    std::vector<GateNode> gates;
    Assignment types;
    for (std::size_t idx : topo_order(nl)) {
        const auto& cell = nl.cells[idx];
        auto lookup = [&](const std::string& w) {
            auto it = signal.find(w);
            if (it == signal.end())
                throw TopologyError("wire '" + w + "' is undriven");
            return it->second;
        };
        switch (cell.op) {
        case CellOp::Dff:
            throw TopologyError("normalize requires a DFF-free netlist (line " + std::to_string(cell.line) + ")");
        case CellOp::Buff:
            signal[cell.output] = lookup(cell.operands[0]);
            break;
        case CellOp::Not: {
            Signal s = lookup(cell.operands[0]);
            s.inverted = !s.inverted;
            signal[cell.output] = s;
            break;
        }
        default: {
            if (cell.operands.size() != 2)
                throw TopologyError("cell '" + cell.output + "' has fan-in " +
                                    std::to_string(cell.operands.size()) + "; decompose first");
            const Signal a = lookup(cell.operands[0]);
            const Signal b = lookup(cell.operands[1]);
            GateType t = two_input_type(cell.op);
            if (a.inverted)
                t = neg_left(t);
            if (b.inverted)
                t = neg_right(t);
            signal[cell.output] = {NodeRef::gate(static_cast<std::uint32_t>(gates.size())), false};
            gates.push_back({a.node, b.node});
            types.push_back(t);
        }
        }
    }

    std::vector<Signal> outs;
    for (const auto& w : nl.outputs) {
        auto it = signal.find(w);
        if (it == signal.end())
            throw TopologyError("output wire '" + w + "' is undriven");
        outs.push_back(it->second);
    }

    // A negated output can be folded into its driver when nothing but
    // negated outputs observe that driver.
    std::vector<bool> gate_consumed(gates.size(), false);
    for (const auto& g : gates)
        for (NodeRef r : {g.left, g.right})
            if (r.is_gate())
                gate_consumed[r.index] = true;
    std::vector<int> plain_refs(gates.size(), 0);
    for (const auto& s : outs)
        if (s.node.is_gate() && !s.inverted)
            ++plain_refs[s.node.index];

    std::vector<bool> folded(gates.size(), false);
    std::map<NodeRef, NodeRef> projection;
    std::vector<NodeRef> outputs;
    for (const auto& s : outs) {
        if (!s.inverted) {
            outputs.push_back(s.node);
            continue;
        }
        if (s.node.is_gate() && !gate_consumed[s.node.index] && plain_refs[s.node.index] == 0) {
            if (!folded[s.node.index]) {
                types[s.node.index] = neg_out(types[s.node.index]);
                folded[s.node.index] = true;
            }
            outputs.push_back(s.node);
            continue;
        }
        auto it = projection.find(s.node);
        if (it == projection.end()) {
            const NodeRef p = NodeRef::gate(static_cast<std::uint32_t>(gates.size()));
            gates.push_back({s.node, s.node});
            types.push_back(types::NOT_A);
            it = projection.emplace(s.node, p).first;
        }
        outputs.push_back(it->second);
    }
    return {Topology(nl.inputs.size(), std::move(gates), std::move(outputs)), std::move(types)};
}

Circuit load_bench(std::string_view text) {
    return normalize(decompose_multi_input(unroll_sequential(parse_bench(text))));
}

BitVector eval_raw(const RawNetlist& nl, const BitVector& x) {
    if (x.size() != nl.inputs.size())
        throw ShapeError("input vector width does not match netlist inputs");
    std::unordered_map<std::string, bool> value;
    for (std::size_t i = 0; i < nl.inputs.size(); ++i)
        value[nl.inputs[i]] = x[i];
    for (std::size_t idx : topo_order(nl)) {
        const auto& cell = nl.cells[idx];
        std::vector<bool> args;
        for (const auto& w : cell.operands)
            args.push_back(value.at(w));
        value[cell.output] = eval_op(cell.op, args);
    }
    BitVector z;
    for (const auto& w : nl.outputs)
        z.push_back(value.at(w));
    return z;
}

namespace {

using nlohmann::json;

json ref_to_json(NodeRef r) { return r.is_input() ? json{{"in", r.index}} : json{{"g", r.index}}; }

NodeRef ref_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || j.size() != 1)
        throw ParseError(where + ": reference must be {\"in\": i} or {\"g\": j}");
    auto parse_index = [&](const json& v) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ParseError(where + ": reference index must be a non-negative integer");
        return static_cast<std::uint32_t>(v.get<long long>());
    };
    if (j.contains("in"))
        return NodeRef::input(parse_index(j["in"]));
    if (j.contains("g"))
        return NodeRef::gate(parse_index(j["g"]));
    throw ParseError(where + ": reference must be {\"in\": i} or {\"g\": j}");
}

} // namespace

std::string write_json(const Topology& topo, const Assignment* asg) {
    if (asg && asg->size() != topo.num_gates())
        throw ShapeError("assignment length does not match gate count");
    json gates = json::array();
    for (std::size_t g = 0; g < topo.num_gates(); ++g) {
        json node{{"l", ref_to_json(topo.gate(g).left)}, {"r", ref_to_json(topo.gate(g).right)}};
        if (asg)
            node["type"] = std::string((*asg)[g].name());
        gates.push_back(std::move(node));
    }
    json outputs = json::array();
    for (NodeRef r : topo.outputs())
        outputs.push_back(ref_to_json(r));
    json doc{{"n", topo.num_inputs()}, {"m", topo.num_outputs()}, {"gates", gates}, {"outputs", outputs}};
    return doc.dump(1) + "\n";
}

JsonCircuit read_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("circuit document must be a JSON object");
    if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() < 0)
        throw ParseError("field 'n' must be a non-negative integer");
    if (!doc.contains("gates") || !doc["gates"].is_array())
        throw ParseError("field 'gates' must be an array");
    if (!doc.contains("outputs") || !doc["outputs"].is_array())
        throw ParseError("field 'outputs' must be an array");
    const auto n = doc["n"].get<std::size_t>();

    std::vector<GateNode> gates;
    Assignment asg;
    std::size_t typed = 0;
    for (std::size_t g = 0; g < doc["gates"].size(); ++g) {
        const auto& node = doc["gates"][g];
        const std::string where = "gate " + std::to_string(g);
        if (!node.is_object() || !node.contains("l") || !node.contains("r"))
            throw ParseError(where + ": needs 'l' and 'r'");
        gates.push_back({ref_from_json(node["l"], where), ref_from_json(node["r"], where)});
        if (node.contains("type")) {
            if (!node["type"].is_string())
                throw ParseError(where + ": 'type' must be a string");
            auto t = GateType::from_name(node["type"].get<std::string>());
            if (!t)
                throw ParseError(where + ": unknown gate type '" + node["type"].get<std::string>() + "'");
            asg.push_back(*t);
            ++typed;
        }
    }
    if (typed != 0 && typed != gates.size())
        throw ParseError("either every gate or no gate may carry a 'type'");
    std::vector<NodeRef> outputs;
    for (std::size_t h = 0; h < doc["outputs"].size(); ++h)
        outputs.push_back(ref_from_json(doc["outputs"][h], "output " + std::to_string(h)));
    if (doc.contains("m") && (!doc["m"].is_number_integer() || doc["m"].get<std::size_t>() != outputs.size()))
        throw ParseError("field 'm' does not match the number of outputs");

    JsonCircuit out;
    try {
        out.topology = Topology(n, std::move(gates), std::move(outputs));
    } catch (const TopologyError& e) {
        throw ParseError(e.what());
    }
    if (typed)
        out.assignment = std::move(asg);
    return out;
}

} // namespace ghsat
