#include "ghsat/encode.hpp"

#include "ghsat/errors.hpp"

#include <algorithm>
#include <sstream>

namespace ghsat {

using sat::Lit;
using sat::Var;

std::string_view to_string(Semantics s) { return s == Semantics::TruthRows ? "rows" : "cofactor"; }

sat::Var VarManager::allocate(std::string_view ns) {
    const Var v = solver_->new_var();
    if (!ranges_.empty() && ranges_.back().ns == ns && ranges_.back().last + 1 == v)
        ranges_.back().last = v;
    else
        ranges_.push_back({v, v, std::string(ns)});
    return v;
}

std::string_view VarManager::namespace_of(sat::Var v) const {
    auto it = std::upper_bound(ranges_.begin(), ranges_.end(), v,
                               [](Var x, const Range& r) { return x < r.first; });
    if (it == ranges_.begin())
        return {};
    --it;
    return v <= it->last ? std::string_view(it->ns) : std::string_view{};
}

SolverSession::SolverSession(std::string_view backend, std::uint64_t seed)
    : solver_(sat::make_solver(backend)), vars_(*solver_) {
    if (seed)
        solver_->set_seed(seed);
}

void SolverSession::add_clause(std::span<const Lit> clause) {
    std::vector<Lit> c(clause.begin(), clause.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 1; i < c.size(); ++i)
        if (c[i] == ~c[i - 1])
            return;
    solver_->add_clause(c);
    log_.push_back(std::move(c));
}

sat::Result SolverSession::solve(std::span<const Lit> assumptions) { return solver_->solve(assumptions); }

std::string SolverSession::export_dimacs() const {
    std::ostringstream out;
    for (const auto& r : vars_.ranges())
        out << "c ns " << r.ns << ' ' << r.first + 1 << '-' << r.last + 1 << '\n';
    out << "p cnf " << vars_.num_vars() << ' ' << log_.size() << '\n';
    for (const auto& c : log_) {
        for (Lit l : c)
            out << l.to_dimacs() << ' ';
        out << "0\n";
    }
    return out.str();
}

Assignment CircuitCopy::decode(const SolverSession& s) const {
    Assignment asg(selectors.size());
    for (std::size_t g = 0; g < selectors.size(); ++g) {
        for (std::uint8_t t = 0; t < 16; ++t) {
            const Var v = selectors[g][t];
            if (v != kAbsent && s.value(Lit::make(v))) {
                asg[g] = GateType(t);
                break;
            }
        }
    }
    return asg;
}

BitVector CircuitCopy::decode_hidden(const SolverSession& s) const {
    BitVector y(hidden.size());
    for (std::size_t j = 0; j < hidden.size(); ++j)
        y[j] = s.value(Lit::make(hidden[j]));
    return y;
}

std::vector<Lit> CircuitCopy::pin(const Assignment& asg, const BitVector* hidden_values) const {
    if (asg.size() != selectors.size())
        throw ShapeError("assignment length does not match gate count");
    std::vector<Lit> lits;
    lits.reserve(asg.size() + hidden.size());
    for (std::size_t g = 0; g < asg.size(); ++g) {
        if (!has_selector(g, asg[g]))
            throw DomainError("type " + std::string(asg[g].name()) + " is outside the domain of gate " +
                              std::to_string(g));
        lits.push_back(selector(g, asg[g]));
    }
    if (hidden_values) {
        if (hidden_values->size() != hidden.size())
            throw ShapeError("hidden vector width does not match the partition");
        for (std::size_t j = 0; j < hidden.size(); ++j)
            lits.push_back(Lit::make(hidden[j], !(*hidden_values)[j]));
    }
    return lits;
}

CircuitCopy make_copy(SolverSession& s, const Topology& topo, std::span<const TypeSet> domains,
                      const InputPartition& partition) {
    if (domains.size() != topo.num_gates())
        throw ShapeError("domain map does not match gate count");
    if (partition.total() != topo.num_inputs())
        throw ShapeError("input partition does not match circuit inputs");
    CircuitCopy copy;
    copy.id = s.next_copy_id();
    copy.topology = topo;
    copy.partition = partition;
    copy.domains.assign(domains.begin(), domains.end());
    copy.selectors.resize(topo.num_gates());
    const std::string ns = "c" + std::to_string(copy.id);
    for (std::size_t g = 0; g < topo.num_gates(); ++g) {
        if (domains[g].empty())
            throw DomainError("gate " + std::to_string(g) + " has an empty domain");
        copy.selectors[g].fill(CircuitCopy::kAbsent);
        for (auto t : domains[g].members())
            copy.selectors[g][t.tt()] = s.new_var(ns + "/sel");
    }
    for (std::size_t j = 0; j < partition.num_hidden(); ++j)
        copy.hidden.push_back(s.new_var(ns + "/y"));
    for (std::size_t g = 0; g < topo.num_gates(); ++g)
        encode_onehot(s, copy, g);
    if (s.semantics() == Semantics::TruthRows) {
        copy.rows.resize(topo.num_gates());
        for (std::size_t g = 0; g < topo.num_gates(); ++g) {
            auto& row = copy.rows[g];
            for (auto& v : row)
                v = s.new_var(ns + "/row");
            auto differs = [&](GateType t) {
                std::vector<Lit> c;
                for (int r = 0; r < 4; ++r)
                    c.push_back(Lit::make(row[r], t.apply(r >> 1, r & 1)));
                return c;
            };
            for (auto t : all_gate_types()) {
                auto c = differs(t);
                if (!domains[g].contains(t)) {
                    s.add_clause(c);
                    continue;
                }
                const Lit sel = copy.selector(g, t);
                for (int r = 0; r < 4; ++r)
                    s.add_clause({~sel, ~c[r]});
                c.push_back(sel);
                s.add_clause(c);
            }
        }
    }
    return copy;
}

void encode_onehot(SolverSession& s, const CircuitCopy& copy, std::size_t gate) {
    const auto members = copy.domains[gate].members();
    if (members.empty())
        throw DomainError("gate " + std::to_string(gate) + " has an empty domain");
    std::vector<Lit> at_least_one;
    for (auto t : members)
        at_least_one.push_back(copy.selector(gate, t));
    s.add_clause(at_least_one);
    for (std::size_t i = 0; i < at_least_one.size(); ++i)
        for (std::size_t j = i + 1; j < at_least_one.size(); ++j)
            s.add_clause({~at_least_one[i], ~at_least_one[j]});
}

namespace {

/// A signal during one evaluation: a known constant or a solver literal.
struct Signal {
    bool constant = false;
    bool value = false;
    Lit lit{};

    static Signal of(bool v) { return {true, v, {}}; }
    static Signal of(Lit l) { return {false, false, l}; }
};

std::vector<Signal> evaluate(SolverSession& s, const CircuitCopy& copy, const std::vector<Signal>& inputs,
                             const std::string& ns) {
    const auto& topo = copy.topology;
    std::vector<Signal> gate(topo.num_gates());
    auto sig = [&](NodeRef r) { return r.is_input() ? inputs[r.index] : gate[r.index]; };
    for (std::size_t g = 0; g < topo.num_gates(); ++g) {
        const Signal u = sig(topo.gate(g).left);
        const Signal w = sig(topo.gate(g).right);
        if (!copy.rows.empty() && u.constant && w.constant) {
            gate[g] = Signal::of(Lit::make(copy.rows[g][2 * u.value + w.value]));
            continue;
        }
        const Lit out = Lit::make(s.new_var(ns));
        gate[g] = Signal::of(out);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                // (u = a) ∧ (w = b) → out = f(a, b); constant operands drop
                // their literal or the whole row.
                std::vector<Lit> guard;
                bool live = true;
                for (const auto& [x, bit] : {std::pair{u, a}, std::pair{w, b}}) {
                    if (x.constant)
                        live = live && x.value == (bit == 1);
                    else
                        guard.push_back(x.lit ^ (bit == 1));
                }
                if (!live)
                    continue;
                if (!copy.rows.empty()) {
                    const Lit row = Lit::make(copy.rows[g][2 * a + b]);
                    auto c = guard;
                    c.push_back(~row);
                    c.push_back(out);
                    s.add_clause(c);
                    guard.push_back(row);
                    guard.push_back(~out);
                    s.add_clause(guard);
                    continue;
                }
                for (auto t : copy.domains[g].members()) {
                    auto c = guard;
                    c.push_back(~copy.selector(g, t));
                    c.push_back(out ^ !t.apply(a, b));
                    s.add_clause(c);
                }
            }
        }
    }
    return gate;
}

} // namespace

std::vector<Lit> encode_evaluation(SolverSession& s, const CircuitCopy& copy,
                                   std::span<const Lit> input_lits, std::string_view ns) {
    const auto& topo = copy.topology;
    if (input_lits.size() != topo.num_inputs())
        throw ShapeError("input literal count does not match circuit inputs");
    std::vector<Signal> inputs;
    for (Lit l : input_lits)
        inputs.push_back(Signal::of(l));
    std::vector<Lit> out;
    for (const auto& sig : evaluate(s, copy, inputs, std::string(ns)))
        out.push_back(sig.lit);
    return out;
}

void encode_sample(SolverSession& s, const CircuitCopy& copy, const IoPair& row) {
    const auto& topo = copy.topology;
    const auto& part = copy.partition;
    if (row.x.size() != part.num_visible())
        throw ShapeError("sample input has width " + std::to_string(row.x.size()) + ", expected " +
                         std::to_string(part.num_visible()));
    if (row.z.size() != topo.num_outputs())
        throw ShapeError("sample output has width " + std::to_string(row.z.size()) + ", expected " +
                         std::to_string(topo.num_outputs()));
    const std::string ns = "c" + std::to_string(copy.id) + "/s" + std::to_string(s.next_sample_id());
    std::vector<Signal> inputs(topo.num_inputs());
    for (std::uint32_t i = 0; i < topo.num_inputs(); ++i) {
        if (part.is_hidden(i)) {
            inputs[i] = Signal::of(Lit::make(copy.hidden[part.slot(i)]));
        } else if (!copy.rows.empty()) {
            inputs[i] = Signal::of(row.x[part.slot(i)]);
        } else {
            const Lit x = Lit::make(s.new_var(ns));
            s.add_clause({x ^ !row.x[part.slot(i)]});
            inputs[i] = Signal::of(x);
        }
    }
    const auto gates = evaluate(s, copy, inputs, ns);
    for (std::size_t h = 0; h < topo.num_outputs(); ++h) {
        const NodeRef r = topo.outputs()[h];
        const Signal o = r.is_input() ? inputs[r.index] : gates[r.index];
        if (!o.constant)
            s.add_clause({o.lit ^ !row.z[h]});
        else if (o.value != row.z[h])
            s.add_clause(std::span<const Lit>{});
    }
}

CircuitCopy encode_circuit(SolverSession& s, const Topology& topo, std::span<const TypeSet> domains,
                           const DiscriminatingSet& di, const InputPartition& partition) {
    CircuitCopy copy = make_copy(s, topo, domains, partition);
    for (const auto& row : di)
        encode_sample(s, copy, row);
    return copy;
}

CircuitCopy encode_circuit(SolverSession& s, const Topology& topo, std::span<const TypeSet> domains,
                           const DiscriminatingSet& di) {
    return encode_circuit(s, topo, domains, di, InputPartition::all_visible(topo.num_inputs()));
}

std::pair<CircuitCopy, CircuitCopy> encode_two_circuit(SolverSession& s, const Topology& topo,
                                                       std::span<const TypeSet> d1,
                                                       std::span<const TypeSet> d2,
                                                       const DiscriminatingSet& di,
                                                       const InputPartition& partition) {
    CircuitCopy first = encode_circuit(s, topo, d1, di, partition);
    CircuitCopy second = encode_circuit(s, topo, d2, di, partition);
    return {std::move(first), std::move(second)};
}

void freeze(SolverSession& s, const CircuitCopy& copy, const Assignment& asg, const BitVector* hidden_values) {
    for (Lit l : copy.pin(asg, hidden_values))
        s.add_clause({l});
}

BitVector DiffHandle::decode(const SolverSession& s) const {
    BitVector x(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i)
        x[i] = s.value(Lit::make(inputs[i]));
    return x;
}

DiffHandle diff_constr(SolverSession& s, const CircuitCopy& c1, const CircuitCopy& c2) {
    if (!(c1.topology == c2.topology))
        throw TopologyError("miter copies must share one topology");
    const auto& topo = c1.topology;
    const auto& part = c1.partition;
    const std::string ns = "diff" + std::to_string(s.next_sample_id());
    DiffHandle handle;
    for (std::size_t i = 0; i < part.num_visible(); ++i)
        handle.inputs.push_back(s.new_var(ns + "/x"));

    auto outputs_of = [&](const CircuitCopy& c) {
        std::vector<Lit> inputs(topo.num_inputs());
        for (std::uint32_t i = 0; i < topo.num_inputs(); ++i)
            inputs[i] = part.is_hidden(i) ? Lit::make(c.hidden[part.slot(i)])
                                          : Lit::make(handle.inputs[part.slot(i)]);
        const auto gates = encode_evaluation(s, c, inputs, ns + "/c" + std::to_string(c.id));
        std::vector<Lit> outs;
        for (NodeRef r : topo.outputs())
            outs.push_back(r.is_input() ? inputs[r.index] : gates[r.index]);
        return outs;
    };
    const auto o1 = outputs_of(c1);
    const auto o2 = outputs_of(c2);

    std::vector<Lit> any_difference;
    for (std::size_t h = 0; h < o1.size(); ++h) {
        const Lit d = Lit::make(s.new_var(ns + "/d"));
        handle.difference.push_back(d.var());
        s.add_clause({~d, o1[h], o2[h]});
        s.add_clause({~d, ~o1[h], ~o2[h]});
        s.add_clause({d, ~o1[h], o2[h]});
        s.add_clause({d, o1[h], ~o2[h]});
        any_difference.push_back(d);
    }
    s.add_clause(any_difference);
    return handle;
}

std::optional<Lit> block_circ(SolverSession& s, const CircuitCopy& copy, const Assignment& asg,
                              const BitVector* hidden_values, bool permanent, std::optional<Lit> guard) {
    if (asg.size() != copy.selectors.size())
        throw ShapeError("assignment length does not match gate count");
    std::vector<Lit> clause;
    for (std::size_t g = 0; g < asg.size(); ++g) {
        if (!copy.has_selector(g, asg[g]))
            return std::nullopt;
        clause.push_back(~copy.selector(g, asg[g]));
    }
    if (hidden_values) {
        if (hidden_values->size() != copy.hidden.size())
            throw ShapeError("hidden vector width does not match the partition");
        for (std::size_t j = 0; j < copy.hidden.size(); ++j)
            clause.push_back(Lit::make(copy.hidden[j], (*hidden_values)[j]));
    }
    if (clause.empty())
        throw DomainError("blocking clause would be empty");
    if (permanent) {
        s.add_clause(clause);
        return std::nullopt;
    }
    if (!guard)
        guard = Lit::make(s.new_var("act"));
    clause.push_back(~*guard);
    s.add_clause(clause);
    return guard;
}

DimacsFormula parse_dimacs(std::string_view text) {
    DimacsFormula f;
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<int> current;
    bool header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c')
            continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, cnf;
            std::size_t nclauses = 0;
            if (!(ls >> p >> cnf >> f.num_vars >> nclauses) || cnf != "cnf")
                throw ParseError("malformed DIMACS header", lineno);
            header = true;
            continue;
        }
        if (!header)
            throw ParseError("clause before DIMACS header", lineno);
        int lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                f.clauses.push_back(std::move(current));
                current.clear();
            } else {
                current.push_back(lit);
            }
        }
        if (!ls.eof())
            throw ParseError("malformed DIMACS literal", lineno);
    }
    if (!current.empty())
        f.clauses.push_back(std::move(current));
    return f;
}

} // namespace ghsat
