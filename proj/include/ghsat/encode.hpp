#pragma once

/// @file encode.hpp
/// @brief CNF encodings of symbolic gate-type assignments over a public
/// topology: one-hot selectors, per-sample semantics, two-copy miters and
/// blocking clauses, all on top of one incremental solver session.

#include "ghsat/gate_type.hpp"
#include "ghsat/sat/solver.hpp"
#include "ghsat/topology.hpp"

#include <array>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghsat {

/// How gate semantics are tied to the selectors.
///   TruthRows: four row variables per gate and copy (Sel_t -> row = t),
///              8 clauses per gate and sample.
///   Cofactor:  (¬Sel_t ∨ u≠a ∨ w≠b ∨ v=f_t(a,b)) per type, row and sample.
enum class Semantics { TruthRows, Cofactor };

std::string_view to_string(Semantics s);

/// One observed oracle row: visible input x and output z.
struct IoPair {
    BitVector x;
    BitVector z;

    bool operator==(const IoPair&) const = default;
};

using DiscriminatingSet = std::vector<IoPair>;

/// Allocates solver variables under named namespaces ("c0/sel", "c1/s3", ...)
/// and remembers which contiguous ranges belong to which namespace.
class VarManager {
  public:
    struct Range {
        sat::Var first;
        sat::Var last;
        std::string ns;
    };

    explicit VarManager(sat::SolverBackend& solver) : solver_(&solver) {}

    sat::Var allocate(std::string_view ns);
    std::size_t num_vars() const { return solver_->num_vars(); }
    const std::vector<Range>& ranges() const { return ranges_; }
    /// Namespace owning a variable, or empty if unknown.
    std::string_view namespace_of(sat::Var v) const;

  private:
    sat::SolverBackend* solver_;
    std::vector<Range> ranges_;
};

/// An incremental solver plus everything needed to reproduce its formula:
/// the clause log (for DIMACS export) and the variable namespaces.
class SolverSession {
  public:
    explicit SolverSession(std::string_view backend = {}, std::uint64_t seed = 0);

    SolverSession(const SolverSession&) = delete;
    SolverSession& operator=(const SolverSession&) = delete;

    VarManager& vars() { return vars_; }
    const VarManager& vars() const { return vars_; }
    sat::Var new_var(std::string_view ns) { return vars_.allocate(ns); }

    void add_clause(std::span<const sat::Lit> clause);
    void add_clause(std::initializer_list<sat::Lit> clause) {
        add_clause(std::span<const sat::Lit>(clause.begin(), clause.size()));
    }

    sat::Result solve(std::span<const sat::Lit> assumptions = {});
    sat::Result solve(std::initializer_list<sat::Lit> assumptions) {
        return solve(std::span<const sat::Lit>(assumptions.begin(), assumptions.size()));
    }
    /// Literal value in the last model.
    bool value(sat::Lit l) const { return solver_->model_value(l.var()) != l.negative(); }

    void set_deadline(std::optional<sat::Clock::time_point> d) { solver_->set_deadline(d); }

    std::size_t num_clauses() const { return log_.size(); }
    const std::vector<std::vector<sat::Lit>>& clauses() const { return log_; }
    const sat::SolverStats& stats() const { return solver_->stats(); }
    std::string_view backend_name() const { return solver_->name(); }

    /// Standard DIMACS CNF with a comment header listing namespace ranges.
    std::string export_dimacs() const;

    /// Applies to copies created afterwards.
    void set_semantics(Semantics sem) { semantics_ = sem; }
    Semantics semantics() const { return semantics_; }

    /// Fresh copy id for namespacing circuit copies within this session.
    int next_copy_id() { return copies_++; }
    int next_sample_id() { return samples_++; }

  private:
    std::unique_ptr<sat::SolverBackend> solver_;
    VarManager vars_;
    std::vector<std::vector<sat::Lit>> log_;
    int copies_ = 0;
    int samples_ = 0;
    Semantics semantics_ = Semantics::TruthRows;
};

/// Decoding handle for one namespace-isolated symbolic copy of the circuit.
struct CircuitCopy {
    static constexpr sat::Var kAbsent = -1;

    int id = 0;
    Topology topology;
    InputPartition partition;
    std::vector<TypeSet> domains;
    /// selectors[g][tt] is Sel_{g,tt}, or kAbsent if tt is outside D(g).
    std::vector<std::array<sat::Var, 16>> selectors;
    /// One variable per hidden input, shared by every sample of this copy.
    std::vector<sat::Var> hidden;
    /// rows[g][2a+b] is the value of gate g on (a, b); empty under Cofactor.
    std::vector<std::array<sat::Var, 4>> rows;

    sat::Lit selector(std::size_t g, GateType t) const {
        return sat::Lit::make(selectors[g][t.tt()]);
    }
    bool has_selector(std::size_t g, GateType t) const { return selectors[g][t.tt()] != kAbsent; }

    Assignment decode(const SolverSession& s) const;
    BitVector decode_hidden(const SolverSession& s) const;

    /// Assumption literals pinning this copy to a concrete assignment (and
    /// hidden vector). Throws DomainError if a type is outside its domain.
    std::vector<sat::Lit> pin(const Assignment& asg, const BitVector* hidden_values = nullptr) const;
};

/// Allocates selectors, hidden-input variables and (TruthRows) row
/// variables for a new copy and adds its one-hot constraints. Throws DomainError on an empty domain.
CircuitCopy make_copy(SolverSession& s, const Topology& topo, std::span<const TypeSet> domains,
                      const InputPartition& partition);

/// One at-least-one clause over the domain and pairwise at-most-one clauses.
void encode_onehot(SolverSession& s, const CircuitCopy& copy, std::size_t gate);

/// Gate semantics for one evaluation of the copy, given literals for every
/// primary input. Returns the literal of every gate output.
std::vector<sat::Lit> encode_evaluation(SolverSession& s, const CircuitCopy& copy,
                                        std::span<const sat::Lit> input_lits, std::string_view ns);

/// Constrains the copy to map visible input x to output z. Hidden inputs use
/// the copy's shared hidden variables.
void encode_sample(SolverSession& s, const CircuitCopy& copy, const IoPair& row);

/// Single-copy encoding of all rows of `di`.
CircuitCopy encode_circuit(SolverSession& s, const Topology& topo, std::span<const TypeSet> domains,
                           const DiscriminatingSet& di, const InputPartition& partition);
CircuitCopy encode_circuit(SolverSession& s, const Topology& topo, std::span<const TypeSet> domains,
                           const DiscriminatingSet& di);

/// Two isolated copies, both constrained by every row of `di`.
std::pair<CircuitCopy, CircuitCopy> encode_two_circuit(SolverSession& s, const Topology& topo,
                                                       std::span<const TypeSet> d1,
                                                       std::span<const TypeSet> d2,
                                                       const DiscriminatingSet& di,
                                                       const InputPartition& partition);

/// Adds unit clauses freezing a copy to a concrete assignment (and hidden
/// vector).
void freeze(SolverSession& s, const CircuitCopy& copy, const Assignment& asg,
            const BitVector* hidden_values = nullptr);

/// Symbolic distinguishing input shared by two copies.
struct DiffHandle {
    std::vector<sat::Var> inputs;      ///< X, one per visible input
    std::vector<sat::Var> difference;  ///< d_l, one per output

    BitVector decode(const SolverSession& s) const;
};

/// Evaluates both copies on fresh symbolic input X (hidden inputs come from
/// each copy's own variables) and requires at least one output to differ.
DiffHandle diff_constr(SolverSession& s, const CircuitCopy& c1, const CircuitCopy& c2);

/// Blocks a concrete assignment (and hidden vector) in `copy`.
///
/// If `permanent`, the clause is added as is. Otherwise it is guarded by
/// `guard` (or a freshly allocated activation literal when none is given)
/// and only constrains solves that assume the guard; the guard is returned.
/// A type outside its gate's domain makes the block vacuous and nothing is
/// added. Throws DomainError if the clause would be empty.
std::optional<sat::Lit> block_circ(SolverSession& s, const CircuitCopy& copy, const Assignment& asg,
                                   const BitVector* hidden_values, bool permanent,
                                   std::optional<sat::Lit> guard = std::nullopt);

/// Parses DIMACS CNF text into a clause list (used for cross-checks).
struct DimacsFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
};
DimacsFormula parse_dimacs(std::string_view text);

} // namespace ghsat
