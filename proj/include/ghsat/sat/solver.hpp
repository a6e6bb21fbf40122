#pragma once

/// @file solver.hpp
/// @brief Narrow incremental SAT-solver contract and the bundled CDCL backend.
///
/// The attack only needs three things from a solver: add a permanent clause,
/// solve under per-call assumptions, and read back a model. Anything that
/// implements SolverBackend can be plugged in; the backend is chosen by name
/// or through the GHSAT_SOLVER environment variable.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghsat::sat {

using Var = std::int32_t;

/// Literal as 2 * var + sign, sign = 1 for the negative literal.
struct Lit {
    std::int32_t x = -2;

    static constexpr Lit make(Var v, bool negative = false) { return Lit{2 * v + (negative ? 1 : 0)}; }
    /// From a DIMACS integer (1-based, negative = complemented).
    static constexpr Lit from_dimacs(int d) { return make(d > 0 ? d - 1 : -d - 1, d < 0); }

    constexpr Var var() const { return x >> 1; }
    constexpr bool negative() const { return x & 1; }
    constexpr int to_dimacs() const { return negative() ? -(var() + 1) : var() + 1; }
    constexpr Lit operator~() const { return Lit{x ^ 1}; }
    constexpr Lit operator^(bool flip) const { return Lit{x ^ (flip ? 1 : 0)}; }

    constexpr auto operator<=>(const Lit&) const = default;
};

enum class Result { Sat, Unsat, Unknown };

struct SolverStats {
    std::uint64_t solves = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
};

using Clock = std::chrono::steady_clock;

class SolverBackend {
  public:
    virtual ~SolverBackend() = default;

    virtual Var new_var() = 0;
    virtual std::size_t num_vars() const = 0;
    /// Adds a permanent clause. An empty clause makes the solver UNSAT forever.
    virtual void add_clause(std::span<const Lit> clause) = 0;
    /// Assumptions hold for this call only. Returns Unknown if the deadline
    /// passed during search.
    virtual Result solve(std::span<const Lit> assumptions) = 0;
    /// Value of a variable in the last model. Only valid after Sat.
    virtual bool model_value(Var v) const = 0;

    virtual void set_deadline(std::optional<Clock::time_point> deadline) = 0;
    virtual void set_seed(std::uint64_t seed) = 0;
    virtual const SolverStats& stats() const = 0;
    virtual std::string_view name() const = 0;
};

/// Creates a backend by name. An empty name consults GHSAT_SOLVER and falls
/// back to "cdcl". Throws ghsat::Error for an unknown backend.
std::unique_ptr<SolverBackend> make_solver(std::string_view name = {});

/// Names accepted by make_solver.
std::vector<std::string> available_solvers();

} // namespace ghsat::sat
