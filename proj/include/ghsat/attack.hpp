#pragma once

/// @file attack.hpp
/// @brief Oracles and the counterexample-guided recovery loops.
///
/// Model A: the attacker chooses every primary input. Model B: the inputs
/// listed in AttackConfig::hidden are fixed to an unknown vector y and the
/// attacker recovers (T', y') that matches the oracle on the visible inputs.

#include "ghsat/encode.hpp"
#include "ghsat/simplify.hpp"
#include "ghsat/topology.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ghsat {

/// Black-box evaluation with a per-distinct-input query counter.
class Oracle {
  public:
    virtual ~Oracle() = default;

    /// Cached: repeating an input neither re-evaluates nor counts.
    BitVector query(const BitVector& x);
    std::size_t query_count() const { return cache_.size(); }

    virtual std::size_t num_inputs() const = 0;
    virtual std::size_t num_outputs() const = 0;

  protected:
    virtual BitVector evaluate(const BitVector& x) = 0;

  private:
    std::map<BitVector, BitVector> cache_;
};

class CircuitOracle final : public Oracle {
  public:
    explicit CircuitOracle(Circuit c) : circuit_(std::move(c)) {}
    std::size_t num_inputs() const override { return circuit_.topology.num_inputs(); }
    std::size_t num_outputs() const override { return circuit_.topology.num_outputs(); }

  protected:
    BitVector evaluate(const BitVector& x) override;

  private:
    Circuit circuit_;
};

/// Model B target: the hidden positions of `partition` are fixed to `y`.
class HiddenInputOracle final : public Oracle {
  public:
    HiddenInputOracle(Circuit c, InputPartition partition, BitVector y);
    std::size_t num_inputs() const override { return partition_.num_visible(); }
    std::size_t num_outputs() const override { return circuit_.topology.num_outputs(); }

  protected:
    BitVector evaluate(const BitVector& x) override;

  private:
    Circuit circuit_;
    InputPartition partition_;
    BitVector y_;
};

/// Child process speaking the line protocol: one line of '0'/'1' per query
/// in, one line per answer out. Runs `command` through /bin/sh.
class ExternalOracle final : public Oracle {
  public:
    ExternalOracle(std::string command, std::size_t n, std::size_t m);
    ~ExternalOracle() override;
    ExternalOracle(const ExternalOracle&) = delete;
    ExternalOracle& operator=(const ExternalOracle&) = delete;

    std::size_t num_inputs() const override { return n_; }
    std::size_t num_outputs() const override { return m_; }

  protected:
    BitVector evaluate(const BitVector& x) override;

  private:
    std::string command_;
    std::size_t n_, m_;
    int pid_ = -1;
    std::FILE* to_child_ = nullptr;
    std::FILE* from_child_ = nullptr;
};

enum class ThreatModel { A, B };
enum class Algorithm { Baseline, Optimized };
enum class RecoveryStatus { Recovered, Timeout, Error };

std::string_view to_string(ThreatModel m);
std::string_view to_string(Algorithm a);
std::string_view to_string(RecoveryStatus s);

struct AttackConfig {
    ThreatModel model = ThreatModel::A;
    Algorithm algorithm = Algorithm::Optimized;
    SimplifyMode simplify = SimplifyMode::None;
    int n_max = 3;
    double time_budget = 3600.0; ///< seconds
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> hidden; ///< Model B hidden input indices
    std::string solver;                ///< backend name, empty = default
};

struct AttackStats {
    std::size_t solve_calls = 0;
    std::size_t clauses = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::size_t outer_iterations = 0;
    std::size_t inner_iterations = 0;
    std::size_t fallback_calls = 0;
};

struct RecoveryResult {
    RecoveryStatus status = RecoveryStatus::Error;
    Assignment assignment;
    BitVector hidden_values; ///< y' (Model B)
    DiscriminatingSet di;
    std::size_t query_count = 0;
    double wall_time = 0.0;
    AttackStats stats;
    DomainMap domains;
    BigInt search_space_before;
    BigInt search_space_after;
    std::string message;
};

/// Concrete miter between (T1, Y1) and (T2, Y2) in a fresh session. Returns
/// a visible input on which they differ.
std::optional<BitVector> find_discriminating_input(const Topology& topo, const Assignment& t1,
                                                   const Assignment& t2,
                                                   const InputPartition& partition = {},
                                                   const BitVector* y1 = nullptr,
                                                   const BitVector* y2 = nullptr);

RecoveryResult run_baseline(const Topology& topo, Oracle& oracle, const AttackConfig& cfg);
RecoveryResult run_optimized(const Topology& topo, Oracle& oracle, const AttackConfig& cfg);
/// Model B with the loop selected by cfg.algorithm. An empty hidden list
/// degenerates to Model A.
RecoveryResult run_model_b(const Topology& topo, Oracle& oracle, const AttackConfig& cfg);
/// Dispatches on cfg.model and cfg.algorithm.
RecoveryResult run_attack(const Topology& topo, Oracle& oracle, const AttackConfig& cfg);

} // namespace ghsat
