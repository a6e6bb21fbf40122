#pragma once

/// @file experiment.hpp
/// @brief Grid runner over (circuit x configuration x seed) with JSONL/CSV
/// reports. Every Recovered run is certified before it is reported.
///
/// Spec file (JSON):
///   {
///     "circuits": [
///       {"id": "add4", "gen": "adder", "size": 4},
///       {"id": "pt8",  "gen": "point", "target": "10110010"},
///       {"id": "rnd",  "gen": "random", "inputs": 8, "gates": 12, "seed": 3},
///       {"id": "s27",  "bench": "benchmarks/s27.bench"},
///       {"id": "c",    "json": "circuit.json"}
///     ],
///     "configs": [
///       {"model": "A", "algorithm": "optimized", "simplify": "zsr", "n_max": 3},
///       {"model": "B", "algorithm": "baseline", "hidden": [0, 1], "secret": "01"}
///     ],
///     "seeds": [0], "repeats": 1, "timeout": 3600, "threads": 1,
///     "jsonl": "report.jsonl", "csv": "report.csv"
///   }
/// Relative paths resolve against the spec file's directory. A Model B
/// config without "secret" draws y from the run seed.

#include "ghsat/attack.hpp"

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace ghsat {

struct ExperimentReport {
    std::string circuit_id;
    std::size_t n = 0, m = 0, k = 0;
    std::size_t num_s = 0, num_z = 0, num_r = 0, num_full = 0;
    ThreatModel model = ThreatModel::A;
    Algorithm algorithm = Algorithm::Optimized;
    SimplifyMode simplify = SimplifyMode::None;
    int n_max = 3;
    RecoveryStatus status = RecoveryStatus::Error;
    bool certified = false;
    double wall_time = 0.0;
    std::size_t query_count = 0;
    std::size_t di_size = 0;
    std::string search_space_before;
    std::string search_space_after;
    AttackStats stats;
    std::uint64_t seed = 0;
    std::size_t repeat = 0;
    std::string message;

    std::string to_json() const;
    static std::string csv_header();
    std::string to_csv() const;
};

struct NamedCircuit {
    std::string id;
    Circuit circuit;
};

/// Runs one attack against a simulated oracle and certifies the result. A
/// Recovered result that fails certification is reported as Error.
ExperimentReport run_single(const NamedCircuit& target, const AttackConfig& cfg, std::size_t repeat = 0,
                            const BitVector* secret = nullptr);

struct ExperimentGrid {
    std::vector<NamedCircuit> circuits;
    std::vector<AttackConfig> configs;
    /// Per-config Model B secrets; empty entries are drawn from the seed.
    std::vector<BitVector> secrets;
    std::vector<std::uint64_t> seeds{0};
    std::size_t repeats = 1;
    std::size_t threads = 1;
};

/// Parses a spec file. Throws ParseError on schema violations.
ExperimentGrid load_experiment(const std::filesystem::path& spec_file, std::filesystem::path* jsonl = nullptr,
                               std::filesystem::path* csv = nullptr);

/// Executes every cell; `sink` is called once per finished record from a
/// single thread at a time. Per-run failures are recorded, not thrown.
std::vector<ExperimentReport> run_grid(const ExperimentGrid& grid,
                                       const std::function<void(const ExperimentReport&)>& sink = {});

/// load_experiment + run_grid, writing the JSONL and CSV files named in
/// the spec (if any).
std::vector<ExperimentReport> run_experiment(const std::filesystem::path& spec_file);

} // namespace ghsat
