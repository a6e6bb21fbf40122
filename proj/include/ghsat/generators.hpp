#pragma once

/// @file generators.hpp
/// @brief Benchmark circuit families. All multi-bit ports are LSB-first and
/// operand a precedes operand b in the input vector.

#include "ghsat/topology.hpp"

#include <random>

namespace ghsat {

/// Ripple-carry adder: inputs (a, b), outputs (sum[0..w-1], carry).
Circuit gen_adder(std::size_t w);

/// Outputs (a < b, a == b) from an MSB-first ripple.
Circuit gen_comparator(std::size_t w);

/// Popcount of a XOR b through a balanced adder tree; ceil(log2(w+1)) outputs.
Circuit gen_hamming(std::size_t w);

/// Single output, 1 exactly on x == target. Left-deep AND tree with the
/// per-bit comparison folded into the gate polarities (n - 1 gates, or one
/// gate for n = 1).
Circuit gen_point(const BitVector& target);

struct RandomCircuitParams {
    std::size_t num_inputs = 4;
    std::size_t num_gates = 6;
    /// Probability that an operand is drawn from earlier gates rather than
    /// from the primary inputs.
    double gate_operand_bias = 0.5;
};

/// Random topology with uniformly random gate types. Every gate without a
/// consumer becomes a primary output.
Circuit gen_random(std::mt19937_64& rng, const RandomCircuitParams& params);

} // namespace ghsat
