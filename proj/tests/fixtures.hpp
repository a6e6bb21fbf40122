#pragma once

#include "ghsat/topology.hpp"

namespace fixture {

/// Eight-gate example: g4 = (g0, g1) with both feeders fanout 1, g5 = (g2, g3)
/// with only the left feeder fanout 1, g3 fanout 2 and not an output.
inline ghsat::Topology classification_example() {
    using ghsat::NodeRef;
    auto in = [](std::uint32_t i) { return NodeRef::input(i); };
    auto g = [](std::uint32_t i) { return NodeRef::gate(i); };
    return ghsat::Topology(6,
                           {
                               {in(0), in(1)}, // g0
                               {in(2), in(3)}, // g1
                               {in(4), in(5)}, // g2
                               {in(0), in(5)}, // g3
                               {g(0), g(1)},   // g4
                               {g(2), g(3)},   // g5
                               {g(4), g(3)},   // g6
                               {g(5), in(2)},  // g7
                           },
                           {g(4), g(6), g(7)});
}

} // namespace fixture
