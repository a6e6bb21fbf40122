#include "ghsat/attack.hpp"
#include "ghsat/errors.hpp"
#include "ghsat/generators.hpp"
#include "ghsat/netlist.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ghsat;
using namespace ghsat::types;

namespace {

Topology single_gate() { return Topology(2, {{NodeRef::input(0), NodeRef::input(1)}}, {NodeRef::gate(0)}); }

AttackConfig config(Algorithm algo, SimplifyMode mode = SimplifyMode::None) {
    AttackConfig cfg;
    cfg.algorithm = algo;
    cfg.simplify = mode;
    cfg.time_budget = 120;
    return cfg;
}

/// Every DI row must be a genuine observation of the target.
void expect_rows_observed(const Circuit& target, const RecoveryResult& r) {
    for (const auto& row : r.di)
        EXPECT_EQ(oracle::eval(target.topology, target.assignment, row.x), row.z);
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string oracle_command(const std::string& json_path, const std::string& extra = "") {
    return "python3 " + std::string(GHSAT_TOOLS_DIR) + "/circuit_oracle.py " + json_path + extra;
}

class Algorithms : public ::testing::TestWithParam<Algorithm> {};

} // namespace

TEST(Oracle, CachesRepeatedInputs) {
    CircuitOracle o({single_gate(), {AND}});
    EXPECT_EQ(o.query({true, true}), BitVector{true});
    EXPECT_EQ(o.query({true, true}), BitVector{true});
    EXPECT_EQ(o.query({true, false}), BitVector{false});
    EXPECT_EQ(o.query_count(), 2u);
    EXPECT_THROW(o.query({true}), ShapeError);
}

TEST(Oracle, HiddenWithNothingHiddenMatchesPlain) {
    std::mt19937_64 rng(2);
    const auto c = oracle::random_circuit(rng, 4, 6);
    CircuitOracle plain(c);
    HiddenInputOracle hidden(c, InputPartition::all_visible(4), {});
    for (std::uint64_t v = 0; v < 16; ++v)
        EXPECT_EQ(plain.query(oracle::bits(v, 4)), hidden.query(oracle::bits(v, 4)));
}

TEST(Oracle, HiddenInputsAreInterleaved) {
    const Topology topo(3, {{NodeRef::input(0), NodeRef::input(1)}, {NodeRef::gate(0), NodeRef::input(2)}},
                        {NodeRef::gate(1)});
    const Assignment asg{A_AND_NOT_B, XOR};
    HiddenInputOracle o({topo, asg}, InputPartition(3, {1}), {true});
    EXPECT_EQ(o.num_inputs(), 2u);
    for (std::uint64_t v = 0; v < 4; ++v) {
        const auto x = oracle::bits(v, 2);
        EXPECT_EQ(o.query(x), oracle::eval(topo, asg, {x[0], true, x[1]}));
    }
}

TEST(Oracle, ExternalProcessMatchesInProcess) {
    std::mt19937_64 rng(7);
    const auto c = oracle::random_circuit(rng, 10, 25);
    const auto path = write_temp("ghsat_ext_oracle.json", write_json(c.topology, &c.assignment));
    ExternalOracle ext(oracle_command(path), 10, c.topology.num_outputs());
    for (int i = 0; i < 100; ++i) {
        const auto x = oracle::bits(rng() % 1024, 10);
        EXPECT_EQ(ext.query(x), oracle::eval(c.topology, c.assignment, x));
    }
    EXPECT_LE(ext.query_count(), 100u);
}

TEST(Oracle, ExternalProtocolErrors) {
    ExternalOracle bad("while read l; do echo 2; done", 2, 1);
    EXPECT_THROW(bad.query({true, false}), OracleError);
    ExternalOracle wide("while read l; do echo 01; done", 2, 1);
    EXPECT_THROW(wide.query({true, false}), OracleError);
    ExternalOracle dead("exit 0", 2, 1);
    EXPECT_THROW(dead.query({true, false}), OracleError);
}

TEST(Discriminate, IdenticalHasNone) {
    std::mt19937_64 rng(1);
    const auto c = oracle::random_circuit(rng, 4, 6);
    EXPECT_FALSE(find_discriminating_input(c.topology, c.assignment, c.assignment).has_value());
}

TEST(Discriminate, AndVersusOr) {
    const auto x = find_discriminating_input(single_gate(), {AND}, {OR});
    ASSERT_TRUE(x.has_value());
    EXPECT_NE(x->at(0), x->at(1));
}

TEST(Discriminate, CompensatedNegationHasNone) {
    // g0 negated, its only consumer reads it through the opposite polarity.
    const Topology topo(3, {{NodeRef::input(0), NodeRef::input(1)}, {NodeRef::gate(0), NodeRef::input(2)}},
                        {NodeRef::gate(1)});
    const Assignment a{AND, OR}, b{NAND, NOT_A_OR_B};
    ASSERT_TRUE(oracle::equivalent(topo, a, b));
    EXPECT_FALSE(find_discriminating_input(topo, a, b).has_value());
}

TEST(Discriminate, HiddenValuesPerSide) {
    const InputPartition part(2, {1});
    const BitVector y0{false}, y1{true};
    EXPECT_FALSE(find_discriminating_input(single_gate(), {AND}, {AND}, part, &y1, &y1).has_value());
    const auto x = find_discriminating_input(single_gate(), {AND}, {AND}, part, &y0, &y1);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(*x, BitVector{true});
}

TEST_P(Algorithms, SingleAndGate) {
    const Circuit target{single_gate(), {AND}};
    CircuitOracle o(target);
    const auto r = run_attack(target.topology, o, config(GetParam()));
    ASSERT_EQ(r.status, RecoveryStatus::Recovered) << r.message;
    EXPECT_EQ(r.assignment[0], AND);
    EXPECT_LE(r.query_count, 4u);
    EXPECT_EQ(r.query_count, r.di.size());
    expect_rows_observed(target, r);
}

TEST_P(Algorithms, ConstantFalseCircuit) {
    std::mt19937_64 rng(3);
    auto c = oracle::random_circuit(rng, 3, 5);
    c.assignment.assign(5, FALSE_);
    CircuitOracle o(c);
    const auto r = run_attack(c.topology, o, config(GetParam()));
    ASSERT_EQ(r.status, RecoveryStatus::Recovered);
    EXPECT_TRUE(oracle::equivalent(c.topology, c.assignment, r.assignment));
}

TEST_P(Algorithms, SmallGeneratorsAllModes) {
    for (const auto& target : {gen_adder(2), gen_comparator(2), gen_hamming(2), gen_point({true, false, true})}) {
        for (auto mode : {SimplifyMode::None, SimplifyMode::R, SimplifyMode::ZS, SimplifyMode::ZSR}) {
            CircuitOracle o(target);
            const auto r = run_attack(target.topology, o, config(GetParam(), mode));
            ASSERT_EQ(r.status, RecoveryStatus::Recovered) << r.message;
            EXPECT_TRUE(oracle::equivalent(target.topology, target.assignment, r.assignment));
            EXPECT_LE(r.query_count, 1ull << target.topology.num_inputs());
            EXPECT_EQ(r.query_count, o.query_count());
            EXPECT_LE(r.search_space_after, r.search_space_before);
            expect_rows_observed(target, r);
        }
    }
}

TEST_P(Algorithms, ModelBSingleGate) {
    // f(x, y) = gate(x, y) with y fixed to 1.
    const InputPartition part(2, {1});
    for (int tt = 0; tt < 16; ++tt) {
        const Circuit target{single_gate(), {GateType(static_cast<std::uint8_t>(tt))}};
        HiddenInputOracle o(target, part, {true});
        auto cfg = config(GetParam());
        cfg.model = ThreatModel::B;
        cfg.hidden = {1};
        const auto r = run_attack(target.topology, o, cfg);
        ASSERT_EQ(r.status, RecoveryStatus::Recovered);
        ASSERT_EQ(r.hidden_values.size(), 1u);
        const auto f = oracle::fn_of(target.assignment[0]);
        const auto g = oracle::fn_of(r.assignment[0]);
        for (bool x : {false, true})
            EXPECT_EQ(g(x, r.hidden_values[0]), f(x, true)) << "tt " << tt;
    }
}

TEST_P(Algorithms, ModelBXorKey) {
    std::vector<GateNode> gates;
    std::vector<NodeRef> outs;
    for (std::uint32_t i = 0; i < 4; ++i) {
        gates.push_back({NodeRef::input(i), NodeRef::input(4 + i)});
        outs.push_back(NodeRef::gate(i));
    }
    const Circuit target{Topology(8, gates, outs), Assignment(4, XOR)};
    const BitVector y{true, false, false, true};
    const InputPartition part(8, {4, 5, 6, 7});
    HiddenInputOracle o(target, part, y);
    auto cfg = config(GetParam(), SimplifyMode::ZSR);
    cfg.model = ThreatModel::B;
    cfg.hidden = {4, 5, 6, 7};
    const auto r = run_attack(target.topology, o, cfg);
    ASSERT_EQ(r.status, RecoveryStatus::Recovered);
    // XNOR with the complemented key bit is the same visible function, so the
    // key is only determined together with the gate type.
    for (std::size_t i = 0; i < 4; ++i) {
        const auto g = oracle::fn_of(r.assignment[i]);
        for (bool x : {false, true})
            EXPECT_EQ(g(x, r.hidden_values[i]), x != y[i]) << "bit " << i;
    }
}

TEST_P(Algorithms, NmaxVariants) {
    const auto target = gen_comparator(3);
    for (int n_max : {1, 2, 5}) {
        CircuitOracle o(target);
        auto cfg = config(GetParam());
        cfg.n_max = n_max;
        const auto r = run_attack(target.topology, o, cfg);
        ASSERT_EQ(r.status, RecoveryStatus::Recovered);
        EXPECT_TRUE(oracle::equivalent(target.topology, target.assignment, r.assignment));
    }
}

TEST_P(Algorithms, ExternalOracleRun) {
    const auto target = gen_adder(2);
    const auto path = write_temp("ghsat_adder2.json", write_json(target.topology, &target.assignment));
    ExternalOracle o(oracle_command(path), 4, 3);
    const auto r = run_attack(target.topology, o, config(GetParam(), SimplifyMode::ZSR));
    ASSERT_EQ(r.status, RecoveryStatus::Recovered) << r.message;
    EXPECT_TRUE(oracle::equivalent(target.topology, target.assignment, r.assignment));
}

TEST_P(Algorithms, BrokenOracleGivesError) {
    ExternalOracle o("while read l; do echo x; done", 4, 3);
    const auto r = run_attack(gen_adder(2).topology, o, config(GetParam()));
    EXPECT_EQ(r.status, RecoveryStatus::Error);
    EXPECT_FALSE(r.message.empty());
}

TEST_P(Algorithms, InconsistentOracleGivesError) {
    // Output 0 is wired straight to x0 but the oracle answers NOT x0 there.
    const Topology topo(2, {{NodeRef::input(0), NodeRef::input(1)}}, {NodeRef::input(0), NodeRef::gate(0)});
    const Topology other(2, {{NodeRef::input(0), NodeRef::input(0)}, {NodeRef::input(0), NodeRef::input(1)}},
                         {NodeRef::gate(0), NodeRef::gate(1)});
    CircuitOracle o({other, {NOT_A, AND}});
    const auto r = run_attack(topo, o, config(GetParam()));
    EXPECT_EQ(r.status, RecoveryStatus::Error);
    EXPECT_EQ(r.query_count, 1u);
}

TEST_P(Algorithms, ZeroBudgetTimesOut) {
    const auto target = gen_comparator(4);
    CircuitOracle o(target);
    auto cfg = config(GetParam());
    cfg.time_budget = 0;
    const auto r = run_attack(target.topology, o, cfg);
    EXPECT_EQ(r.status, RecoveryStatus::Timeout);
    EXPECT_EQ(r.query_count, r.di.size());
}

INSTANTIATE_TEST_SUITE_P(Attack, Algorithms, ::testing::Values(Algorithm::Baseline, Algorithm::Optimized),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Agreement, BaselineAndOptimizedLandInSameClass) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const auto c = oracle::random_circuit(rng, 1 + rng() % 5, 1 + rng() % 4);
        CircuitOracle o1(c), o2(c);
        const auto a = run_baseline(c.topology, o1, config(Algorithm::Baseline));
        const auto b = run_optimized(c.topology, o2, config(Algorithm::Optimized));
        ASSERT_EQ(a.status, RecoveryStatus::Recovered);
        ASSERT_EQ(b.status, RecoveryStatus::Recovered);
        EXPECT_TRUE(oracle::equivalent(c.topology, a.assignment, b.assignment)) << "trial " << trial;
        EXPECT_TRUE(oracle::equivalent(c.topology, c.assignment, a.assignment));
    }
}

TEST(Config, InvalidNmax) {
    CircuitOracle o({single_gate(), {AND}});
    auto cfg = config(Algorithm::Optimized);
    cfg.n_max = 0;
    EXPECT_EQ(run_attack(single_gate(), o, cfg).status, RecoveryStatus::Error);
}

TEST(Config, OracleShapeMismatch) {
    CircuitOracle o(gen_adder(2));
    EXPECT_EQ(run_attack(single_gate(), o, config(Algorithm::Baseline)).status, RecoveryStatus::Error);
}

TEST(ModelB, EmptyHiddenBehavesLikeModelA) {
    const auto target = gen_adder(2);
    CircuitOracle o(target);
    auto cfg = config(Algorithm::Optimized);
    cfg.model = ThreatModel::B;
    const auto r = run_model_b(target.topology, o, cfg);
    ASSERT_EQ(r.status, RecoveryStatus::Recovered);
    EXPECT_TRUE(r.hidden_values.empty());
    EXPECT_TRUE(oracle::equivalent(target.topology, target.assignment, r.assignment));
}
