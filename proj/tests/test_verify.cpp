#include "ghsat/errors.hpp"
#include "ghsat/experiment.hpp"
#include "ghsat/generators.hpp"
#include "ghsat/simplify.hpp"
#include "ghsat/verify.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ghsat;
using namespace ghsat::types;

namespace {

std::uint64_t field(const BitVector& x, std::size_t from, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i)
        v |= std::uint64_t(x[from + i]) << i;
    return v;
}

Topology single_gate() { return Topology(2, {{NodeRef::input(0), NodeRef::input(1)}}, {NodeRef::gate(0)}); }

bool uses_only_fanin2_types(const Circuit& c) {
    for (auto t : c.assignment)
        if (t == NOT_A || t == NOT_B || t == A || t == B || t == TRUE_ || t == FALSE_)
            return false;
    return true;
}

} // namespace

TEST(Generators, AdderMatchesIntegerAddition) {
    for (std::size_t w = 1; w <= 4; ++w) {
        const auto c = gen_adder(w);
        ASSERT_EQ(c.topology.num_inputs(), 2 * w);
        ASSERT_EQ(c.topology.num_outputs(), w + 1);
        EXPECT_TRUE(uses_only_fanin2_types(c));
        for (std::uint64_t v = 0; v < (1ull << (2 * w)); ++v) {
            const auto x = oracle::bits(v, 2 * w);
            const auto z = oracle::eval(c.topology, c.assignment, x);
            EXPECT_EQ(field(z, 0, w + 1), field(x, 0, w) + field(x, w, w));
        }
    }
    const auto z = oracle::eval(gen_adder(2).topology, gen_adder(2).assignment, {true, false, true, false});
    EXPECT_EQ(z, (BitVector{false, true, false}));
}

TEST(Generators, ComparatorMatchesIntegerOrder) {
    for (std::size_t w = 1; w <= 4; ++w) {
        const auto c = gen_comparator(w);
        ASSERT_EQ(c.topology.num_outputs(), 2u);
        EXPECT_TRUE(uses_only_fanin2_types(c));
        for (std::uint64_t v = 0; v < (1ull << (2 * w)); ++v) {
            const auto x = oracle::bits(v, 2 * w);
            const auto z = oracle::eval(c.topology, c.assignment, x);
            const auto a = field(x, 0, w), b = field(x, w, w);
            EXPECT_EQ(z, (BitVector{a < b, a == b}));
        }
    }
}

TEST(Generators, HammingMatchesPopcount) {
    for (std::size_t w = 1; w <= 6; ++w) {
        const auto c = gen_hamming(w);
        std::size_t width = 0;
        while ((1ull << width) < w + 1)
            ++width;
        ASSERT_EQ(c.topology.num_outputs(), width);
        EXPECT_TRUE(uses_only_fanin2_types(c));
        for (std::uint64_t v = 0; v < (1ull << (2 * w)); ++v) {
            const auto x = oracle::bits(v, 2 * w);
            const auto z = oracle::eval(c.topology, c.assignment, x);
            EXPECT_EQ(field(z, 0, width), std::uint64_t(__builtin_popcountll(field(x, 0, w) ^ field(x, w, w))));
        }
    }
    const auto c = gen_hamming(3);
    const auto z = oracle::eval(c.topology, c.assignment, {true, true, false, false, true, true});
    EXPECT_EQ(field(z, 0, 2), 2u);
}

TEST(Generators, PointIsOneExactlyAtTarget) {
    std::mt19937_64 rng(4);
    for (std::size_t n : {1, 2, 3, 8}) {
        for (int rep = 0; rep < 4; ++rep) {
            const auto target = oracle::bits(rng(), n);
            const auto c = gen_point(target);
            ASSERT_EQ(c.topology.num_inputs(), n);
            ASSERT_EQ(c.topology.num_outputs(), 1u);
            for (std::uint64_t v = 0; v < (1ull << n); ++v) {
                const auto x = oracle::bits(v, n);
                EXPECT_EQ(oracle::eval(c.topology, c.assignment, x)[0], x == target);
            }
        }
    }
}

TEST(Generators, InvalidWidths) {
    EXPECT_THROW(gen_adder(0), ShapeError);
    EXPECT_THROW(gen_comparator(0), ShapeError);
    EXPECT_THROW(gen_hamming(0), ShapeError);
    EXPECT_THROW(gen_point({}), ShapeError);
}

TEST(Generators, RandomCircuitShape) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        RandomCircuitParams p;
        p.num_inputs = 1 + rng() % 8;
        p.num_gates = 1 + rng() % 20;
        const auto c = gen_random(rng, p);
        EXPECT_EQ(c.topology.num_inputs(), p.num_inputs);
        EXPECT_EQ(c.topology.num_gates(), p.num_gates);
        std::vector<int> fo(p.num_gates, 0);
        for (const auto& g : c.topology.gates())
            for (auto r : {g.left, g.right})
                if (r.is_gate())
                    ++fo[r.index];
        for (auto r : c.topology.outputs())
            ++fo[r.index];
        for (int f : fo)
            EXPECT_GT(f, 0);
    }
}

TEST(Equivalence, Basics) {
    std::mt19937_64 rng(8);
    const auto c = oracle::random_circuit(rng, 5, 8);
    EXPECT_TRUE(equiv_exhaustive(c.topology, c.assignment, c.assignment));
    EXPECT_TRUE(equiv_miter(c.topology, c.assignment, c.assignment));
    EXPECT_FALSE(equiv_exhaustive(single_gate(), {AND}, {NAND}));
    EXPECT_FALSE(equiv_miter(single_gate(), {AND}, {OR}));
}

TEST(Equivalence, RWaveRewritesAreEquivalent) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        const auto c = oracle::random_circuit(rng, 1 + rng() % 8, 1 + rng() % 10);
        EXPECT_TRUE(equiv_exhaustive(c.topology, c.assignment, rewrite_r_wave(c.topology, c.assignment)));
    }
}

TEST(Equivalence, MiterAgreesWithExhaustiveAndReference) {
    std::mt19937_64 rng(10);
    int equal = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = oracle::random_circuit(rng, 1 + rng() % 10, 1 + rng() % 6);
        Assignment b = c.assignment;
        // Mostly small perturbations, so both answers occur.
        const std::size_t g = rng() % b.size();
        b[g] = rng() % 2 ? GateType(static_cast<std::uint8_t>(rng() % 16)) : b[g];
        const bool ex = equiv_exhaustive(c.topology, c.assignment, b);
        ASSERT_EQ(equiv_miter(c.topology, c.assignment, b), ex) << "trial " << trial;
        if (c.topology.num_inputs() <= 6) {
            ASSERT_EQ(oracle::equivalent(c.topology, c.assignment, b), ex);
        }
        equal += ex;
    }
    EXPECT_GT(equal, 100);
    EXPECT_LT(equal, 950);
}

TEST(Equivalence, HiddenInputs) {
    const InputPartition part(2, {1});
    const BitVector y0{false}, y1{true};
    EXPECT_TRUE(equiv_exhaustive(single_gate(), {AND}, {A}, part, &y1, &y1));
    EXPECT_FALSE(equiv_exhaustive(single_gate(), {AND}, {A}, part, &y0, &y0));
    EXPECT_TRUE(equiv_exhaustive(single_gate(), {AND}, {FALSE_}, part, &y0, &y1));
    EXPECT_TRUE(equiv_miter(single_gate(), {AND}, {A_AND_NOT_B}, part, &y1, &y0));
    EXPECT_FALSE(equiv_miter(single_gate(), {AND}, {A_AND_NOT_B}, part, &y1, &y1));
}

TEST(Equivalence, GuardRefusesWideCircuits) {
    const Topology topo(25, {{NodeRef::input(0), NodeRef::input(24)}}, {NodeRef::gate(0)});
    EXPECT_THROW(equiv_exhaustive(topo, {AND}, {AND}), GuardError);
    EXPECT_TRUE(equiv_miter(topo, {AND}, {AND}));
}

TEST(Counting, SpecExamples) {
    const std::vector<TypeSet> d{typesets::L};
    EXPECT_EQ(count_consistent(single_gate(), d, {{{false, false}, {false}}, {{true, true}, {true}}}), 4u);
    EXPECT_EQ(count_consistent(single_gate(), d, {}), 16u);
    EXPECT_EQ(count_consistent(single_gate(), d, {{{true, true}, {true}}, {{true, true}, {false}}}), 0u);
    const std::vector<TypeSet> d3(3, TypeSet{AND, OR, XOR});
    std::mt19937_64 rng(1);
    const auto c = oracle::random_circuit(rng, 3, 3);
    EXPECT_EQ(count_consistent(c.topology, d3, {}), 27u);
}

TEST(Counting, GuardAndHiddenPairs) {
    std::mt19937_64 rng(2);
    const auto c = oracle::random_circuit(rng, 2, 6);
    const std::vector<TypeSet> d(6, typesets::L);
    EXPECT_THROW(count_consistent(c.topology, d, {}), GuardError);
    // (type, y) pairs on one gate with one hidden input: 16 * 2.
    const std::vector<TypeSet> one{typesets::L};
    EXPECT_EQ(count_consistent(single_gate(), one, {}, InputPartition(2, {1})), 32u);
    EXPECT_EQ(count_consistent(single_gate(), one, {{{true}, {true}}}, InputPartition(2, {1})), 16u);
}

TEST(Counting, SatEnumerationMatchesBruteForce) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 120; ++trial) {
        const auto c = oracle::random_circuit(rng, 1 + rng() % 4, 1 + rng() % 3);
        const std::size_t n = c.topology.num_inputs();
        std::vector<TypeSet> d;
        for (std::size_t g = 0; g < c.topology.num_gates(); ++g)
            d.push_back(rng() % 2 ? typesets::L : classify_gates(c.topology, SimplifyMode::R).domains[g]);
        DiscriminatingSet di;
        for (std::uint64_t v = 0; v < (1ull << n); ++v)
            if (rng() % 2) {
                const auto x = oracle::bits(v, n);
                di.push_back({x, oracle::eval(c.topology, c.assignment, x)});
            }
        std::uint64_t reference = 0;
        oracle::for_each_assignment(d, [&](const Assignment& a) {
            bool ok = true;
            for (const auto& row : di)
                ok = ok && oracle::eval(c.topology, a, row.x) == row.z;
            reference += ok;
        });
        EXPECT_EQ(count_consistent(c.topology, d, di), reference) << "trial " << trial;
        EXPECT_EQ(count_models_sat(c.topology, d, di), reference) << "trial " << trial;
    }
}

TEST(Certify, FlagsBothChecks) {
    const auto c = gen_adder(2);
    auto good = rewrite_r_wave(c.topology, c.assignment);
    const auto ok = certify(c.topology, c.assignment, good);
    EXPECT_TRUE(ok.ok());
    ASSERT_TRUE(ok.exhaustive_equivalent.has_value());
    auto bad = c.assignment;
    bad[0] = bad[0] == AND ? OR : AND;
    const auto no = certify(c.topology, c.assignment, bad);
    EXPECT_FALSE(no.ok());
    EXPECT_FALSE(no.miter_equivalent);
}

TEST(Experiment, RunSingleCertifies) {
    NamedCircuit nc{"cmp3", gen_comparator(3)};
    AttackConfig cfg;
    cfg.simplify = SimplifyMode::ZSR;
    const auto rep = run_single(nc, cfg);
    EXPECT_EQ(rep.status, RecoveryStatus::Recovered);
    EXPECT_TRUE(rep.certified);
    EXPECT_EQ(rep.n, 6u);
    EXPECT_EQ(rep.k, nc.circuit.topology.num_gates());
    EXPECT_EQ(rep.query_count, rep.di_size);
    EXPECT_EQ(rep.num_s + rep.num_z + rep.num_r + rep.num_full, rep.k);

    cfg.model = ThreatModel::B;
    cfg.hidden = {0, 4};
    const auto b = run_single(nc, cfg);
    EXPECT_EQ(b.status, RecoveryStatus::Recovered) << b.message;
    EXPECT_TRUE(b.certified);
    EXPECT_EQ(b.n, 4u);
}

TEST(Experiment, GridOfTwoByTwo) {
    const auto dir = std::filesystem::temp_directory_path() / "ghsat_grid";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "spec.json") << R"({
      "circuits": [{"id": "add2", "gen": "adder", "size": 2},
                   {"id": "s27", "bench": ")" GHSAT_BENCH_DIR R"(/s27.bench"}],
      "configs": [{"algorithm": "baseline"}, {"algorithm": "optimized", "simplify": "zsr"}],
      "timeout": 60, "threads": 2, "jsonl": "out.jsonl", "csv": "out.csv"
    })";
    const auto reports = run_experiment(dir / "spec.json");
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports) {
        EXPECT_EQ(r.status, RecoveryStatus::Recovered) << r.circuit_id << ": " << r.message;
        EXPECT_TRUE(r.certified);
    }
    std::ifstream jsonl(dir / "out.jsonl"), csv(dir / "out.csv");
    std::string line;
    int lines = 0;
    while (std::getline(jsonl, line)) {
        EXPECT_EQ(line.front(), '{');
        EXPECT_NE(line.find("\"certified\":true"), std::string::npos);
        ++lines;
    }
    EXPECT_EQ(lines, 4);
    lines = 0;
    std::getline(csv, line);
    EXPECT_EQ(line, ExperimentReport::csv_header());
    while (std::getline(csv, line))
        ++lines;
    EXPECT_EQ(lines, 4);
}

TEST(Experiment, SpecErrors) {
    const auto dir = std::filesystem::temp_directory_path() / "ghsat_grid_bad";
    std::filesystem::create_directories(dir);
    auto load = [&](const std::string& text) {
        std::ofstream(dir / "spec.json") << text;
        return load_experiment(dir / "spec.json");
    };
    EXPECT_THROW(load("{"), ParseError);
    EXPECT_THROW(load(R"({"configs": []})"), ParseError);
    EXPECT_THROW(load(R"({"circuits": [{"id": "x", "gen": "mux", "size": 2}], "configs": []})"), ParseError);
    EXPECT_THROW(load(R"({"circuits": [], "configs": [{"model": "B"}]})"), ParseError);
    EXPECT_THROW(load(R"({"circuits": [], "configs": [{"algorithm": "fast"}]})"), ParseError);
    const auto ok = load(R"({"circuits": [{"id": "p", "gen": "point", "target": "101"}],
                             "configs": [{"model": "B", "hidden": [1], "secret": "1"}], "seeds": [1, 2]})");
    EXPECT_EQ(ok.circuits.size(), 1u);
    EXPECT_EQ(ok.seeds.size(), 2u);
    EXPECT_EQ(ok.secrets[0], BitVector{true});
}

TEST(Experiment, ReportSerialization) {
    ExperimentReport r;
    r.circuit_id = "a,b";
    r.message = "say \"hi\"";
    const auto csv = r.to_csv();
    EXPECT_EQ(csv.rfind("\"a,b\",", 0), 0u);
    EXPECT_NE(csv.find("\"say \"\"hi\"\"\""), std::string::npos);
    EXPECT_NE(r.to_json().find("\"circuit\":\"a,b\""), std::string::npos);
}
