// Command-line front end: convert, simplify, attack, verify, gen, bench.
//
// Exit codes: 0 success, 1 recoverable failure (not recovered, not
// equivalent, bad input file), 2 usage error.

#include "ghsat/attack.hpp"
#include "ghsat/errors.hpp"
#include "ghsat/experiment.hpp"
#include "ghsat/generators.hpp"
#include "ghsat/netlist.hpp"
#include "ghsat/simplify.hpp"
#include "ghsat/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace ghsat;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_source(const std::string& path) {
    std::stringstream ss;
    if (path.empty() || path == "-") {
        ss << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in)
            throw Error("cannot open " + path);
        ss << in.rdbuf();
    }
    return ss.str();
}

/// .bench text or the JSON circuit schema, told apart by the first
/// non-blank character.
JsonCircuit load_any(const std::string& path) {
    const std::string text = read_source(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return read_json(text);
    auto c = load_bench(text);
    return {std::move(c.topology), std::move(c.assignment)};
}

Circuit load_typed(const std::string& path) {
    auto jc = load_any(path);
    if (!jc.assignment)
        throw Error((path.empty() ? std::string("stdin") : path) + " has no gate types");
    return {std::move(jc.topology), std::move(*jc.assignment)};
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw Error("cannot write " + out_path);
    out << text;
}

std::vector<std::uint32_t> parse_index_list(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size())
            throw UsageError("bad index '" + item + "' in --hidden");
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return out;
}

BitVector random_bits(std::uint64_t seed, std::size_t width) {
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dull);
    BitVector v(width);
    for (std::size_t i = 0; i < width; ++i)
        v[i] = rng() & 1;
    return v;
}

json simplify_report_json(const Topology& topo, SimplifyMode mode) {
    const auto d = classify_gates(topo, mode);
    const auto rep = simplification_report(topo, d);
    json gates = json::array();
    for (std::size_t g = 0; g < d.size(); ++g)
        gates.push_back({{"gate", g},
                         {"class", std::string(to_string(d.classes[g]))},
                         {"domain_size", d.domains[g].size()},
                         {"retain_full", bool(d.must_retain_full[g])}});
    return {{"mode", std::string(to_string(mode))},
            {"n", topo.num_inputs()},
            {"m", topo.num_outputs()},
            {"k", topo.num_gates()},
            {"num_s", rep.num_s},
            {"num_z", rep.num_z},
            {"num_r", rep.num_r},
            {"num_full", rep.num_full},
            {"search_space_before", rep.space_before.str()},
            {"search_space_after", rep.space_after.str()},
            {"gates", gates}};
}

struct AttackArgs {
    std::string input;
    std::string model = "a";
    std::string algo = "optimized";
    std::string simplify = "none";
    int n_max = 3;
    double timeout = 3600;
    std::uint64_t seed = 0;
    std::string hidden;
    std::string secret;
    std::string oracle;
    std::string out;
};

int run_attack_cmd(const AttackArgs& a) {
    AttackConfig cfg;
    cfg.model = a.model == "b" ? ThreatModel::B : ThreatModel::A;
    cfg.algorithm = a.algo == "baseline" ? Algorithm::Baseline : Algorithm::Optimized;
    cfg.simplify = parse_simplify_mode(a.simplify);
    cfg.n_max = a.n_max;
    cfg.time_budget = a.timeout;
    cfg.seed = a.seed;
    cfg.hidden = parse_index_list(a.hidden);
    if (cfg.model == ThreatModel::B && cfg.hidden.empty())
        throw UsageError("--model b needs --hidden");
    if (cfg.model == ThreatModel::A && !cfg.hidden.empty())
        throw UsageError("--hidden only applies to --model b");
    if (cfg.n_max < 1)
        throw UsageError("--nmax must be at least 1");

    const auto public_view = load_any(a.input);
    const Topology& topo = public_view.topology;
    const InputPartition part = cfg.model == ThreatModel::B ? InputPartition(topo.num_inputs(), cfg.hidden)
                                                            : InputPartition::all_visible(topo.num_inputs());

    // The target is either the input file itself, another circuit file, or
    // an external process (in which case nothing can be certified).
    std::optional<Circuit> target;
    std::unique_ptr<Oracle> oracle;
    BitVector secret;
    if (a.oracle.rfind("cmd:", 0) == 0) {
        oracle = std::make_unique<ExternalOracle>(a.oracle.substr(4), part.num_visible(), topo.num_outputs());
    } else {
        if (a.oracle.empty()) {
            if (!public_view.assignment)
                throw UsageError("input has no gate types; pass --oracle");
            target = Circuit{topo, *public_view.assignment};
        } else if (a.oracle.rfind("circuit:", 0) == 0) {
            target = load_typed(a.oracle.substr(8));
            if (!(target->topology == topo))
                throw Error("oracle circuit topology differs from the attacked topology");
        } else {
            throw UsageError("--oracle must be circuit:FILE or cmd:COMMAND");
        }
        if (cfg.model == ThreatModel::B) {
            secret = a.secret.empty() ? random_bits(cfg.seed, part.num_hidden()) : bits_from_string(a.secret);
            oracle = std::make_unique<HiddenInputOracle>(*target, part, secret);
        } else {
            oracle = std::make_unique<CircuitOracle>(*target);
        }
    }

    const auto res = run_attack(topo, *oracle, cfg);
    json j{{"status", std::string(to_string(res.status))},
           {"model", std::string(to_string(cfg.model))},
           {"algorithm", std::string(to_string(cfg.algorithm))},
           {"simplify", std::string(to_string(cfg.simplify))},
           {"query_count", res.query_count},
           {"di_size", res.di.size()},
           {"wall_time", res.wall_time},
           {"search_space_before", res.search_space_before.str()},
           {"search_space_after", res.search_space_after.str()},
           {"solve_calls", res.stats.solve_calls},
           {"clauses", res.stats.clauses},
           {"conflicts", res.stats.conflicts}};
    if (!res.message.empty())
        j["message"] = res.message;
    bool ok = res.status == RecoveryStatus::Recovered;
    if (ok) {
        j["circuit"] = json::parse(write_json(topo, &res.assignment));
        if (cfg.model == ThreatModel::B)
            j["hidden_values"] = bits_to_string(res.hidden_values);
        if (target) {
            const auto cert = certify(topo, target->assignment, res.assignment, part,
                                      cfg.model == ThreatModel::B ? &secret : nullptr,
                                      cfg.model == ThreatModel::B ? &res.hidden_values : nullptr);
            j["certified"] = cert.ok();
            ok = cert.ok();
        }
    }
    emit(a.out, j.dump(1) + "\n");
    std::cerr << to_string(res.status) << ": " << res.query_count << " queries, " << res.wall_time << " s"
              << (j.contains("certified") ? (ok ? ", certified" : ", CERTIFICATION FAILED") : "") << '\n';
    return ok ? kOk : kFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gate-type recovery over a public circuit topology"};
    app.require_subcommand(1);

    // convert
    std::string conv_in, conv_out;
    bool conv_bare = false;
    auto* convert = app.add_subcommand("convert", ".bench netlist -> JSON circuit (unroll, decompose, normalize)");
    convert->add_option("input", conv_in, ".bench file (default stdin)");
    convert->add_option("-o,--out", conv_out, "output file (default stdout)");
    convert->add_flag("--topology-only", conv_bare, "omit gate types");

    // simplify
    std::string simp_in, simp_mode = "zsr";
    auto* simplify = app.add_subcommand("simplify", "print the gate classification report as JSON");
    simplify->add_option("input", simp_in, "circuit (.bench or JSON, default stdin)");
    simplify->add_option("--mode", simp_mode, "none|r|zs|zsr")->check(CLI::IsMember({"none", "r", "zs", "zsr"}));

    // attack
    AttackArgs aa;
    auto* attack = app.add_subcommand("attack", "recover gate types through oracle queries");
    attack->add_option("input", aa.input, "public circuit (.bench or JSON, default stdin)");
    attack->add_option("--model", aa.model, "threat model a|b")->check(CLI::IsMember({"a", "b"}));
    attack->add_option("--algo", aa.algo, "baseline|optimized")->check(CLI::IsMember({"baseline", "optimized"}));
    attack->add_option("--simplify", aa.simplify, "none|r|zs|zsr")
        ->check(CLI::IsMember({"none", "r", "zs", "zsr"}));
    attack->add_option("--nmax", aa.n_max, "inner iterations before the fallback solve");
    attack->add_option("--timeout", aa.timeout, "time budget in seconds");
    attack->add_option("--seed", aa.seed, "solver and secret seed");
    attack->add_option("--hidden", aa.hidden, "comma-separated hidden input indices (model b)");
    attack->add_option("--secret", aa.secret, "hidden input values for a simulated model b oracle");
    attack->add_option("--oracle", aa.oracle, "circuit:FILE or cmd:COMMAND (default: the input circuit)");
    attack->add_option("--out", aa.out, "result file (default stdout)");

    // verify
    std::string ver_a, ver_b;
    auto* verify = app.add_subcommand("verify", "check two typed circuits for equivalence");
    verify->add_option("first", ver_a)->required();
    verify->add_option("second", ver_b)->required();

    // gen
    std::string gen_family, gen_target, gen_out;
    std::size_t gen_size = 0, gen_gates = 0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "emit a generated circuit as JSON");
    gen->add_option("family", gen_family, "adder|comparator|hamming|point|random")
        ->required()
        ->check(CLI::IsMember({"adder", "comparator", "hamming", "point", "random"}));
    gen->add_option("size", gen_size, "width (inputs for random)");
    gen->add_option("--target", gen_target, "point target bits, index 0 first");
    gen->add_option("--gates", gen_gates, "gate count for random");
    gen->add_option("--seed", gen_seed, "seed for random circuits and point targets");
    gen->add_option("-o,--out", gen_out, "output file (default stdout)");

    // bench
    std::string bench_spec;
    auto* bench = app.add_subcommand("bench", "run an experiment grid from a JSON spec file");
    bench->add_option("spec", bench_spec)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*convert) {
            const auto c = load_bench(read_source(conv_in));
            emit(conv_out, write_json(c.topology, conv_bare ? nullptr : &c.assignment));
            return kOk;
        }
        if (*simplify) {
            std::cout << simplify_report_json(load_any(simp_in).topology, parse_simplify_mode(simp_mode)).dump(1)
                      << '\n';
            return kOk;
        }
        if (*attack)
            return run_attack_cmd(aa);
        if (*verify) {
            const auto a = load_typed(ver_a);
            const auto b = load_typed(ver_b);
            if (!(a.topology == b.topology)) {
                std::cout << "different topologies\n";
                return kFailure;
            }
            const bool eq = a.topology.num_inputs() <= kExhaustiveGuard
                                ? equiv_exhaustive(a.topology, a.assignment, b.assignment)
                                : equiv_miter(a.topology, a.assignment, b.assignment);
            std::cout << (eq ? "equivalent" : "not equivalent") << '\n';
            return eq ? kOk : kFailure;
        }
        if (*gen) {
            Circuit c;
            if (gen_family == "point") {
                BitVector target;
                if (!gen_target.empty())
                    target = bits_from_string(gen_target);
                else if (gen_size)
                    target = random_bits(gen_seed, gen_size);
                else
                    throw UsageError("point needs a size or --target");
                c = gen_point(target);
            } else if (gen_family == "random") {
                std::mt19937_64 rng(gen_seed);
                RandomCircuitParams p;
                p.num_inputs = gen_size ? gen_size : p.num_inputs;
                p.num_gates = gen_gates ? gen_gates : p.num_gates;
                c = gen_random(rng, p);
            } else {
                if (!gen_size)
                    throw UsageError(gen_family + " needs a size");
                c = gen_family == "adder"        ? gen_adder(gen_size)
                    : gen_family == "comparator" ? gen_comparator(gen_size)
                                                 : gen_hamming(gen_size);
            }
            emit(gen_out, write_json(c.topology, &c.assignment));
            return kOk;
        }
        if (*bench) {
            const auto reports = run_experiment(bench_spec);
            bool all = true;
            for (const auto& r : reports) {
                std::cout << r.circuit_id << ' ' << to_string(r.algorithm) << ' ' << to_string(r.simplify) << ' '
                          << to_string(r.status) << ' ' << r.wall_time << "s |DI|=" << r.di_size << '\n';
                all = all && r.status == RecoveryStatus::Recovered && r.certified;
            }
            return all ? kOk : kFailure;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
