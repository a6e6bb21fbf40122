#include "ghsat/experiment.hpp"

#include "ghsat/errors.hpp"
#include "ghsat/generators.hpp"
#include "ghsat/netlist.hpp"
#include "ghsat/verify.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace ghsat {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in)
        throw Error("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

BitVector random_bits(std::uint64_t seed, std::size_t width) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    BitVector v(width);
    for (std::size_t i = 0; i < width; ++i)
        v[i] = rng() & 1;
    return v;
}

NamedCircuit load_circuit(const json& j, const fs::path& base) {
    if (!j.is_object() || !j.contains("id"))
        throw ParseError("each circuit needs an 'id'");
    NamedCircuit nc;
    nc.id = j["id"].get<std::string>();
    if (j.contains("gen")) {
        const auto family = j["gen"].get<std::string>();
        const auto size = j.value("size", std::size_t{0});
        if (family == "adder")
            nc.circuit = gen_adder(size);
        else if (family == "comparator")
            nc.circuit = gen_comparator(size);
        else if (family == "hamming")
            nc.circuit = gen_hamming(size);
        else if (family == "point")
            nc.circuit = gen_point(j.contains("target") ? bits_from_string(j["target"].get<std::string>())
                                                        : random_bits(j.value("seed", 0ull), size));
        else if (family == "random") {
            std::mt19937_64 rng(j.value("seed", 0ull));
            RandomCircuitParams p;
            p.num_inputs = j.value("inputs", std::size_t{4});
            p.num_gates = j.value("gates", std::size_t{6});
            nc.circuit = gen_random(rng, p);
        } else
            throw ParseError("unknown generator '" + family + "'");
    } else if (j.contains("bench")) {
        nc.circuit = load_bench(slurp(base / j["bench"].get<std::string>()));
    } else if (j.contains("json")) {
        auto jc = read_json(slurp(base / j["json"].get<std::string>()));
        if (!jc.assignment)
            throw ParseError("circuit '" + nc.id + "' has no gate types; a target needs them");
        nc.circuit = {std::move(jc.topology), std::move(*jc.assignment)};
    } else {
        throw ParseError("circuit '" + nc.id + "' needs one of gen/bench/json");
    }
    return nc;
}

} // namespace

std::string ExperimentReport::to_json() const {
    json j{{"circuit", circuit_id},
           {"n", n},
           {"m", m},
           {"k", k},
           {"num_s", num_s},
           {"num_z", num_z},
           {"num_r", num_r},
           {"num_full", num_full},
           {"model", to_string(model)},
           {"algorithm", to_string(algorithm)},
           {"simplify", to_string(simplify)},
           {"n_max", n_max},
           {"status", to_string(status)},
           {"certified", certified},
           {"wall_time", wall_time},
           {"query_count", query_count},
           {"di_size", di_size},
           {"search_space_before", search_space_before},
           {"search_space_after", search_space_after},
           {"solve_calls", stats.solve_calls},
           {"clauses", stats.clauses},
           {"conflicts", stats.conflicts},
           {"outer_iterations", stats.outer_iterations},
           {"inner_iterations", stats.inner_iterations},
           {"fallback_calls", stats.fallback_calls},
           {"seed", seed},
           {"repeat", repeat}};
    if (!message.empty())
        j["message"] = message;
    return j.dump();
}

std::string ExperimentReport::csv_header() {
    return "circuit,n,m,k,num_s,num_z,num_r,num_full,model,algorithm,simplify,n_max,status,certified,"
           "wall_time,query_count,di_size,search_space_before,search_space_after,solve_calls,clauses,"
           "conflicts,outer_iterations,inner_iterations,fallback_calls,seed,repeat,message";
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << csv_escape(circuit_id) << ',' << n << ',' << m << ',' << k << ',' << num_s << ',' << num_z << ','
       << num_r << ',' << num_full << ',' << to_string(model) << ',' << to_string(algorithm) << ','
       << to_string(simplify) << ',' << n_max << ',' << to_string(status) << ',' << (certified ? 1 : 0) << ','
       << wall_time << ',' << query_count << ',' << di_size << ',' << search_space_before << ','
       << search_space_after << ',' << stats.solve_calls << ',' << stats.clauses << ',' << stats.conflicts << ','
       << stats.outer_iterations << ',' << stats.inner_iterations << ',' << stats.fallback_calls << ',' << seed
       << ',' << repeat << ',' << csv_escape(message);
    return os.str();
}

ExperimentReport run_single(const NamedCircuit& target, const AttackConfig& cfg, std::size_t repeat,
                            const BitVector* secret) {
    const auto& topo = target.circuit.topology;
    ExperimentReport rep;
    rep.circuit_id = target.id;
    rep.k = topo.num_gates();
    rep.m = topo.num_outputs();
    rep.model = cfg.model;
    rep.algorithm = cfg.algorithm;
    rep.simplify = cfg.simplify;
    rep.n_max = cfg.n_max;
    rep.seed = cfg.seed;
    rep.repeat = repeat;
    try {
        const InputPartition part = cfg.model == ThreatModel::B ? InputPartition(topo.num_inputs(), cfg.hidden)
                                                                : InputPartition::all_visible(topo.num_inputs());
        rep.n = part.num_visible();
        const BitVector y = secret ? *secret : random_bits(cfg.seed + 7919 * repeat, part.num_hidden());
        std::unique_ptr<Oracle> oracle;
        if (cfg.model == ThreatModel::B)
            oracle = std::make_unique<HiddenInputOracle>(target.circuit, part, y);
        else
            oracle = std::make_unique<CircuitOracle>(target.circuit);

        const auto res = run_attack(topo, *oracle, cfg);
        const auto report = simplification_report(topo, res.domains);
        rep.num_s = report.num_s;
        rep.num_z = report.num_z;
        rep.num_r = report.num_r;
        rep.num_full = report.num_full;
        rep.status = res.status;
        rep.wall_time = res.wall_time;
        rep.query_count = res.query_count;
        rep.di_size = res.di.size();
        rep.search_space_before = res.search_space_before.str();
        rep.search_space_after = res.search_space_after.str();
        rep.stats = res.stats;
        rep.message = res.message;
        if (res.status == RecoveryStatus::Recovered) {
            const auto cert = certify(topo, target.circuit.assignment, res.assignment, part, &y, &res.hidden_values);
            rep.certified = cert.ok();
            if (!rep.certified) {
                rep.status = RecoveryStatus::Error;
                rep.message = "certification failed";
            }
        }
    } catch (const std::exception& e) {
        rep.status = RecoveryStatus::Error;
        rep.message = e.what();
    }
    return rep;
}

ExperimentGrid load_experiment(const fs::path& spec_file, fs::path* jsonl, fs::path* csv) {
    json doc;
    try {
        doc = json::parse(slurp(spec_file));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid experiment spec: ") + e.what());
    }
    const fs::path base = spec_file.parent_path();
    ExperimentGrid grid;
    try {
        for (const auto& c : doc.at("circuits"))
            grid.circuits.push_back(load_circuit(c, base));
        const double timeout = doc.value("timeout", 3600.0);
        for (const auto& c : doc.at("configs")) {
            AttackConfig cfg;
            const auto model = c.value("model", std::string("A"));
            if (model != "A" && model != "a" && model != "B" && model != "b")
                throw ParseError("model must be A or B");
            cfg.model = (model == "B" || model == "b") ? ThreatModel::B : ThreatModel::A;
            const auto algo = c.value("algorithm", std::string("optimized"));
            if (algo != "baseline" && algo != "optimized")
                throw ParseError("algorithm must be baseline or optimized");
            cfg.algorithm = algo == "baseline" ? Algorithm::Baseline : Algorithm::Optimized;
            cfg.simplify = parse_simplify_mode(c.value("simplify", std::string("none")));
            cfg.n_max = c.value("n_max", 3);
            cfg.time_budget = c.value("timeout", timeout);
            cfg.hidden = c.value("hidden", std::vector<std::uint32_t>{});
            if (cfg.model == ThreatModel::B && cfg.hidden.empty())
                throw ParseError("Model B config needs a nonempty 'hidden' list");
            grid.secrets.push_back(c.contains("secret") ? bits_from_string(c["secret"].get<std::string>())
                                                        : BitVector{});
            grid.configs.push_back(std::move(cfg));
        }
        grid.seeds = doc.value("seeds", std::vector<std::uint64_t>{0});
        grid.repeats = doc.value("repeats", std::size_t{1});
        grid.threads = doc.value("threads", std::size_t{1});
        if (jsonl && doc.contains("jsonl"))
            *jsonl = base / doc["jsonl"].get<std::string>();
        if (csv && doc.contains("csv"))
            *csv = base / doc["csv"].get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid experiment spec: ") + e.what());
    }
    return grid;
}

std::vector<ExperimentReport> run_grid(const ExperimentGrid& grid,
                                       const std::function<void(const ExperimentReport&)>& sink) {
    struct Cell {
        std::size_t circuit, config, seed, repeat;
    };
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < grid.circuits.size(); ++c)
        for (std::size_t f = 0; f < grid.configs.size(); ++f)
            for (std::size_t s = 0; s < grid.seeds.size(); ++s)
                for (std::size_t r = 0; r < grid.repeats; ++r)
                    cells.push_back({c, f, s, r});

    std::vector<ExperimentReport> out(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex sink_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
            const Cell& cell = cells[i];
            AttackConfig cfg = grid.configs[cell.config];
            cfg.seed = grid.seeds[cell.seed];
            const BitVector* secret = nullptr;
            if (cell.config < grid.secrets.size() && !grid.secrets[cell.config].empty())
                secret = &grid.secrets[cell.config];
            out[i] = run_single(grid.circuits[cell.circuit], cfg, cell.repeat, secret);
            if (sink) {
                std::lock_guard lock(sink_mutex);
                sink(out[i]);
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(grid.threads, cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return out;
}

std::vector<ExperimentReport> run_experiment(const fs::path& spec_file) {
    fs::path jsonl_path, csv_path;
    const auto grid = load_experiment(spec_file, &jsonl_path, &csv_path);
    std::ofstream jsonl, csv;
    if (!jsonl_path.empty())
        jsonl.open(jsonl_path);
    if (!csv_path.empty()) {
        csv.open(csv_path);
        csv << ExperimentReport::csv_header() << '\n';
    }
    return run_grid(grid, [&](const ExperimentReport& r) {
        if (jsonl.is_open())
            jsonl << r.to_json() << '\n' << std::flush;
        if (csv.is_open())
            csv << r.to_csv() << '\n' << std::flush;
    });
}

} // namespace ghsat
