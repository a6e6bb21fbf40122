#include "ghsat/attack.hpp"

#include "ghsat/errors.hpp"

#include <memory>

namespace ghsat {

using sat::Lit;

std::string_view to_string(ThreatModel m) { return m == ThreatModel::A ? "A" : "B"; }

std::string_view to_string(Algorithm a) { return a == Algorithm::Baseline ? "baseline" : "optimized"; }

std::string_view to_string(RecoveryStatus s) {
    switch (s) {
    case RecoveryStatus::Recovered:
        return "Recovered";
    case RecoveryStatus::Timeout:
        return "Timeout";
    case RecoveryStatus::Error:
        return "Error";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

struct TimeoutSignal {};

/// (T, Y) pair; Y is empty under Model A.
struct Candidate {
    Assignment types;
    BitVector hidden;
};

InputPartition effective_partition(const Topology& topo, const InputPartition& p) {
    if (p.total() == 0 && topo.num_inputs() != 0)
        return InputPartition::all_visible(topo.num_inputs());
    return p;
}

std::optional<BitVector> discriminate(const Topology& topo, const InputPartition& part, const Candidate& c1,
                                      const Candidate& c2, std::optional<Clock::time_point> deadline,
                                      const std::string& solver, AttackStats* stats) {
    SolverSession s(solver);
    s.set_deadline(deadline);
    auto singleton = [&](const Assignment& a) {
        std::vector<TypeSet> d;
        for (auto t : a)
            d.push_back(TypeSet{t});
        return d;
    };
    const auto d1 = singleton(c1.types);
    const auto d2 = singleton(c2.types);
    const auto k1 = make_copy(s, topo, d1, part);
    const auto k2 = make_copy(s, topo, d2, part);
    if (part.num_hidden()) {
        freeze(s, k1, c1.types, &c1.hidden);
        freeze(s, k2, c2.types, &c2.hidden);
    }
    const auto dh = diff_constr(s, k1, k2);
    const auto r = s.solve();
    if (stats) {
        ++stats->solve_calls;
        stats->clauses += s.num_clauses();
        stats->conflicts += s.stats().conflicts;
        stats->decisions += s.stats().decisions;
    }
    if (r == sat::Result::Unknown)
        throw TimeoutSignal{};
    if (r == sat::Result::Unsat)
        return std::nullopt;
    return dh.decode(s);
}

/// State shared by both recovery loops.
class Attack {
  public:
    Attack(const Topology& topo, Oracle& oracle, const AttackConfig& cfg, InputPartition part)
        : topo_(topo), oracle_(oracle), cfg_(cfg), part_(std::move(part)) {
        start_ = Clock::now();
        deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_budget));
        res_.domains = classify_gates(topo, cfg.simplify);
        std::vector<TypeSet> full(topo.num_gates(), typesets::L);
        res_.search_space_before = search_space_size(full);
        res_.search_space_after = search_space_size(res_.domains.domains);
        queries_before_ = oracle.query_count();
    }

    RecoveryResult run(Algorithm algo) {
        try {
            if (cfg_.n_max < 1)
                throw Error("n_max must be at least 1");
            if (oracle_.num_inputs() != part_.num_visible() || oracle_.num_outputs() != topo_.num_outputs())
                throw ShapeError("oracle interface does not match the topology");
            Candidate c = algo == Algorithm::Baseline ? baseline() : optimized();
            res_.status = RecoveryStatus::Recovered;
            res_.assignment = std::move(c.types);
            res_.hidden_values = std::move(c.hidden);
        } catch (const TimeoutSignal&) {
            res_.status = RecoveryStatus::Timeout;
            res_.message = "time budget exhausted";
        } catch (const std::exception& e) {
            res_.status = RecoveryStatus::Error;
            res_.message = e.what();
        }
        res_.query_count = oracle_.query_count() - queries_before_;
        res_.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
        return std::move(res_);
    }

  private:
    const BitVector* hidden_ptr(const Candidate& c) const { return part_.num_hidden() ? &c.hidden : nullptr; }

    sat::Result solve(SolverSession& s, std::span<const Lit> assumptions = {}) {
        if (Clock::now() >= deadline_)
            throw TimeoutSignal{};
        s.set_deadline(deadline_);
        const auto r = s.solve(assumptions);
        ++res_.stats.solve_calls;
        if (r == sat::Result::Unknown)
            throw TimeoutSignal{};
        return r;
    }

    void absorb(const SolverSession& s) {
        res_.stats.clauses += s.num_clauses();
        res_.stats.conflicts += s.stats().conflicts;
        res_.stats.decisions += s.stats().decisions;
    }

    BitVector full_input(const BitVector& x, const Candidate& c) const {
        return part_.num_hidden() ? part_.merge(x, c.hidden) : x;
    }

    bool predicts(const Candidate& c, const IoPair& row) const {
        return eval_circuit(topo_, c.types, full_input(row.x, c)) == row.z;
    }

    /// Re-evaluates a decoded model against every observed row.
    Candidate decode(const SolverSession& s, const CircuitCopy& copy) const {
        Candidate c{copy.decode(s), part_.num_hidden() ? copy.decode_hidden(s) : BitVector{}};
        for (const auto& row : res_.di)
            if (!predicts(c, row))
                throw Error("internal: solver model contradicts an observed row");
        return c;
    }

    const IoPair& query(const BitVector& x) {
        for (const auto& row : res_.di)
            if (row.x == x)
                throw Error("internal: discriminating input repeated");
        res_.di.push_back({x, oracle_.query(x)});
        return res_.di.back();
    }

    Candidate extract_final() {
        SolverSession s(cfg_.solver, cfg_.seed);
        const auto copy = encode_circuit(s, topo_, res_.domains.domains, res_.di, part_);
        const auto r = solve(s);
        absorb(s);
        if (r != sat::Result::Sat)
            throw Error("no assignment reproduces the observed rows; oracle inconsistent with topology");
        return decode(s, copy);
    }

    Candidate baseline() {
        SolverSession s(cfg_.solver, cfg_.seed);
        const auto c1 = make_copy(s, topo_, res_.domains.domains, part_);
        const auto c2 = make_copy(s, topo_, res_.domains.domains, part_);
        const auto dh = diff_constr(s, c1, c2);
        while (true) {
            ++res_.stats.outer_iterations;
            if (solve(s) == sat::Result::Unsat)
                break;
            const Candidate t1 = decode(s, c1);
            const Candidate t2 = decode(s, c2);
            const IoPair& row = query(dh.decode(s));
            encode_sample(s, c1, row);
            encode_sample(s, c2, row);
            for (const Candidate* t : {&t1, &t2}) {
                if (predicts(*t, row))
                    continue;
                block_circ(s, c1, t->types, hidden_ptr(*t), true);
                block_circ(s, c2, t->types, hidden_ptr(*t), true);
            }
        }
        absorb(s);
        return extract_final();
    }

    /// Persistent two-copy session for the N_max fallback. Copy `pinned` is
    /// fixed per call through assumptions; `free` carries DI and global blocks.
    struct Fallback {
        SolverSession session;
        CircuitCopy pinned;
        CircuitCopy free;
        DiffHandle diff;
        std::size_t rows = 0;
        std::size_t blocks = 0;

        Fallback(const std::string& solver, std::uint64_t seed) : session(solver, seed) {}
    };

    Candidate optimized() {
        SolverSession s(cfg_.solver, cfg_.seed);
        const auto copy = make_copy(s, topo_, res_.domains.domains, part_);
        std::vector<Candidate> global_blocks;
        std::unique_ptr<Fallback> fb;

        auto block_global = [&](const Candidate& t) {
            block_circ(s, copy, t.types, hidden_ptr(t), true);
            global_blocks.push_back(t);
        };
        // Queries x and keeps only the candidates that predict it.
        auto learn = [&](const BitVector& x, const Candidate& t1, const Candidate& t2) {
            const IoPair& row = query(x);
            encode_sample(s, copy, row);
            int blocked = 0;
            for (const Candidate* t : {&t1, &t2})
                if (!predicts(*t, row)) {
                    block_global(*t);
                    ++blocked;
                }
            if (blocked == 0)
                throw Error("internal: discriminating input separated neither candidate");
        };
        auto fallback = [&](const Candidate& t1) -> std::optional<std::pair<BitVector, Candidate>> {
            ++res_.stats.fallback_calls;
            if (!fb) {
                fb = std::make_unique<Fallback>(cfg_.solver, cfg_.seed);
                fb->pinned = make_copy(fb->session, topo_, res_.domains.domains, part_);
                fb->free = make_copy(fb->session, topo_, res_.domains.domains, part_);
                fb->diff = diff_constr(fb->session, fb->pinned, fb->free);
            }
            for (; fb->rows < res_.di.size(); ++fb->rows)
                encode_sample(fb->session, fb->free, res_.di[fb->rows]);
            for (; fb->blocks < global_blocks.size(); ++fb->blocks) {
                const auto& t = global_blocks[fb->blocks];
                block_circ(fb->session, fb->free, t.types, hidden_ptr(t), true);
            }
            const auto pins = fb->pinned.pin(t1.types, hidden_ptr(t1));
            if (solve(fb->session, pins) == sat::Result::Unsat)
                return std::nullopt;
            return std::make_pair(fb->diff.decode(fb->session), decode(fb->session, fb->free));
        };

        while (true) {
            ++res_.stats.outer_iterations;
            if (solve(s) == sat::Result::Unsat)
                throw Error("no assignment reproduces the observed rows; oracle inconsistent with topology");
            const Candidate t1 = decode(s, copy);
            const Lit act = *block_circ(s, copy, t1.types, hidden_ptr(t1), false);
            const Lit assume[] = {act};
            bool complete = false;
            int fruitless = 0;
            while (true) {
                ++res_.stats.inner_iterations;
                if (solve(s, assume) == sat::Result::Unsat) {
                    complete = true;
                    break;
                }
                const Candidate t2 = decode(s, copy);
                if (auto x = discriminate(topo_, part_, t1, t2, deadline_, cfg_.solver, &res_.stats)) {
                    learn(*x, t1, t2);
                    break;
                }
                block_circ(s, copy, t2.types, hidden_ptr(t2), false, act);
                if (++fruitless < cfg_.n_max)
                    continue;
                if (auto found = fallback(t1)) {
                    learn(found->first, t1, found->second);
                } else {
                    complete = true;
                }
                break;
            }
            s.add_clause({~act});
            if (complete)
                break;
        }

        if (solve(s) != sat::Result::Sat)
            throw Error("internal: final extraction failed");
        Candidate result = decode(s, copy);
        absorb(s);
        if (fb)
            absorb(fb->session);
        return result;
    }

    const Topology& topo_;
    Oracle& oracle_;
    const AttackConfig& cfg_;
    InputPartition part_;
    Clock::time_point start_;
    Clock::time_point deadline_;
    std::size_t queries_before_ = 0;
    RecoveryResult res_;
};

InputPartition partition_for(const Topology& topo, const AttackConfig& cfg) {
    if (cfg.model == ThreatModel::B)
        return InputPartition(topo.num_inputs(), cfg.hidden);
    return InputPartition::all_visible(topo.num_inputs());
}

} // namespace

std::optional<BitVector> find_discriminating_input(const Topology& topo, const Assignment& t1,
                                                   const Assignment& t2, const InputPartition& partition,
                                                   const BitVector* y1, const BitVector* y2) {
    const auto part = effective_partition(topo, partition);
    Candidate c1{t1, y1 ? *y1 : BitVector{}};
    Candidate c2{t2, y2 ? *y2 : BitVector{}};
    if (c1.hidden.size() != part.num_hidden() || c2.hidden.size() != part.num_hidden())
        throw ShapeError("hidden vector width does not match the partition");
    return discriminate(topo, part, c1, c2, std::nullopt, {}, nullptr);
}

RecoveryResult run_baseline(const Topology& topo, Oracle& oracle, const AttackConfig& cfg) {
    return Attack(topo, oracle, cfg, partition_for(topo, cfg)).run(Algorithm::Baseline);
}

RecoveryResult run_optimized(const Topology& topo, Oracle& oracle, const AttackConfig& cfg) {
    return Attack(topo, oracle, cfg, partition_for(topo, cfg)).run(Algorithm::Optimized);
}

RecoveryResult run_model_b(const Topology& topo, Oracle& oracle, const AttackConfig& cfg) {
    return Attack(topo, oracle, cfg, InputPartition(topo.num_inputs(), cfg.hidden)).run(cfg.algorithm);
}

RecoveryResult run_attack(const Topology& topo, Oracle& oracle, const AttackConfig& cfg) {
    if (cfg.model == ThreatModel::B)
        return run_model_b(topo, oracle, cfg);
    return cfg.algorithm == Algorithm::Baseline ? run_baseline(topo, oracle, cfg) : run_optimized(topo, oracle, cfg);
}

} // namespace ghsat
