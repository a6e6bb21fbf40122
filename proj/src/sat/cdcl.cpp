// Conflict-driven clause-learning solver in the MiniSat tradition: two watched
// literals, VSIDS with phase saving, Luby restarts, activity-based learnt
// clause deletion and recursive conflict-clause minimization. Clauses added
// between solve() calls persist; assumptions are per call.

#include "ghsat/sat/solver.hpp"

#include "ghsat/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <random>

namespace ghsat::sat {

namespace {

using CRef = std::uint32_t;
constexpr CRef kNoReason = 0xFFFFFFFFu;
constexpr Lit kUndefLit{-2};

constexpr std::int8_t kFalse = 0, kTrue = 1, kUndef = 2;

/// Flat clause storage: [size][flags][activity][lits...].
class ClauseArena {
  public:
    static constexpr std::uint32_t kLearnt = 1;
    static constexpr std::uint32_t kDeleted = 2;

    CRef alloc(std::span<const Lit> lits, bool learnt) {
        const auto c = static_cast<CRef>(mem_.size());
        mem_.push_back(static_cast<std::int32_t>(lits.size()));
        mem_.push_back(learnt ? kLearnt : 0);
        mem_.push_back(std::bit_cast<std::int32_t>(0.0f));
        for (Lit l : lits)
            mem_.push_back(l.x);
        return c;
    }

    std::uint32_t size(CRef c) const { return static_cast<std::uint32_t>(mem_[c]); }
    bool learnt(CRef c) const { return mem_[c + 1] & kLearnt; }
    bool deleted(CRef c) const { return mem_[c + 1] & kDeleted; }
    void mark_deleted(CRef c) {
        mem_[c + 1] |= kDeleted;
        wasted_ += size(c) + 3;
    }
    float activity(CRef c) const { return std::bit_cast<float>(mem_[c + 2]); }
    void set_activity(CRef c, float a) { mem_[c + 2] = std::bit_cast<std::int32_t>(a); }

    Lit lit(CRef c, std::uint32_t i) const { return Lit{mem_[c + 3 + i]}; }
    std::int32_t* raw(CRef c) { return &mem_[c + 3]; }

    std::size_t bytes_used() const { return mem_.size(); }
    std::size_t wasted() const { return wasted_; }

    void swap(ClauseArena& other) {
        mem_.swap(other.mem_);
        std::swap(wasted_, other.wasted_);
    }

  private:
    std::vector<std::int32_t> mem_;
    std::size_t wasted_ = 0;
};

struct Watcher {
    CRef cref;
    Lit blocker;
};

/// Max-heap of variables ordered by activity.
class VarHeap {
  public:
    explicit VarHeap(const std::vector<double>& activity) : act_(activity) {}

    bool contains(Var v) const { return v < static_cast<Var>(pos_.size()) && pos_[v] >= 0; }
    bool empty() const { return heap_.empty(); }

    void insert(Var v) {
        if (v >= static_cast<Var>(pos_.size()))
            pos_.resize(v + 1, -1);
        if (contains(v))
            return;
        pos_[v] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        up(pos_[v]);
    }

    void increased(Var v) {
        if (contains(v))
            up(pos_[v]);
    }

    Var pop() {
        Var top = heap_.front();
        heap_.front() = heap_.back();
        pos_[heap_.front()] = 0;
        heap_.pop_back();
        pos_[top] = -1;
        if (!heap_.empty())
            down(0);
        return top;
    }

  private:
    bool less(Var a, Var b) const { return act_[a] > act_[b]; }

    void up(int i) {
        Var v = heap_[i];
        while (i > 0) {
            int parent = (i - 1) / 2;
            if (!less(v, heap_[parent]))
                break;
            heap_[i] = heap_[parent];
            pos_[heap_[i]] = i;
            i = parent;
        }
        heap_[i] = v;
        pos_[v] = i;
    }

    void down(int i) {
        Var v = heap_[i];
        const int n = static_cast<int>(heap_.size());
        for (;;) {
            int child = 2 * i + 1;
            if (child >= n)
                break;
            if (child + 1 < n && less(heap_[child + 1], heap_[child]))
                ++child;
            if (!less(heap_[child], v))
                break;
            heap_[i] = heap_[child];
            pos_[heap_[i]] = i;
            i = child;
        }
        heap_[i] = v;
        pos_[v] = i;
    }

    const std::vector<double>& act_;
    std::vector<Var> heap_;
    std::vector<int> pos_;
};

double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; ++i)
        r *= y;
    return r;
}

class CdclSolver final : public SolverBackend {
  public:
    CdclSolver() : heap_(activity_) {}

    Var new_var() override {
        const Var v = static_cast<Var>(assigns_.size());
        assigns_.push_back(kUndef);
        level_.push_back(0);
        reason_.push_back(kNoReason);
        polarity_.push_back(true);
        seen_.push_back(0);
        activity_.push_back(seed_ ? jitter_(rng_) : 0.0);
        watches_.emplace_back();
        watches_.emplace_back();
        heap_.insert(v);
        return v;
    }

    std::size_t num_vars() const override { return assigns_.size(); }

    void add_clause(std::span<const Lit> clause) override {
        if (!ok_)
            return;
        cancel_until(0);
        tmp_.assign(clause.begin(), clause.end());
        std::sort(tmp_.begin(), tmp_.end());
        std::size_t j = 0;
        Lit prev = kUndefLit;
        for (Lit l : tmp_) {
            if (l.var() < 0 || l.var() >= static_cast<Var>(num_vars()))
                throw Error("clause references unallocated variable");
            if (value(l) == kTrue || l == ~prev)
                return;
            if (value(l) != kFalse && l != prev)
                tmp_[j++] = prev = l;
        }
        tmp_.resize(j);
        if (tmp_.empty()) {
            ok_ = false;
        } else if (tmp_.size() == 1) {
            enqueue(tmp_[0], kNoReason);
            ok_ = propagate() == kNoReason;
        } else {
            CRef c = arena_.alloc(tmp_, false);
            clauses_.push_back(c);
            attach(c);
        }
    }

    Result solve(std::span<const Lit> assumptions) override {
        ++stats_.solves;
        model_.clear();
        if (!ok_)
            return Result::Unsat;
        assumptions_.assign(assumptions.begin(), assumptions.end());
        max_learnts_ = std::max<double>(4000.0, static_cast<double>(clauses_.size()) / 3.0);
        Outcome status = Outcome::Restart;
        int restarts = 0;
        while (status == Outcome::Restart) {
            const double budget = luby(2.0, restarts++) * 100.0;
            status = search(static_cast<int>(budget));
            ++stats_.restarts;
            max_learnts_ *= 1.05;
        }
        Result result = Result::Unknown;
        if (status == Outcome::Sat) {
            model_.resize(num_vars());
            for (std::size_t v = 0; v < num_vars(); ++v)
                model_[v] = assigns_[v] == kTrue;
            result = Result::Sat;
        } else if (status == Outcome::Unsat) {
            result = Result::Unsat;
        }
        cancel_until(0);
        return result;
    }

    bool model_value(Var v) const override {
        return v >= 0 && static_cast<std::size_t>(v) < model_.size() && model_[v];
    }

    void set_deadline(std::optional<Clock::time_point> deadline) override { deadline_ = deadline; }

    void set_seed(std::uint64_t seed) override {
        seed_ = seed;
        rng_.seed(seed);
    }

    const SolverStats& stats() const override { return stats_; }
    std::string_view name() const override { return "cdcl"; }

  private:
    enum class Outcome { Sat, Unsat, Restart, Timeout };

    std::int8_t value(Lit l) const {
        const std::int8_t a = assigns_[l.var()];
        return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(l.negative()));
    }
    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    void enqueue(Lit l, CRef from) {
        assigns_[l.var()] = l.negative() ? kFalse : kTrue;
        level_[l.var()] = decision_level();
        reason_[l.var()] = from;
        trail_.push_back(l);
    }

    void attach(CRef c) {
        const Lit c0 = arena_.lit(c, 0), c1 = arena_.lit(c, 1);
        watches_[(~c0).x].push_back({c, c1});
        watches_[(~c1).x].push_back({c, c0});
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl)
            return;
        for (std::size_t i = trail_.size(); i-- > trail_lim_[lvl];) {
            const Var v = trail_[i].var();
            assigns_[v] = kUndef;
            reason_[v] = kNoReason;
            polarity_[v] = trail_[i].negative();
            heap_.insert(v);
        }
        qhead_ = trail_lim_[lvl];
        trail_.resize(trail_lim_[lvl]);
        trail_lim_.resize(lvl);
    }

    CRef propagate() {
        CRef conflict = kNoReason;
        while (qhead_ < trail_.size()) {
            const Lit p = trail_[qhead_++];
            const Lit false_lit = ~p;
            auto& ws = watches_[p.x];
            ++stats_.propagations;
            std::size_t i = 0, j = 0;
            const std::size_t n = ws.size();
            while (i < n) {
                const Watcher w = ws[i];
                if (value(w.blocker) == kTrue) {
                    ws[j++] = ws[i++];
                    continue;
                }
                const CRef cr = w.cref;
                std::int32_t* c = arena_.raw(cr);
                if (c[0] == false_lit.x)
                    std::swap(c[0], c[1]);
                ++i;
                const Lit first{c[0]};
                const Watcher nw{cr, first};
                if (first != w.blocker && value(first) == kTrue) {
                    ws[j++] = nw;
                    continue;
                }
                const std::uint32_t size = arena_.size(cr);
                bool moved = false;
                for (std::uint32_t k = 2; k < size; ++k) {
                    if (value(Lit{c[k]}) != kFalse) {
                        std::swap(c[1], c[k]);
                        watches_[(~Lit{c[1]}).x].push_back(nw);
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                ws[j++] = nw;
                if (value(first) == kFalse) {
                    conflict = cr;
                    qhead_ = trail_.size();
                    while (i < n)
                        ws[j++] = ws[i++];
                } else {
                    enqueue(first, cr);
                }
            }
            ws.resize(j);
            if (conflict != kNoReason)
                break;
        }
        return conflict;
    }

    void bump_var(Var v) {
        if ((activity_[v] += var_inc_) > 1e100) {
            for (auto& a : activity_)
                a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        heap_.increased(v);
    }

    void bump_clause(CRef c) {
        const float a = arena_.activity(c) + static_cast<float>(cla_inc_);
        arena_.set_activity(c, a);
        if (a > 1e20f) {
            for (CRef l : learnts_)
                arena_.set_activity(l, arena_.activity(l) * 1e-20f);
            cla_inc_ *= 1e-20;
        }
    }

    std::uint32_t abstract_level(Var v) const { return 1u << (level_[v] & 31); }

    bool lit_redundant(Lit p, std::uint32_t abstract_levels) {
        analyze_stack_.clear();
        analyze_stack_.push_back(p);
        const std::size_t top = analyze_toclear_.size();
        while (!analyze_stack_.empty()) {
            const CRef c = reason_[analyze_stack_.back().var()];
            analyze_stack_.pop_back();
            for (std::uint32_t i = 1; i < arena_.size(c); ++i) {
                const Lit q = arena_.lit(c, i);
                const Var v = q.var();
                if (seen_[v] || level_[v] == 0)
                    continue;
                if (reason_[v] != kNoReason && (abstract_level(v) & abstract_levels)) {
                    seen_[v] = 1;
                    analyze_stack_.push_back(q);
                    analyze_toclear_.push_back(q);
                } else {
                    for (std::size_t k = top; k < analyze_toclear_.size(); ++k)
                        seen_[analyze_toclear_[k].var()] = 0;
                    analyze_toclear_.resize(top);
                    return false;
                }
            }
        }
        return true;
    }

    void analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level) {
        int path = 0;
        Lit p = kUndefLit;
        learnt.clear();
        learnt.push_back(kUndefLit);
        std::size_t index = trail_.size();
        do {
            if (arena_.learnt(conflict))
                bump_clause(conflict);
            for (std::uint32_t j = (p == kUndefLit ? 0 : 1); j < arena_.size(conflict); ++j) {
                const Lit q = arena_.lit(conflict, j);
                const Var v = q.var();
                if (!seen_[v] && level_[v] > 0) {
                    bump_var(v);
                    seen_[v] = 1;
                    if (level_[v] >= decision_level())
                        ++path;
                    else
                        learnt.push_back(q);
                }
            }
            while (!seen_[trail_[--index].var()]) {
            }
            p = trail_[index];
            conflict = reason_[p.var()];
            seen_[p.var()] = 0;
            --path;
        } while (path > 0);
        learnt[0] = ~p;

        analyze_toclear_.assign(learnt.begin(), learnt.end());
        std::uint32_t levels = 0;
        for (std::size_t i = 1; i < learnt.size(); ++i)
            levels |= abstract_level(learnt[i].var());
        std::size_t keep = 1;
        for (std::size_t i = 1; i < learnt.size(); ++i) {
            const Var v = learnt[i].var();
            if (reason_[v] == kNoReason || !lit_redundant(learnt[i], levels))
                learnt[keep++] = learnt[i];
        }
        learnt.resize(keep);
        for (Lit l : analyze_toclear_)
            seen_[l.var()] = 0;

        backtrack_level = 0;
        if (learnt.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t i = 2; i < learnt.size(); ++i)
                if (level_[learnt[i].var()] > level_[learnt[max_i].var()])
                    max_i = i;
            std::swap(learnt[1], learnt[max_i]);
            backtrack_level = level_[learnt[1].var()];
        }
    }

    bool locked(CRef c) const {
        const Lit c0 = arena_.lit(c, 0);
        return reason_[c0.var()] == c && value(c0) == kTrue;
    }

    bool satisfied(CRef c) const {
        for (std::uint32_t i = 0; i < arena_.size(c); ++i)
            if (value(arena_.lit(c, i)) == kTrue)
                return true;
        return false;
    }

    void reduce_db() {
        const double extra = cla_inc_ / std::max<std::size_t>(learnts_.size(), 1);
        std::sort(learnts_.begin(), learnts_.end(), [this](CRef a, CRef b) {
            const bool a_bin = arena_.size(a) == 2, b_bin = arena_.size(b) == 2;
            if (a_bin != b_bin)
                return !a_bin;
            return arena_.activity(a) < arena_.activity(b);
        });
        std::size_t j = 0;
        for (std::size_t i = 0; i < learnts_.size(); ++i) {
            const CRef c = learnts_[i];
            if (arena_.size(c) > 2 && !locked(c) &&
                (i < learnts_.size() / 2 || arena_.activity(c) < extra))
                arena_.mark_deleted(c);
            else
                learnts_[j++] = c;
        }
        learnts_.resize(j);
        collect_garbage();
    }

    void simplify_db() {
        auto sweep = [this](std::vector<CRef>& list) {
            std::size_t j = 0;
            for (CRef c : list) {
                if (satisfied(c))
                    arena_.mark_deleted(c);
                else
                    list[j++] = c;
            }
            list.resize(j);
        };
        sweep(clauses_);
        sweep(learnts_);
        simplified_trail_ = trail_.size();
        collect_garbage();
    }

    void collect_garbage() {
        ClauseArena fresh;
        std::vector<CRef> forward_from, forward_to;
        auto move = [&](std::vector<CRef>& list) {
            for (CRef& c : list) {
                std::vector<Lit> lits(arena_.size(c));
                for (std::uint32_t i = 0; i < lits.size(); ++i)
                    lits[i] = arena_.lit(c, i);
                const CRef n = fresh.alloc(lits, arena_.learnt(c));
                fresh.set_activity(n, arena_.activity(c));
                forward_from.push_back(c);
                forward_to.push_back(n);
                c = n;
            }
        };
        move(clauses_);
        move(learnts_);
        // forward_from is ascending within each list; sort pairs for lookup.
        std::vector<std::size_t> order(forward_from.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return forward_from[a] < forward_from[b]; });
        std::vector<CRef> sorted_from(order.size()), sorted_to(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted_from[i] = forward_from[order[i]];
            sorted_to[i] = forward_to[order[i]];
        }
        for (const Lit l : trail_) {
            CRef& r = reason_[l.var()];
            if (r == kNoReason)
                continue;
            if (level_[l.var()] == 0) {
                r = kNoReason;
                continue;
            }
            auto it = std::lower_bound(sorted_from.begin(), sorted_from.end(), r);
            r = (it != sorted_from.end() && *it == r) ? sorted_to[it - sorted_from.begin()] : kNoReason;
        }
        arena_.swap(fresh);
        for (auto& ws : watches_)
            ws.clear();
        for (CRef c : clauses_)
            attach(c);
        for (CRef c : learnts_)
            attach(c);
    }

    Lit pick_branch() {
        while (!heap_.empty()) {
            const Var v = heap_.pop();
            if (assigns_[v] == kUndef)
                return Lit::make(v, polarity_[v]);
        }
        return kUndefLit;
    }

    bool out_of_time() const { return deadline_ && Clock::now() >= *deadline_; }

    Outcome search(int conflict_budget) {
        int conflicts = 0;
        std::vector<Lit> learnt;
        for (;;) {
            const CRef conflict = propagate();
            if (conflict != kNoReason) {
                ++stats_.conflicts;
                ++conflicts;
                if (decision_level() == 0) {
                    ok_ = false;
                    return Outcome::Unsat;
                }
                int bt = 0;
                analyze(conflict, learnt, bt);
                cancel_until(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoReason);
                } else {
                    const CRef c = arena_.alloc(learnt, true);
                    learnts_.push_back(c);
                    attach(c);
                    bump_clause(c);
                    enqueue(learnt[0], c);
                }
                var_inc_ /= 0.95;
                cla_inc_ /= 0.999;
                if ((stats_.conflicts & 255) == 0 && out_of_time())
                    return Outcome::Timeout;
                continue;
            }
            if (conflicts >= conflict_budget) {
                cancel_until(0);
                return out_of_time() ? Outcome::Timeout : Outcome::Restart;
            }
            if (decision_level() == 0 && trail_.size() > simplified_trail_)
                simplify_db();
            if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_)
                reduce_db();

            Lit next = kUndefLit;
            while (decision_level() < static_cast<int>(assumptions_.size())) {
                const Lit a = assumptions_[decision_level()];
                const auto v = value(a);
                if (v == kTrue) {
                    trail_lim_.push_back(trail_.size());
                } else if (v == kFalse) {
                    return Outcome::Unsat;
                } else {
                    next = a;
                    break;
                }
            }
            if (next == kUndefLit) {
                ++stats_.decisions;
                next = pick_branch();
                if (next == kUndefLit)
                    return Outcome::Sat;
            }
            trail_lim_.push_back(trail_.size());
            enqueue(next, kNoReason);
        }
    }

    bool ok_ = true;
    ClauseArena arena_;
    std::vector<CRef> clauses_, learnts_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<std::int8_t> assigns_;
    std::vector<int> level_;
    std::vector<CRef> reason_;
    std::vector<bool> polarity_;
    std::vector<char> seen_;
    std::vector<double> activity_;
    VarHeap heap_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    std::size_t simplified_trail_ = 0;
    std::vector<Lit> assumptions_;
    std::vector<Lit> tmp_, analyze_stack_, analyze_toclear_;
    std::vector<bool> model_;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    double max_learnts_ = 4000.0;
    std::optional<Clock::time_point> deadline_;
    std::uint64_t seed_ = 0;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> jitter_{0.0, 1e-5};
    SolverStats stats_;
};

} // namespace

std::unique_ptr<SolverBackend> make_solver(std::string_view name) {
    std::string chosen(name);
    if (chosen.empty()) {
        const char* env = std::getenv("GHSAT_SOLVER");
        chosen = env && *env ? env : "cdcl";
    }
    if (chosen == "cdcl")
        return std::make_unique<CdclSolver>();
    throw Error("unknown SAT backend '" + chosen + "'");
}

std::vector<std::string> available_solvers() { return {"cdcl"}; }

} // namespace ghsat::sat
