#include "ghsat/verify.hpp"

#include "ghsat/errors.hpp"

namespace ghsat {

namespace {

InputPartition effective(const Topology& topo, const InputPartition& p) {
    if (p.total() == 0 && topo.num_inputs() != 0)
        return InputPartition::all_visible(topo.num_inputs());
    if (p.total() != topo.num_inputs())
        throw ShapeError("input partition does not match circuit inputs");
    return p;
}

const BitVector& hidden_or_empty(const BitVector* y, const InputPartition& p) {
    static const BitVector empty;
    const BitVector& v = y ? *y : empty;
    if (v.size() != p.num_hidden())
        throw ShapeError("hidden vector width does not match the partition");
    return v;
}

/// Word for visible bit i of block `block` when enumerating 2^n inputs
/// 64 at a time.
std::uint64_t pattern_word(std::size_t i, std::uint64_t block) {
    static constexpr std::uint64_t low[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                             0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    if (i < 6)
        return low[i];
    return ((block >> (i - 6)) & 1) ? ~0ull : 0ull;
}

} // namespace

bool equiv_exhaustive(const Topology& topo, const Assignment& a1, const Assignment& a2,
                      const InputPartition& partition, const BitVector* y1, const BitVector* y2) {
    const auto part = effective(topo, partition);
    const auto& h1 = hidden_or_empty(y1, part);
    const auto& h2 = hidden_or_empty(y2, part);
    const std::size_t n = part.num_visible();
    if (n > kExhaustiveGuard)
        throw GuardError("exhaustive equivalence limited to " + std::to_string(kExhaustiveGuard) + " inputs");
    const std::uint64_t total = 1ull << n;
    const std::uint64_t blocks = total <= 64 ? 1 : total / 64;
    const std::uint64_t mask = total >= 64 ? ~0ull : (1ull << total) - 1;
    std::vector<std::uint64_t> w1(topo.num_inputs()), w2(topo.num_inputs());
    for (std::uint64_t b = 0; b < blocks; ++b) {
        for (std::uint32_t i = 0; i < topo.num_inputs(); ++i) {
            if (part.is_hidden(i)) {
                w1[i] = h1[part.slot(i)] ? ~0ull : 0;
                w2[i] = h2[part.slot(i)] ? ~0ull : 0;
            } else {
                w1[i] = w2[i] = pattern_word(part.slot(i), b);
            }
        }
        const auto o1 = eval_words(topo, a1, w1);
        const auto o2 = eval_words(topo, a2, w2);
        for (std::size_t h = 0; h < o1.size(); ++h)
            if ((o1[h] ^ o2[h]) & mask)
                return false;
    }
    return true;
}

bool equiv_miter(const Topology& topo, const Assignment& a1, const Assignment& a2, const InputPartition& partition,
                 const BitVector* y1, const BitVector* y2) {
    const auto part = effective(topo, partition);
    const auto& h1 = hidden_or_empty(y1, part);
    const auto& h2 = hidden_or_empty(y2, part);
    return !find_discriminating_input(topo, a1, a2, part, &h1, &h2).has_value();
}

std::uint64_t count_consistent(const Topology& topo, std::span<const TypeSet> domains, const DiscriminatingSet& di,
                               const InputPartition& partition) {
    const auto part = effective(topo, partition);
    if (domains.size() != topo.num_gates())
        throw ShapeError("domain map does not match gate count");
    BigInt space = search_space_size(domains);
    space <<= part.num_hidden();
    if (space > kCountGuard)
        throw GuardError("count_consistent limited to " + std::to_string(kCountGuard) + " candidates");

    std::vector<std::vector<GateType>> options;
    for (const auto& d : domains)
        options.push_back(d.members());
    const std::size_t k = options.size();
    std::vector<std::size_t> idx(k, 0);
    Assignment asg(k);
    for (std::size_t g = 0; g < k; ++g)
        asg[g] = options[g][0];

    std::uint64_t count = 0;
    while (true) {
        for (std::uint64_t y = 0; y < (1ull << part.num_hidden()); ++y) {
            const BitVector hv = bits_from_uint(y, part.num_hidden());
            bool ok = true;
            for (const auto& row : di) {
                if (eval_circuit(topo, asg, part.merge(row.x, hv)) != row.z) {
                    ok = false;
                    break;
                }
            }
            count += ok;
        }
        std::size_t g = 0;
        for (; g < k; ++g) {
            if (++idx[g] < options[g].size()) {
                asg[g] = options[g][idx[g]];
                break;
            }
            idx[g] = 0;
            asg[g] = options[g][0];
        }
        if (g == k)
            break;
    }
    return count;
}

std::uint64_t count_models_sat(const Topology& topo, std::span<const TypeSet> domains, const DiscriminatingSet& di,
                               const InputPartition& partition, std::uint64_t limit) {
    const auto part = effective(topo, partition);
    SolverSession s;
    const auto copy = encode_circuit(s, topo, domains, di, part);
    std::uint64_t count = 0;
    while (count < limit && s.solve() == sat::Result::Sat) {
        ++count;
        const auto asg = copy.decode(s);
        const auto y = copy.decode_hidden(s);
        // Blocking on every gate plus y: models differing only in internal
        // signal values are the same candidate.
        std::vector<sat::Lit> clause;
        for (std::size_t g = 0; g < asg.size(); ++g)
            clause.push_back(~copy.selector(g, asg[g]));
        for (std::size_t j = 0; j < y.size(); ++j)
            clause.push_back(sat::Lit::make(copy.hidden[j], y[j]));
        if (clause.empty())
            break;
        s.add_clause(clause);
    }
    return count;
}

Certification certify(const Topology& topo, const Assignment& target, const Assignment& recovered,
                      const InputPartition& partition, const BitVector* y_target, const BitVector* y_recovered) {
    const auto part = effective(topo, partition);
    Certification c;
    c.miter_equivalent = equiv_miter(topo, target, recovered, part, y_target, y_recovered);
    if (part.num_visible() <= 16)
        c.exhaustive_equivalent = equiv_exhaustive(topo, target, recovered, part, y_target, y_recovered);
    return c;
}

} // namespace ghsat
