#include "relkit/attractor.hpp"

#include <unordered_map>

namespace relkit {

BlockVerdict is_attractor_block(const BoxRelation& rel, const BoxSet& block) {
    require_same_grid(rel.grid(), block.grid());
    const BoxSet forbidden = closure_of_complement(block);
    BlockVerdict verdict;
    block.for_each([&](BoxIndex s) {
        for (BoxIndex t : rel.targets(s))
            if (forbidden.contains(t)) verdict.witnesses.emplace_back(s, t);
    });
    verdict.is_block = verdict.witnesses.empty();
    return verdict;
}

OmegaResult omega_limit(const BoxRelation& rel, const BoxSet& set, OmegaOptions options) {
    require_same_grid(rel.grid(), set.grid());
    const std::size_t cap = options.cap ? options.cap : 10 * rel.grid()->box_count();

    std::vector<BoxSet> seen{set};
    std::unordered_map<std::size_t, std::vector<std::size_t>> by_hash;
    by_hash[set.hash()].push_back(0);

    BoxSet cur = set;
    for (std::size_t step = 0;; ++step) {
        BoxSet next = image(rel, cur);
        if (next.is_subset_of(cur)) {
            // f(S_k) ⊆ S_k makes the rest of the sequence nonincreasing
            std::size_t k = step;
            while (!(next == cur)) {
                cur = std::move(next);
                next = image(rel, cur);
                ++k;
            }
            return OmegaResult{std::move(cur), k, 1, true};
        }
        const std::size_t h = next.hash();
        if (auto it = by_hash.find(h); it != by_hash.end()) {
            for (std::size_t p : it->second) {
                if (!(seen[p] == next)) continue;
                BoxSet limit(rel.grid());
                for (std::size_t i = p; i < seen.size(); ++i) limit |= seen[i];
                return OmegaResult{std::move(limit), p, seen.size() - p, true};
            }
        }
        if (seen.size() >= cap) throw IterationCapError(cap);
        by_hash[h].push_back(seen.size());
        seen.push_back(next);
        cur = std::move(next);
    }
}

BoxSet attractor_from_block(const BoxRelation& rel, const BoxSet& block) {
    BlockVerdict verdict = is_attractor_block(rel, block);
    if (!verdict.is_block)
        throw PreconditionError("set is not a certified attractor block", std::move(verdict.witnesses));
    return omega_limit(rel, block).limit;
}

BlockSearch find_attractor_block(const BoxRelation& rel, const BoxSet& neighborhood) {
    require_same_grid(rel.grid(), neighborhood.grid());
    BlockSearch result{std::nullopt, omega_limit(rel, neighborhood).limit, 0};
    for (;;) {
        if (!result.frontier.is_subset_of(neighborhood)) return result;
        BoxSet grown = result.frontier | dilate(image(rel, result.frontier), 1);
        if (grown == result.frontier) {
            // the Moore ring of f(B) lies in B, so f(B) ⊆ int_c(B)
            result.block = result.frontier;
            return result;
        }
        result.frontier = std::move(grown);
        ++result.steps;
    }
}

bool is_invariant(const BoxRelation& rel, const BoxSet& set) { return image(rel, set) == set; }

}  // namespace relkit
