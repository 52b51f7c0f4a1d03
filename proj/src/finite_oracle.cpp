#include "relkit/finite_oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include <fmt/format.h>

namespace relkit::oracle {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t bound) { return bound ? next() % bound : 0; }

FiniteRelation::FiniteRelation(int states) : n_(states), succ_(static_cast<std::size_t>(std::max(states, 0)), 0) {
    if (states < 1 || states > kMaxStates)
        throw CapacityError(fmt::format("finite relations support 1..{} states, got {}", kMaxStates, states));
}

FiniteRelation::FiniteRelation(int states, const std::vector<std::pair<int, int>>& edges)
    : FiniteRelation(states) {
    for (auto [a, b] : edges) add_edge(a, b);
}

void FiniteRelation::add_edge(int from, int to) {
    if (from < 0 || from >= n_ || to < 0 || to >= n_)
        throw std::out_of_range(fmt::format("edge ({}, {}) outside {} states", from, to, n_));
    succ_[static_cast<std::size_t>(from)] |= StateSet{1} << to;
}

std::vector<std::pair<int, int>> FiniteRelation::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
}

std::size_t FiniteRelation::edge_count() const {
    std::size_t c = 0;
    for (StateSet s : succ_) c += static_cast<std::size_t>(std::popcount(s));
    return c;
}

StateSet fo_image(const FiniteRelation& rel, StateSet set) {
    if (set & ~rel.all()) throw std::out_of_range("state set names states outside the space");
    StateSet out = 0;
    for (StateSet rest = set; rest; rest &= rest - 1) out |= rel.successors(std::countr_zero(rest));
    return out;
}

StateSet fo_omega(const FiniteRelation& rel, StateSet set) {
    std::vector<StateSet> seq{set};
    std::map<StateSet, std::size_t> first_seen{{set, 0}};
    for (;;) {
        const StateSet next = fo_image(rel, seq.back());
        if (auto it = first_seen.find(next); it != first_seen.end()) {
            StateSet out = 0;
            for (std::size_t i = it->second; i < seq.size(); ++i) out |= seq[i];
            return out;
        }
        first_seen.emplace(next, seq.size());
        seq.push_back(next);
    }
}

namespace {

// Discrete topology: every set is clopen.
StateSet closure(StateSet s) { return s; }
StateSet interior(StateSet s) { return s; }

StateSet all_images(const FiniteRelation& rel, StateSet set) {
    StateSet out = 0;
    std::set<StateSet> seen;
    for (StateSet cur = set; seen.insert(cur).second; cur = fo_image(rel, cur)) out |= cur;
    return out;
}

}  // namespace

BlockForms fo_block_forms(const FiniteRelation& rel, StateSet block) {
    BlockForms forms;
    const StateSet img = fo_image(rel, closure(block));
    forms.image_form = (img & ~interior(block)) == 0;

    const StateSet src = closure(block);
    const StateSet dst = closure(rel.all() & ~block);
    forms.disjointness_form = true;
    for (const auto& [a, b] : rel.edges())
        if (((src >> a) & 1u) && ((dst >> b) & 1u)) forms.disjointness_form = false;
    return forms;
}

bool fo_is_attractor_block(const FiniteRelation& rel, StateSet block) {
    const BlockForms f = fo_block_forms(rel, block);
    if (f.image_form != f.disjointness_form)
        throw std::logic_error("attractor-block characterizations disagree on " + describe(block, rel.size()));
    return f.image_form;
}

bool fo_is_attractor(const FiniteRelation& rel, StateSet set) {
    if (rel.size() > kMaxExhaustiveStates)
        throw CapacityError(fmt::format("exhaustive attractor test supports at most {} states; sample instead",
                                        kMaxExhaustiveStates));
    if (fo_image(rel, set) != set) return false;
    const StateSet free = rel.all() & ~set;
    // every superset is a neighbourhood; walk all subsets of the complement
    for (StateSet extra = free;; extra = (extra - 1) & free) {
        if (fo_omega(rel, set | extra) == set) return true;
        if (extra == 0) break;
    }
    return false;
}

FiniteRelation fo_random(int states, double density, std::uint64_t seed) {
    FiniteRelation rel(states);
    SplitMix64 rng(seed);
    for (int i = 0; i < states; ++i)
        for (int j = 0; j < states; ++j)
            if (rng.uniform() < density) rel.add_edge(i, j);
    return rel;
}

std::string describe(StateSet set, int states) {
    std::string out = "{";
    bool first = true;
    for (int i = 0; i < states; ++i) {
        if (!((set >> i) & 1u)) continue;
        out += fmt::format("{}{}", first ? "" : ",", i);
        first = false;
    }
    return out + "}";
}

namespace {

std::string describe_relation(const FiniteRelation& rel) {
    std::string out = fmt::format("n={} edges=[", rel.size());
    bool first = true;
    for (auto [a, b] : rel.edges()) {
        out += fmt::format("{}({},{})", first ? "" : " ", a, b);
        first = false;
    }
    return out + "]";
}

class Suite {
public:
    Suite(SuiteReport& report, Mutation mutation) : report_(report), mutation_(mutation) {}

    StateSet omega(const FiniteRelation& rel, StateSet set) const {
        return mutation_ == Mutation::DropInvariance ? all_images(rel, set) : fo_omega(rel, set);
    }

    void record(CheckTally& tally, bool ok, const std::string& label, const FiniteRelation& rel,
                const std::string& detail) {
        if (ok) {
            ++tally.passed;
            return;
        }
        ++tally.failed;
        if (report_.first_counterexample.empty())
            report_.first_counterexample = label + ": " + describe_relation(rel) + " " + detail;
    }

    // Subsets of the space to test: all of them for small n, else a sample.
    static std::vector<StateSet> subsets(const FiniteRelation& rel, SplitMix64& rng) {
        std::vector<StateSet> out;
        if (rel.size() <= 8) {
            for (StateSet s = 0; s <= rel.all(); ++s) out.push_back(s);
        } else {
            for (int i = 0; i < 64; ++i) out.push_back(rng.next() & rel.all());
        }
        return out;
    }

    void run_trial(const FiniteRelation& f, SplitMix64& rng) {
        const int n = f.size();
        std::vector<StateSet> blocks;
        for (StateSet b : subsets(f, rng)) {
            const BlockForms forms = fo_block_forms(f, b);
            record(report_.block_forms_agree, forms.image_form == forms.disjointness_form, "T1", f,
                   "B=" + describe(b, n));
            if (forms.image_form && forms.disjointness_form) blocks.push_back(b);
        }

        std::set<StateSet> attractors;
        for (StateSet b : blocks) {
            const StateSet a = omega(f, b);
            const bool ok = fo_image(f, a) == a && (a & ~b) == 0 && fo_is_attractor(f, a);
            record(report_.block_yields_attractor, ok, "T2", f, "B=" + describe(b, n) + " omega=" + describe(a, n));
            if (ok) attractors.insert(a);
        }

        for (StateSet a : attractors) {
            const StateSet free = f.all() & ~a;
            std::vector<StateSet> neighborhoods;
            if (n <= 8) {
                for (StateSet extra = free;; extra = (extra - 1) & free) {
                    neighborhoods.push_back(a | extra);
                    if (extra == 0) break;
                }
            } else {
                for (int i = 0; i < 16; ++i) neighborhoods.push_back(a | (rng.next() & free));
            }
            for (StateSet nb : neighborhoods) {
                const StateSet room = nb & ~a;
                bool found = false;
                for (StateSet extra = room;; extra = (extra - 1) & room) {
                    const StateSet b = a | extra;
                    if (fo_is_attractor_block(f, b) && omega(f, b) == a) {
                        found = true;
                        break;
                    }
                    if (extra == 0) break;
                }
                record(report_.attractor_has_block, found, "T3", f, "A=" + describe(a, n) + " N=" + describe(nb, n));
            }
        }

        for (StateSet b : blocks) {
            for (int k = 0; k < 3; ++k) {
                // random g, then remove every edge from B to its complement
                FiniteRelation g(n);
                const double density = rng.uniform();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const bool keep = rng.uniform() < density;
                        const bool escapes = ((b >> i) & 1u) && !((b >> j) & 1u);
                        if (keep && !escapes) g.add_edge(i, j);
                    }
                const StateSet a = omega(g, b);
                const bool ok = fo_is_attractor_block(g, b) && fo_image(g, a) == a && (a & ~b) == 0 &&
                                fo_is_attractor(g, a);
                record(report_.perturbation_persists, ok, "T4", g, "B=" + describe(b, n) + " omega=" + describe(a, n));
            }
        }
    }

private:
    SuiteReport& report_;
    Mutation mutation_;
};

}  // namespace

SuiteReport fo_theorem_suite(int n_max, std::size_t trials, std::uint64_t seed, Mutation mutation) {
    if (n_max < 1 || n_max > kMaxExhaustiveStates)
        throw CapacityError(fmt::format("theorem suite supports n_max in 1..{}", kMaxExhaustiveStates));
    SuiteReport report;
    report.trials = trials;
    Suite suite(report, mutation);
    for (std::size_t t = 0; t < trials; ++t) {
        SplitMix64 rng(seed ^ (0xD1B54A32D192ED03ull * (t + 1)));
        const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_max)));
        const double density = 0.05 + 0.5 * rng.uniform();
        const FiniteRelation f = fo_random(n, density, rng.next());
        suite.run_trial(f, rng);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Embedding

BoxSet Embedding::thick(StateSet set) const {
    BoxSet out(grid);
    for (StateSet rest = set; rest; rest &= rest - 1) {
        const auto i = static_cast<BoxIndex>(std::countr_zero(rest));
        for (BoxIndex k = 0; k < 3; ++k) out.insert(3 * i + k);
    }
    return out;
}

BoxSet Embedding::centers(StateSet set) const {
    BoxSet out(grid);
    for (StateSet rest = set; rest; rest &= rest - 1)
        out.insert(3 * static_cast<BoxIndex>(std::countr_zero(rest)) + 1);
    return out;
}

StateSet Embedding::states(const BoxSet& set) const {
    StateSet out = 0;
    set.for_each([&](BoxIndex b) {
        if (b % 3 == 1) out |= StateSet{1} << (b / 3);
    });
    return out;
}

Embedding embed(const FiniteRelation& rel) {
    const int n = rel.size();
    const ClosedInterval bounds[] = {{0.0, 3.0 * n}};
    const int divisions[] = {3 * n};
    GridPtr grid = build_grid(bounds, divisions);
    std::vector<BoxPair> pairs;
    for (auto [a, b] : rel.edges())
        for (BoxIndex k = 0; k < 3; ++k)
            pairs.emplace_back(3 * static_cast<BoxIndex>(a) + k, 3 * static_cast<BoxIndex>(b) + 1);
    BoxRelation boxes = BoxRelation::from_pairs(grid, pairs);
    return Embedding{std::move(grid), std::move(boxes)};
}

}  // namespace relkit::oracle
