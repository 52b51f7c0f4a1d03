#ifndef RELKIT_FINITE_ORACLE_HPP
#define RELKIT_FINITE_ORACLE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relkit/grid.hpp"
#include "relkit/relation.hpp"

namespace relkit::oracle {

/// Subset of a finite state space, bit i = state i.
using StateSet = std::uint64_t;

constexpr int kMaxStates = 64;
/// Largest space for the exhaustive neighbourhood search in is_attractor.
constexpr int kMaxExhaustiveStates = 14;

class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9, z = (z ^ (z >> 27)) * 0x94D049BB133111EB,
/// return z ^ (z >> 31). Portable, so seeds reproduce across implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// Directed graph on n states; a closed relation on a finite discrete space.
class FiniteRelation {
public:
    explicit FiniteRelation(int states);
    FiniteRelation(int states, const std::vector<std::pair<int, int>>& edges);

    int size() const { return n_; }
    StateSet all() const { return n_ == 64 ? ~StateSet{0} : (StateSet{1} << n_) - 1; }

    void add_edge(int from, int to);
    bool has_edge(int from, int to) const { return (succ_[static_cast<std::size_t>(from)] >> to) & 1u; }
    StateSet successors(int state) const { return succ_[static_cast<std::size_t>(state)]; }
    std::vector<std::pair<int, int>> edges() const;
    std::size_t edge_count() const;

    friend bool operator==(const FiniteRelation&, const FiniteRelation&) = default;

private:
    int n_;
    std::vector<StateSet> succ_;
};

StateSet fo_image(const FiniteRelation& rel, StateSet set);

/// Exact omega-limit set: union of the periodic part of set, f(set), f^2(set), ...
StateSet fo_omega(const FiniteRelation& rel, StateSet set);

/// The two block characterizations, evaluated separately. In the discrete
/// topology closure and interior are the identity.
struct BlockForms {
    bool image_form = false;         // f(cl B) ⊆ int B
    bool disjointness_form = false;  // f ∩ (cl B × cl(X \ B)) = ∅
};

BlockForms fo_block_forms(const FiniteRelation& rel, StateSet block);

/// Throws std::logic_error if the two characterizations disagree.
bool fo_is_attractor_block(const FiniteRelation& rel, StateSet block);

/// f(A) = A and some neighbourhood U ⊇ A has omega(U) = A (exhaustive search).
bool fo_is_attractor(const FiniteRelation& rel, StateSet set);

/// Each of the n^2 edges, in row-major order, is kept when uniform() < density.
FiniteRelation fo_random(int states, double density, std::uint64_t seed);

enum class Mutation {
    None,
    /// Replaces omega by the union of all forward images, dropping the
    /// restriction to the invariant (recurrent) part.
    DropInvariance,
};

struct CheckTally {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

struct SuiteReport {
    std::size_t trials = 0;
    CheckTally block_forms_agree;       // T1
    CheckTally block_yields_attractor;  // T2
    CheckTally attractor_has_block;     // T3
    CheckTally perturbation_persists;   // T4
    std::string first_counterexample;

    std::size_t failures() const {
        return block_forms_agree.failed + block_yields_attractor.failed + attractor_has_block.failed +
               perturbation_persists.failed;
    }
    std::size_t checks() const {
        return failures() + block_forms_agree.passed + block_yields_attractor.passed +
               attractor_has_block.passed + perturbation_persists.passed;
    }
};

SuiteReport fo_theorem_suite(int n_max, std::size_t trials, std::uint64_t seed, Mutation mutation = Mutation::None);

/// Finite relation realized as a box relation on the 1-D grid [0, 3n] with 3n
/// boxes: state i owns boxes 3i..3i+2, edges land on the centre box 3j+1.
struct Embedding {
    GridPtr grid;
    BoxRelation relation;

    /// All three boxes of every state in the set.
    BoxSet thick(StateSet set) const;
    /// Centre boxes only.
    BoxSet centers(StateSet set) const;
    /// States whose centre box is in the set.
    StateSet states(const BoxSet& set) const;
};

Embedding embed(const FiniteRelation& rel);

std::string describe(StateSet set, int states);

}  // namespace relkit::oracle

#endif  // RELKIT_FINITE_ORACLE_HPP
