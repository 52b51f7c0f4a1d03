#ifndef RELKIT_ATTRACTOR_HPP
#define RELKIT_ATTRACTOR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "relkit/grid.hpp"
#include "relkit/relation.hpp"

namespace relkit {

/// Outcome of the disjointness test rel ∩ (B × cl(X \ B)) = ∅ on the grid.
///
/// A positive verdict certifies the denoted block; a negative one only says the
/// block is not certified at this resolution.
struct BlockVerdict {
    bool is_block = false;
    std::vector<BoxPair> witnesses;  // pairs in B x closure_of_complement(B)
};

struct OmegaResult {
    BoxSet limit;
    std::size_t transient = 0;  // iterations before the orbit of sets became periodic
    std::size_t period = 1;
    bool stabilized = false;
};

struct OmegaOptions {
    /// Iteration cap for the non-monotone path; 0 means 10 * box_count.
    std::size_t cap = 0;
};

class IterationCapError : public std::runtime_error {
public:
    explicit IterationCapError(std::size_t cap)
        : std::runtime_error("omega-limit iteration did not stabilize within " + std::to_string(cap) +
                             " steps"),
          cap_(cap) {}
    std::size_t cap() const { return cap_; }

private:
    std::size_t cap_;
};

/// Hypothesis of a theorem-backed operation does not hold; carries the witnesses.
class PreconditionError : public std::logic_error {
public:
    PreconditionError(const std::string& what, std::vector<BoxPair> witnesses)
        : std::logic_error(what), witnesses_(std::move(witnesses)) {}
    const std::vector<BoxPair>& witnesses() const { return witnesses_; }

private:
    std::vector<BoxPair> witnesses_;
};

BlockVerdict is_attractor_block(const BoxRelation& rel, const BoxSet& block);

/// Combinatorial omega-limit set: the union of the periodic part of the
/// sequence S, f(S), f^2(S), ... (the eventual value of the tail unions).
OmegaResult omega_limit(const BoxRelation& rel, const BoxSet& set, OmegaOptions options = {});

/// Enclosure of the attractor associated to a certified block.
/// Throws PreconditionError when the block is not certified.
BoxSet attractor_from_block(const BoxRelation& rel, const BoxSet& block);

struct BlockSearch {
    std::optional<BoxSet> block;
    /// Last grown set; on failure its boxes outside N form the escape frontier.
    BoxSet frontier;
    std::size_t steps = 0;
};

/// Grows omega(N) by the Moore ring of its image until it maps into its own
/// combinatorial interior; fails once the growth leaves N.
BlockSearch find_attractor_block(const BoxRelation& rel, const BoxSet& neighborhood);

/// Box-level invariance image(rel, S) == S.
bool is_invariant(const BoxRelation& rel, const BoxSet& set);

}  // namespace relkit

#endif  // RELKIT_ATTRACTOR_HPP
