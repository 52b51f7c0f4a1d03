#ifndef RELKIT_GRID_HPP
#define RELKIT_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/dynamic_bitset.hpp>

namespace relkit {

using BoxIndex = std::uint32_t;
using MultiIndex = Eigen::VectorXi;

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ArityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class GridMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct ClosedInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform axis-aligned decomposition of a compact rectangle in R^n.
///
/// Box (i_1..i_n) denotes the closed rectangle prod [lo_k + i_k h_k, lo_k + (i_k+1) h_k].
/// Boxes are numbered with axis 0 varying fastest.
class Grid {
public:
    Grid(Eigen::VectorXd lower, Eigen::VectorXd upper, Eigen::VectorXi divisions);

    int dimension() const { return static_cast<int>(lower_.size()); }
    std::size_t box_count() const { return box_count_; }

    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }
    const Eigen::VectorXd& width() const { return width_; }
    const Eigen::VectorXi& divisions() const { return divisions_; }
    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    MultiIndex unravel(BoxIndex index) const;
    BoxIndex ravel(const MultiIndex& index) const;
    int coordinate(BoxIndex index, int axis) const {
        return static_cast<int>((index / strides_[static_cast<std::size_t>(axis)])
                                % static_cast<std::size_t>(divisions_[axis]));
    }

    /// Grid line `i` on `axis`; line `divisions` is the upper bound itself.
    double edge(int axis, int i) const {
        return i == divisions_[axis] ? upper_[axis] : lower_[axis] + i * width_[axis];
    }
    Eigen::VectorXd box_lower(BoxIndex index) const;
    Eigen::VectorXd box_upper(BoxIndex index) const;

    /// Box whose closed rectangle contains `point` (lowest index on shared faces).
    std::optional<BoxIndex> locate(const Eigen::VectorXd& point) const;

    bool operator==(const Grid& other) const;

private:
    Eigen::VectorXd lower_;
    Eigen::VectorXd upper_;
    Eigen::VectorXd width_;
    Eigen::VectorXi divisions_;
    std::vector<std::size_t> strides_;
    std::size_t box_count_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(std::span<const ClosedInterval> bounds, std::span<const int> divisions);

void require_same_grid(const GridPtr& a, const GridPtr& b);

/// Finite set of grid boxes, denoting the closed union of those boxes.
class BoxSet {
public:
    using Bits = boost::dynamic_bitset<std::uint64_t>;

    explicit BoxSet(GridPtr grid);
    BoxSet(GridPtr grid, Bits bits);

    static BoxSet full(GridPtr grid);
    static BoxSet from_indices(GridPtr grid, std::span<const BoxIndex> indices);

    const GridPtr& grid() const { return grid_; }
    const Bits& bits() const { return bits_; }

    bool contains(BoxIndex index) const { return bits_.test(index); }
    void insert(BoxIndex index) { bits_.set(index); }
    void erase(BoxIndex index) { bits_.reset(index); }

    std::size_t count() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }

    /// Sorted member indices.
    std::vector<BoxIndex> indices() const;

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i))
            fn(static_cast<BoxIndex>(i));
    }

    BoxSet complement() const;
    bool is_subset_of(const BoxSet& other) const;
    std::size_t hash() const;

    BoxSet& operator|=(const BoxSet& other);
    BoxSet& operator&=(const BoxSet& other);
    BoxSet& operator-=(const BoxSet& other);

    friend BoxSet operator|(BoxSet a, const BoxSet& b) { return a |= b; }
    friend BoxSet operator&(BoxSet a, const BoxSet& b) { return a &= b; }
    friend BoxSet operator-(BoxSet a, const BoxSet& b) { return a -= b; }
    friend bool operator==(const BoxSet& a, const BoxSet& b);

private:
    GridPtr grid_;
    Bits bits_;
};

/// Per-axis index range [first, last] of boxes meeting a closed rectangle.
struct IndexRange {
    Eigen::VectorXi first;
    Eigen::VectorXi last;
};

/// Index ranges of boxes whose closed box meets the closed rectangle `rect`;
/// empty when the rectangle misses the domain.
std::optional<IndexRange> cover_range(const Grid& grid, std::span<const ClosedInterval> rect);

/// Visits every box index in an index range, axis 0 fastest.
template <class Fn>
void for_each_in_range(const Grid& grid, const IndexRange& range, Fn&& fn) {
    const int n = grid.dimension();
    MultiIndex cur = range.first;
    for (;;) {
        fn(grid.ravel(cur));
        int k = 0;
        while (k < n) {
            if (cur[k] < range.last[k]) {
                ++cur[k];
                break;
            }
            cur[k] = range.first[k];
            ++k;
        }
        if (k == n) return;
    }
}

/// Index range of boxes within per-axis index radius of `center`, clipped to the grid.
IndexRange ball_range(const Grid& grid, BoxIndex center, const Eigen::VectorXi& radius);

BoxSet cover(const GridPtr& grid, std::span<const ClosedInterval> rect);
BoxSet cover_union(const GridPtr& grid, std::span<const std::vector<ClosedInterval>> rects);

/// Boxes within per-axis index radius of S (radius 1 is the Moore ring).
BoxSet dilate(const BoxSet& set, const Eigen::VectorXi& radius);
BoxSet dilate(const BoxSet& set, int radius = 1);

/// Boxes of S whose whole Moore neighbourhood (inside the grid) lies in S.
BoxSet combinatorial_interior(const BoxSet& set);

/// complement(combinatorial_interior(S)); contains the closure of X minus S.
BoxSet closure_of_complement(const BoxSet& set);

/// Sup-metric distance between two closed boxes, from index gaps.
double box_distance(const Grid& grid, BoxIndex a, BoxIndex b);

/// Distance from every box of the grid to the closed set denoted by T
/// (+inf everywhere when T is empty).
Eigen::ArrayXd distance_field(const BoxSet& target);

/// Minimum sup-metric distance between the denoted closed sets; +inf if either is empty.
double set_distance(const BoxSet& s, const BoxSet& t);

struct BoxSetSummary {
    std::size_t count = 0;
    Eigen::VectorXd lower;  // empty vectors when count == 0
    Eigen::VectorXd upper;
};

BoxSetSummary summarize(const BoxSet& set);

/// Largest sup-metric distance between points of the denoted set (0 for empty).
double diameter(const BoxSet& set);

}  // namespace relkit

#endif  // RELKIT_GRID_HPP
