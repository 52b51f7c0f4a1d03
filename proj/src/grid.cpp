#include "relkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace relkit {

namespace {

// Fraction of a box width by which cover() reaches outward, so that boxes
// touching the rectangle on a shared face survive floating-point rounding.
constexpr double kCoverSlack = 1e-9;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Grid::Grid(Eigen::VectorXd lower, Eigen::VectorXd upper, Eigen::VectorXi divisions)
    : lower_(std::move(lower)), upper_(std::move(upper)), divisions_(std::move(divisions)) {
    if (lower_.size() != upper_.size() || lower_.size() != divisions_.size())
        throw ArityError("grid bounds and divisions differ in length");
    if (lower_.size() == 0) throw ArityError("grid needs at least one axis");
    const auto n = lower_.size();
    width_.resize(n);
    strides_.resize(static_cast<std::size_t>(n));
    std::size_t count = 1;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(std::isfinite(lower_[k]) && std::isfinite(upper_[k])) || !(lower_[k] < upper_[k]))
            throw DomainError("degenerate interval on axis " + std::to_string(k));
        if (divisions_[k] < 1)
            throw DomainError("axis " + std::to_string(k) + " needs at least one division");
        width_[k] = (upper_[k] - lower_[k]) / divisions_[k];
        if (!(width_[k] > 0.0)) throw DomainError("box width underflows on axis " + std::to_string(k));
        strides_[static_cast<std::size_t>(k)] = count;
        count *= static_cast<std::size_t>(divisions_[k]);
        if (count > std::numeric_limits<BoxIndex>::max())
            throw DomainError("grid has too many boxes");
    }
    box_count_ = count;
}

MultiIndex Grid::unravel(BoxIndex index) const {
    MultiIndex out(dimension());
    for (int k = 0; k < dimension(); ++k) out[k] = coordinate(index, k);
    return out;
}

BoxIndex Grid::ravel(const MultiIndex& index) const {
    std::size_t out = 0;
    for (int k = 0; k < dimension(); ++k)
        out += static_cast<std::size_t>(index[k]) * strides_[static_cast<std::size_t>(k)];
    return static_cast<BoxIndex>(out);
}

Eigen::VectorXd Grid::box_lower(BoxIndex index) const {
    Eigen::VectorXd out(dimension());
    for (int k = 0; k < dimension(); ++k) out[k] = edge(k, coordinate(index, k));
    return out;
}

Eigen::VectorXd Grid::box_upper(BoxIndex index) const {
    Eigen::VectorXd out(dimension());
    for (int k = 0; k < dimension(); ++k) out[k] = edge(k, coordinate(index, k) + 1);
    return out;
}

std::optional<BoxIndex> Grid::locate(const Eigen::VectorXd& point) const {
    MultiIndex idx(dimension());
    for (int k = 0; k < dimension(); ++k) {
        if (!(point[k] >= lower_[k] && point[k] <= upper_[k])) return std::nullopt;
        int i = static_cast<int>(std::floor((point[k] - lower_[k]) / width_[k]));
        i = std::clamp(i, 0, divisions_[k] - 1);
        // floor() of a rounded quotient may land one box off; settle on the closed box.
        if (point[k] < edge(k, i) && i > 0) --i;
        if (point[k] > edge(k, i + 1) && i + 1 < divisions_[k]) ++i;
        idx[k] = i;
    }
    return ravel(idx);
}

bool Grid::operator==(const Grid& other) const {
    return lower_ == other.lower_ && upper_ == other.upper_ && divisions_ == other.divisions_;
}

GridPtr build_grid(std::span<const ClosedInterval> bounds, std::span<const int> divisions) {
    if (bounds.size() != divisions.size())
        throw ArityError("got " + std::to_string(bounds.size()) + " intervals but " +
                         std::to_string(divisions.size()) + " division counts");
    const auto n = static_cast<Eigen::Index>(bounds.size());
    Eigen::VectorXd lo(n), hi(n);
    Eigen::VectorXi div(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        lo[k] = bounds[static_cast<std::size_t>(k)].lo;
        hi[k] = bounds[static_cast<std::size_t>(k)].hi;
        div[k] = divisions[static_cast<std::size_t>(k)];
    }
    return std::make_shared<const Grid>(std::move(lo), std::move(hi), std::move(div));
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
    if (a == b) return;
    if (!a || !b || !(*a == *b)) throw GridMismatch("operands live on different grids");
}

// ---------------------------------------------------------------------------
// BoxSet

BoxSet::BoxSet(GridPtr grid) : grid_(std::move(grid)), bits_(grid_->box_count()) {}

BoxSet::BoxSet(GridPtr grid, Bits bits) : grid_(std::move(grid)), bits_(std::move(bits)) {
    if (bits_.size() != grid_->box_count()) throw ArityError("bitset size does not match grid");
}

BoxSet BoxSet::full(GridPtr grid) {
    BoxSet out(std::move(grid));
    out.bits_.set();
    return out;
}

BoxSet BoxSet::from_indices(GridPtr grid, std::span<const BoxIndex> indices) {
    BoxSet out(std::move(grid));
    for (BoxIndex i : indices) {
        if (i >= out.grid_->box_count())
            throw DomainError("box index " + std::to_string(i) + " is outside the grid");
        out.bits_.set(i);
    }
    return out;
}

std::vector<BoxIndex> BoxSet::indices() const {
    std::vector<BoxIndex> out;
    out.reserve(count());
    for_each([&](BoxIndex i) { out.push_back(i); });
    return out;
}

BoxSet BoxSet::complement() const { return BoxSet(grid_, ~bits_); }

bool BoxSet::is_subset_of(const BoxSet& other) const {
    require_same_grid(grid_, other.grid_);
    return bits_.is_subset_of(other.bits_);
}

std::size_t BoxSet::hash() const {
    // FNV-1a over the 64-bit blocks; stable across runs and platforms.
    std::uint64_t h = 1469598103934665603ull;
    std::vector<std::uint64_t> blocks(bits_.num_blocks());
    boost::to_block_range(bits_, blocks.begin());
    for (std::uint64_t b : blocks) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

BoxSet& BoxSet::operator|=(const BoxSet& other) {
    require_same_grid(grid_, other.grid_);
    bits_ |= other.bits_;
    return *this;
}

BoxSet& BoxSet::operator&=(const BoxSet& other) {
    require_same_grid(grid_, other.grid_);
    bits_ &= other.bits_;
    return *this;
}

BoxSet& BoxSet::operator-=(const BoxSet& other) {
    require_same_grid(grid_, other.grid_);
    bits_ -= other.bits_;
    return *this;
}

bool operator==(const BoxSet& a, const BoxSet& b) {
    require_same_grid(a.grid_, b.grid_);
    return a.bits_ == b.bits_;
}

// ---------------------------------------------------------------------------
// Covering and neighbourhoods

std::optional<IndexRange> cover_range(const Grid& grid, std::span<const ClosedInterval> rect) {
    const int n = grid.dimension();
    if (static_cast<int>(rect.size()) != n)
        throw ArityError("rectangle has " + std::to_string(rect.size()) + " axes, grid has " +
                         std::to_string(n));
    IndexRange range{MultiIndex(n), MultiIndex(n)};
    for (int k = 0; k < n; ++k) {
        const auto& iv = rect[static_cast<std::size_t>(k)];
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) return std::nullopt;
        const double a = (iv.lo - grid.lower()[k]) / grid.width()[k];
        const double b = (iv.hi - grid.lower()[k]) / grid.width()[k];
        const double div = grid.divisions()[k];
        // box i meets [lo, hi] iff i + 1 >= a and i <= b
        const double first = std::ceil(a - 1.0 - kCoverSlack);
        const double last = std::floor(b + kCoverSlack);
        if (first > div - 1 || last < 0) return std::nullopt;
        range.first[k] = static_cast<int>(std::max(first, 0.0));
        range.last[k] = static_cast<int>(std::min(last, div - 1));
    }
    return range;
}

IndexRange ball_range(const Grid& grid, BoxIndex center, const Eigen::VectorXi& radius) {
    const int n = grid.dimension();
    IndexRange range{MultiIndex(n), MultiIndex(n)};
    for (int k = 0; k < n; ++k) {
        const int c = grid.coordinate(center, k);
        range.first[k] = std::max(0, c - radius[k]);
        range.last[k] = std::min(grid.divisions()[k] - 1, c + radius[k]);
    }
    return range;
}

BoxSet cover(const GridPtr& grid, std::span<const ClosedInterval> rect) {
    BoxSet out(grid);
    if (auto range = cover_range(*grid, rect))
        for_each_in_range(*grid, *range, [&](BoxIndex i) { out.insert(i); });
    return out;
}

BoxSet cover_union(const GridPtr& grid, std::span<const std::vector<ClosedInterval>> rects) {
    BoxSet out(grid);
    for (const auto& r : rects) out |= cover(grid, r);
    return out;
}

namespace {

// Visits each grid line along `axis`, passing the index of its first box.
template <class Fn>
void for_each_line(const Grid& grid, int axis, Fn&& fn) {
    const std::size_t stride = grid.stride(axis);
    const std::size_t span = stride * static_cast<std::size_t>(grid.divisions()[axis]);
    for (std::size_t outer = 0; outer < grid.box_count(); outer += span)
        for (std::size_t inner = 0; inner < stride; ++inner) fn(outer + inner);
}

}  // namespace

BoxSet dilate(const BoxSet& set, const Eigen::VectorXi& radius) {
    const Grid& grid = *set.grid();
    std::vector<std::uint8_t> cur(grid.box_count(), 0);
    set.for_each([&](BoxIndex i) { cur[i] = 1; });
    std::vector<std::uint8_t> next(grid.box_count(), 0);
    std::vector<int> prefix;
    for (int k = 0; k < grid.dimension(); ++k) {
        const int r = radius[k];
        if (r <= 0) continue;
        const int len = grid.divisions()[k];
        const std::size_t stride = grid.stride(k);
        prefix.assign(static_cast<std::size_t>(len) + 1, 0);
        for_each_line(grid, k, [&](std::size_t base) {
            for (int i = 0; i < len; ++i)
                prefix[static_cast<std::size_t>(i) + 1] =
                    prefix[static_cast<std::size_t>(i)] + cur[base + static_cast<std::size_t>(i) * stride];
            for (int i = 0; i < len; ++i) {
                const int lo = std::max(0, i - r);
                const int hi = std::min(len - 1, i + r);
                next[base + static_cast<std::size_t>(i) * stride] =
                    prefix[static_cast<std::size_t>(hi) + 1] > prefix[static_cast<std::size_t>(lo)];
            }
        });
        std::swap(cur, next);
    }
    BoxSet out(set.grid());
    for (std::size_t i = 0; i < cur.size(); ++i)
        if (cur[i]) out.insert(static_cast<BoxIndex>(i));
    return out;
}

BoxSet dilate(const BoxSet& set, int radius) {
    return dilate(set, Eigen::VectorXi::Constant(set.grid()->dimension(), radius));
}

BoxSet combinatorial_interior(const BoxSet& set) {
    // b survives iff no box of its Moore neighbourhood lies outside S
    return dilate(set.complement(), 1).complement();
}

BoxSet closure_of_complement(const BoxSet& set) { return combinatorial_interior(set).complement(); }

// ---------------------------------------------------------------------------
// Metric

double box_distance(const Grid& grid, BoxIndex a, BoxIndex b) {
    double d = 0.0;
    for (int k = 0; k < grid.dimension(); ++k) {
        const int gap = std::abs(grid.coordinate(a, k) - grid.coordinate(b, k)) - 1;
        if (gap > 0) d = std::max(d, gap * grid.width()[k]);
    }
    return d;
}

Eigen::ArrayXd distance_field(const BoxSet& target) {
    const Grid& grid = *target.grid();
    const auto count = static_cast<Eigen::Index>(grid.box_count());
    Eigen::ArrayXd cur = Eigen::ArrayXd::Constant(count, kInf);
    target.for_each([&](BoxIndex i) { cur[i] = 0.0; });
    if (target.empty()) return cur;

    // min over T of max_k gap_k separates into one min-max pass per axis
    Eigen::ArrayXd next(count);
    std::vector<double> line;
    for (int k = 0; k < grid.dimension(); ++k) {
        const int len = grid.divisions()[k];
        const std::size_t stride = grid.stride(k);
        const double w = grid.width()[k];
        line.resize(static_cast<std::size_t>(len));
        for_each_line(grid, k, [&](std::size_t base) {
            for (int j = 0; j < len; ++j)
                line[static_cast<std::size_t>(j)] =
                    cur[static_cast<Eigen::Index>(base + static_cast<std::size_t>(j) * stride)];
            for (int i = 0; i < len; ++i) {
                double best = kInf;
                for (int j = 0; j < len; ++j) {
                    const double v = line[static_cast<std::size_t>(j)];
                    if (v >= best) continue;
                    const int gap = std::abs(i - j) - 1;
                    best = std::min(best, std::max(v, gap > 0 ? gap * w : 0.0));
                }
                next[static_cast<Eigen::Index>(base + static_cast<std::size_t>(i) * stride)] = best;
            }
        });
        cur.swap(next);
    }
    return cur;
}

double set_distance(const BoxSet& s, const BoxSet& t) {
    require_same_grid(s.grid(), t.grid());
    if (s.empty() || t.empty()) return kInf;
    // walk the smaller set against the field of the other
    const bool swap = s.count() > t.count();
    const BoxSet& walk = swap ? t : s;
    const Eigen::ArrayXd field = distance_field(swap ? s : t);
    double best = kInf;
    walk.for_each([&](BoxIndex i) { best = std::min(best, field[i]); });
    return best;
}

BoxSetSummary summarize(const BoxSet& set) {
    BoxSetSummary out;
    out.count = set.count();
    if (out.count == 0) return out;
    const Grid& grid = *set.grid();
    const int n = grid.dimension();
    Eigen::VectorXi lo = Eigen::VectorXi::Constant(n, std::numeric_limits<int>::max());
    Eigen::VectorXi hi = Eigen::VectorXi::Constant(n, -1);
    set.for_each([&](BoxIndex i) {
        for (int k = 0; k < n; ++k) {
            const int c = grid.coordinate(i, k);
            lo[k] = std::min(lo[k], c);
            hi[k] = std::max(hi[k], c);
        }
    });
    out.lower.resize(n);
    out.upper.resize(n);
    for (int k = 0; k < n; ++k) {
        out.lower[k] = grid.edge(k, lo[k]);
        out.upper[k] = grid.edge(k, hi[k] + 1);
    }
    return out;
}

double diameter(const BoxSet& set) {
    const auto s = summarize(set);
    if (s.count == 0) return 0.0;
    return (s.upper - s.lower).maxCoeff();
}

}  // namespace relkit
