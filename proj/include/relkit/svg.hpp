#ifndef RELKIT_SVG_HPP
#define RELKIT_SVG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "relkit/grid.hpp"
#include "relkit/relation.hpp"

namespace relkit {

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic SVG phase plot. On a 1-D grid the canvas is the (x, y)
/// plane X x X: relations draw as box products, sets as vertical bands.
/// On a 2-D grid the canvas is X itself and only sets can be drawn.
class PhasePlot {
public:
    explicit PhasePlot(GridPtr grid, std::string title = {});

    PhasePlot& add_set(std::string name, const BoxSet& set);
    PhasePlot& add_relation(std::string name, const BoxRelation& rel);
    /// Product set A x C (1-D only), e.g. B x closure_of_complement(B).
    PhasePlot& add_product(std::string name, const BoxSet& first, const BoxSet& second);
    /// The line y = x (1-D only).
    PhasePlot& add_diagonal();

    std::string str() const;

private:
    struct Rect {
        double x0, x1, y0, y1;
    };
    struct Layer {
        std::string name;
        std::string fill;
        double opacity;
        std::vector<Rect> rects;
    };

    const std::string& next_color();
    void require_plane(const char* what) const;

    GridPtr grid_;
    std::string title_;
    std::vector<Layer> layers_;
    bool diagonal_ = false;
    std::size_t color_ = 0;
};

}  // namespace relkit

#endif  // RELKIT_SVG_HPP
