#include "relkit/svg.hpp"

#include <fmt/format.h>

namespace relkit {

namespace {

constexpr double kLeft = 60, kTop = 40, kSize = 480, kLegend = 200, kBottom = 50;

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors;
}

// Maximal runs [first, last] of consecutive indices in a sorted list.
std::vector<std::pair<int, int>> runs(const std::vector<int>& sorted) {
    std::vector<std::pair<int, int>> out;
    for (int v : sorted) {
        if (!out.empty() && out.back().second + 1 == v) out.back().second = v;
        else out.emplace_back(v, v);
    }
    return out;
}

std::vector<int> coords(const BoxSet& set) {
    std::vector<int> out;
    set.for_each([&](BoxIndex b) { out.push_back(static_cast<int>(b)); });
    return out;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

PhasePlot::PhasePlot(GridPtr grid, std::string title) : grid_(std::move(grid)), title_(std::move(title)) {
    if (grid_->dimension() > 2)
        throw RenderError(fmt::format("cannot render a {}-D grid; export box sets as CSV instead", grid_->dimension()));
}

const std::string& PhasePlot::next_color() { return palette()[color_++ % palette().size()]; }

void PhasePlot::require_plane(const char* what) const {
    if (grid_->dimension() != 1) throw RenderError(fmt::format("{} can only be drawn for a 1-D grid", what));
}

PhasePlot& PhasePlot::add_set(std::string name, const BoxSet& set) {
    require_same_grid(grid_, set.grid());
    Layer layer{std::move(name), next_color(), 0.25, {}};
    const Grid& g = *grid_;
    if (g.dimension() == 1) {
        for (auto [a, b] : runs(coords(set)))
            layer.rects.push_back({g.edge(0, a), g.edge(0, b + 1), g.lower()[0], g.upper()[0]});
    } else {
        // one rectangle per run along axis 0 within each row
        const int nx = g.divisions()[0];
        for (int row = 0; row < g.divisions()[1]; ++row) {
            std::vector<int> cols;
            for (int i = 0; i < nx; ++i)
                if (set.contains(static_cast<BoxIndex>(row * nx + i))) cols.push_back(i);
            for (auto [a, b] : runs(cols))
                layer.rects.push_back({g.edge(0, a), g.edge(0, b + 1), g.edge(1, row), g.edge(1, row + 1)});
        }
        layer.opacity = 0.6;
    }
    layers_.push_back(std::move(layer));
    return *this;
}

PhasePlot& PhasePlot::add_relation(std::string name, const BoxRelation& rel) {
    require_plane("a relation");
    require_same_grid(grid_, rel.grid());
    Layer layer{std::move(name), next_color(), 0.55, {}};
    const Grid& g = *grid_;
    for (std::size_t s = 0; s < g.box_count(); ++s) {
        std::vector<int> t(rel.targets(static_cast<BoxIndex>(s)).begin(), rel.targets(static_cast<BoxIndex>(s)).end());
        for (auto [a, b] : runs(t))
            layer.rects.push_back({g.edge(0, static_cast<int>(s)), g.edge(0, static_cast<int>(s) + 1), g.edge(0, a),
                                   g.edge(0, b + 1)});
    }
    layers_.push_back(std::move(layer));
    return *this;
}

PhasePlot& PhasePlot::add_product(std::string name, const BoxSet& first, const BoxSet& second) {
    require_plane("a product set");
    require_same_grid(grid_, first.grid());
    require_same_grid(grid_, second.grid());
    Layer layer{std::move(name), next_color(), 0.3, {}};
    const Grid& g = *grid_;
    const auto rows = runs(coords(second));
    for (auto [a, b] : runs(coords(first)))
        for (auto [c, d] : rows) layer.rects.push_back({g.edge(0, a), g.edge(0, b + 1), g.edge(0, c), g.edge(0, d + 1)});
    layers_.push_back(std::move(layer));
    return *this;
}

PhasePlot& PhasePlot::add_diagonal() {
    require_plane("the diagonal");
    diagonal_ = true;
    return *this;
}

std::string PhasePlot::str() const {
    const Grid& g = *grid_;
    const bool plane = g.dimension() == 1;
    const double x_lo = g.lower()[0], x_hi = g.upper()[0];
    const double y_lo = plane ? x_lo : g.lower()[1], y_hi = plane ? x_hi : g.upper()[1];
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * kSize; };
    auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * kSize; };

    const double width = kLeft + kSize + kLegend, height = kTop + kSize + kBottom;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} "
        "{1:.0f}\">\n",
        width, height);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", width, height);
    if (!title_.empty())
        out += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", kLeft,
                           escape(title_));

    for (const auto& layer : layers_) {
        out += fmt::format("<g id=\"{}\" fill=\"{}\" fill-opacity=\"{:.2f}\" stroke=\"none\">\n", escape(layer.name),
                           layer.fill, layer.opacity);
        for (const auto& r : layer.rects)
            out += fmt::format("<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\"/>\n", px(r.x0),
                               py(r.y1), px(r.x1) - px(r.x0), py(r.y0) - py(r.y1));
        out += "</g>\n";
    }
    if (diagonal_)
        out += fmt::format(
            "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"#444444\" stroke-dasharray=\"4 3\"/>\n",
            px(x_lo), py(x_lo), px(x_hi), py(x_hi));

    // domain outline and axis labels
    out += fmt::format(
        "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"none\" stroke=\"#000000\"/>\n",
        kLeft, kTop, kSize, kSize);
    const auto label = [&](double x, double y, const std::string& anchor, double v) {
        return fmt::format(
            "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{}\">{}</text>\n",
            x, y, anchor, fmt::format("{:g}", v));
    };
    out += label(px(x_lo), kTop + kSize + 16, "middle", x_lo);
    out += label(px(x_hi), kTop + kSize + 16, "middle", x_hi);
    out += label(kLeft - 6, py(y_lo) + 4, "end", y_lo);
    out += label(kLeft - 6, py(y_hi) + 4, "end", y_hi);
    out += fmt::format(
        "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        kLeft + kSize / 2, kTop + kSize + 36, plane ? "x" : "x1");
    out += fmt::format(
        "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        kLeft - 36, kTop + kSize / 2, plane ? "y" : "x2");

    double ly = kTop + 10;
    for (const auto& layer : layers_) {
        out += fmt::format(
            "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"14\" height=\"14\" fill=\"{}\" fill-opacity=\"{:.2f}\" "
            "stroke=\"#000000\"/>\n",
            kLeft + kSize + 20, ly, layer.fill, std::max(layer.opacity, 0.4));
        out += fmt::format(
            "<text x=\"{:.3f}\" y=\"{:.3f}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            kLeft + kSize + 40, ly + 11, escape(layer.name));
        ly += 22;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace relkit
