#pragma once

// Piecewise-linear radial profiles and their exact energies.
//
// A profile is linear in the grid coordinate on each cell, so its energy is
// sum_i |slope_i|^p * W_i, where W_i is the integral of the radial weight
// over the cell: r^{n-1} in the Radius coordinate, 1 in the LogRadius
// coordinate (the conformal substitution s = log r).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qsm/error.hpp"

namespace qsm {

enum class Coordinate { Radius, LogRadius };

/// Strictly increasing nodes in one radial coordinate. Copies share the node
/// storage, which is immutable.
class RadialGrid {
public:
    static RadialGrid make(std::vector<double> nodes, int n, Coordinate coordinate) {
        detail::require(nodes.size() >= 3, "radial grid needs at least 3 nodes");
        detail::require(n >= 1, "radial grid dimension must be >= 1");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            detail::require(std::isfinite(nodes[i]), "radial grid nodes must be finite");
            if (i > 0) detail::require(nodes[i] > nodes[i - 1], "radial grid nodes must increase strictly");
        }
        if (coordinate == Coordinate::Radius) detail::require(nodes.front() >= 0.0, "radii must be >= 0");
        RadialGrid g;
        g.nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
        g.n_ = n;
        g.coordinate_ = coordinate;
        return g;
    }

    static RadialGrid uniform(double lo, double hi, std::size_t cells, int n, Coordinate coordinate) {
        detail::require(cells >= 2, "uniform grid needs at least 2 cells");
        detail::require(hi > lo, "uniform grid needs lo < hi");
        std::vector<double> x(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        x.back() = hi;
        return make(std::move(x), n, coordinate);
    }

    /// Uniform in the bulk with a layer of `graded_cells` cells toward `hi` (or
    /// `lo` when `toward_hi` is false), the cell nearest the boundary having
    /// width `smallest`. With decay = 0 the layer is geometric; otherwise the
    /// number of cells per e-fold of distance falls like exp(-decay t), t
    /// counted in e-folds below the top of the layer. Extra nodes (e.g. a kink)
    /// are merged in.
    static RadialGrid graded(double lo, double hi, std::size_t cells, std::size_t graded_cells, double smallest,
                             bool toward_hi, int n, Coordinate coordinate, std::span<const double> extra_nodes = {},
                             double decay = 0.0) {
        detail::require(hi > lo && cells >= 4 && graded_cells < cells && smallest > 0.0, "invalid graded grid");
        const double length = hi - lo;
        const std::size_t bulk_cells = cells - graded_cells;
        // The geometric layer covers [0, layer] measured from the graded end.
        const double layer = length * static_cast<double>(graded_cells) / static_cast<double>(cells) / 8.0;
        std::vector<double> dist;  // distances from the graded end
        dist.reserve(cells + 1 + extra_nodes.size());
        dist.push_back(0.0);
        if (graded_cells > 0) {
            detail::require(smallest < layer, "graded grid: smallest cell exceeds the layer");
            detail::require(decay >= 0.0, "graded grid: decay must be >= 0");
            const double depth = std::log(layer / smallest);
            const double mass = decay > 0.0 ? -std::expm1(-decay * depth) : 0.0;
            for (std::size_t j = 0; j + 1 < graded_cells; ++j) {
                const double above = 1.0 - static_cast<double>(j) / static_cast<double>(graded_cells - 1);
                const double t = decay > 0.0 ? -std::log1p(-above * mass) / decay : above * depth;
                dist.push_back(j == 0 ? smallest : layer * std::exp(-t));
            }
            dist.push_back(layer);
        }
        const double start = graded_cells > 0 ? layer : 0.0;
        for (std::size_t j = 1; j <= bulk_cells; ++j)
            dist.push_back(start + (length - start) * static_cast<double>(j) / static_cast<double>(bulk_cells));
        dist.back() = length;

        std::vector<double> x;
        x.reserve(dist.size() + extra_nodes.size());
        for (double d : dist) x.push_back(toward_hi ? hi - d : lo + d);
        if (toward_hi) {
            std::reverse(x.begin(), x.end());
            x.front() = lo;
            x.back() = hi;
        }
        for (double e : extra_nodes)
            if (e > lo && e < hi) x.push_back(e);
        std::sort(x.begin(), x.end());
        x.erase(std::unique(x.begin(), x.end()), x.end());
        return make(std::move(x), n, coordinate);
    }

    std::span<const double> nodes() const { return *nodes_; }
    double node(std::size_t i) const { return (*nodes_)[i]; }
    std::size_t node_count() const { return nodes_->size(); }
    std::size_t cell_count() const { return nodes_->size() - 1; }
    int dimension() const { return n_; }
    Coordinate coordinate() const { return coordinate_; }
    double lo() const { return nodes_->front(); }
    double hi() const { return nodes_->back(); }
    double width(std::size_t cell) const { return node(cell + 1) - node(cell); }

    double max_width() const {
        double h = 0.0;
        for (std::size_t i = 0; i < cell_count(); ++i) h = std::max(h, width(i));
        return h;
    }

    /// Integral of the radial weight over a cell.
    double cell_weight(std::size_t cell) const {
        if (coordinate_ == Coordinate::LogRadius) return width(cell);
        const double a = node(cell), b = node(cell + 1);
        return (std::pow(b, n_) - std::pow(a, n_)) / n_;
    }

    /// Log-radius of a node.
    double log_radius(std::size_t i) const { return coordinate_ == Coordinate::LogRadius ? node(i) : std::log(node(i)); }

    bool same_as(const RadialGrid& other) const {
        return n_ == other.n_ && coordinate_ == other.coordinate_ &&
               (nodes_ == other.nodes_ || *nodes_ == *other.nodes_);
    }

private:
    RadialGrid() = default;
    std::shared_ptr<const std::vector<double>> nodes_;
    int n_ = 2;
    Coordinate coordinate_ = Coordinate::LogRadius;
};

/// Nodal values of a continuous piecewise-linear profile; the represented
/// function is offset + values[i] at node i.
struct PiecewiseLinearProfile {
    RadialGrid grid;
    std::vector<double> values;
    double offset = 0.0;

    static PiecewiseLinearProfile make(RadialGrid grid, std::vector<double> values, double offset = 0.0) {
        detail::require(values.size() == grid.node_count(), "profile needs one value per node");
        for (double v : values) detail::require(std::isfinite(v), "profile values must be finite");
        return {std::move(grid), std::move(values), offset};
    }

    double value(std::size_t i) const { return offset + values[i]; }
    double slope(std::size_t cell) const { return (values[cell + 1] - values[cell]) / grid.width(cell); }
};

namespace detail {

// |x|^p with a multiplication path for small integer exponents.
inline double pow_abs(double x, double p) {
    const double a = std::abs(x);
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    if (p == 4.0) {
        const double s = a * a;
        return s * s;
    }
    return std::pow(a, p);
}

inline double cell_energy(double slope, double weight, double p) {
    return slope == 0.0 ? 0.0 : pow_abs(slope, p) * weight;
}

} // namespace detail

/// Exponent used when none is given: the conformal one for radial grids.
inline double default_exponent(const RadialGrid& grid) { return static_cast<double>(grid.dimension()); }

/// Energy of one cell.
inline double cell_energy(const PiecewiseLinearProfile& u, std::size_t cell, double p) {
    return detail::cell_energy(u.slope(cell), u.grid.cell_weight(cell), p);
}

/// Exact energy of the piecewise-linear profile.
inline double exact_energy_pl(const PiecewiseLinearProfile& u, std::optional<double> p = std::nullopt) {
    const double e = p.value_or(default_exponent(u.grid));
    detail::require(e > 1.0, "energy exponent must exceed 1");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.grid.cell_count(); ++i) sum += cell_energy(u, i, e);
    return sum;
}

/// Energy restricted to cells [first, last).
inline double exact_energy_pl(const PiecewiseLinearProfile& u, std::size_t first, std::size_t last, double p) {
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += cell_energy(u, i, p);
    return sum;
}

/// Profiles that can be sampled on a grid: they expose a sampling offset and
/// their value relative to it as a function of log-radius.
template <class P>
concept SampleableProfile = requires(const P& p, double s) {
    { p.sample_offset() } -> std::convertible_to<double>;
    { p.relative_value_at_log(s) } -> std::convertible_to<double>;
    { p.contains_log(s) } -> std::convertible_to<bool>;
};

/// Nodal interpolation of a profile.
template <SampleableProfile P>
PiecewiseLinearProfile sample_profile(const P& profile, const RadialGrid& grid) {
    std::vector<double> values(grid.node_count());
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const double s = grid.log_radius(i);
        if (!profile.contains_log(s)) throw DomainError("sample_profile: grid extends outside the profile's domain");
        values[i] = profile.relative_value_at_log(s);
    }
    return PiecewiseLinearProfile::make(grid, std::move(values), profile.sample_offset());
}

/// Nodal interpolation of an arbitrary function of the grid coordinate.
template <class F>
PiecewiseLinearProfile sample_function(F&& f, const RadialGrid& grid, double offset = 0.0) {
    std::vector<double> values(grid.node_count());
    for (std::size_t i = 0; i < grid.node_count(); ++i) values[i] = f(grid.node(i)) - offset;
    return PiecewiseLinearProfile::make(grid, std::move(values), offset);
}

} // namespace qsm
