#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace frachs {

/// Tensor-product grid of interior nodes on a box, one or two axes.
/// Nodes on axis a sit at lo[a] + k*h[a] (k = 1..res[a]) with
/// h[a] = (hi[a]-lo[a])/(res[a]+1), optionally shifted by h/2 when a node
/// would land exactly on the spatial origin (the singular weight must never
/// be evaluated at 0).
class Grid {
  public:
    Grid() = default;  // empty placeholder; use the factories below
    static Grid interval(double lo, double hi, int res);
    static Grid box(double lo0, double hi0, int res0, double lo1, double hi1, int res1);

    int dim() const { return dim_; }
    int res(int axis) const { return res_[axis]; }
    double h(int axis) const { return h_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    bool origin_offset_applied() const { return offset_applied_; }

    std::size_t size() const;
    double axis_node(int axis, int k) const { return nodes_[axis][k]; }
    const std::vector<double>& axis_nodes(int axis) const { return nodes_[axis]; }

    /// Coordinates of interior node `idx` (flattened, axis-0 fastest).
    std::array<double, 2> node(std::size_t idx) const;
    /// Euclidean distance of node `idx` from the origin.
    double node_radius(std::size_t idx) const;

    /// Quadrature weight per node: product of spacings.
    double cell_weight() const;
    double min_spacing() const;
    /// Clamp floor for the singular weight |x|^a: half of the smallest spacing.
    double radius_clamp() const { return 0.5 * min_spacing(); }

    bool same_layout(const Grid& other) const;

  private:
    void build_axis(int axis, double lo, double hi, int res);
    void apply_origin_policy();

    int dim_ = 1;
    std::array<double, 2> lo_{0, 0}, hi_{0, 0}, h_{0, 0};
    std::array<int, 2> res_{0, 0};
    std::array<std::vector<double>, 2> nodes_;
    bool offset_applied_ = false;
};

/// Real-valued field sampled on the interior nodes of a grid.
struct GridFunction {
    Grid grid;
    Eigen::VectorXd values;

    GridFunction() = default;
    GridFunction(const Grid& g, Eigen::VectorXd v);
    static GridFunction zero(const Grid& g);

    /// Sample a callable f(x) (1D) or f(x0,x1) (2D) on the nodes.
    template <typename F>
    static GridFunction sample(const Grid& g, F&& f) {
        GridFunction u = zero(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.node(i);
            if constexpr (std::is_invocable_v<F, double, double>)
                u.values[static_cast<Eigen::Index>(i)] = f(x[0], x[1]);
            else
                u.values[static_cast<Eigen::Index>(i)] = f(x[0]);
        }
        return u;
    }

    /// Grid L2 inner product (quadrature-weighted).
    double dot(const GridFunction& other) const;
    double norm_l2() const;
    bool finite() const;
};

}  // namespace frachs
