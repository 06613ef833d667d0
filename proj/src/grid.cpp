#include "frachs/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace frachs {

Grid Grid::interval(double lo, double hi, int res) {
    Grid g;
    g.dim_ = 1;
    g.build_axis(0, lo, hi, res);
    g.apply_origin_policy();
    return g;
}

Grid Grid::box(double lo0, double hi0, int res0, double lo1, double hi1, int res1) {
    Grid g;
    g.dim_ = 2;
    g.build_axis(0, lo0, hi0, res0);
    g.build_axis(1, lo1, hi1, res1);
    g.apply_origin_policy();
    return g;
}

void Grid::build_axis(int axis, double lo, double hi, int res) {
    if (res < 3) throw std::invalid_argument("Grid: need at least 3 interior nodes per axis");
    if (!(hi > lo)) throw std::invalid_argument("Grid: empty interval");
    lo_[axis] = lo;
    hi_[axis] = hi;
    res_[axis] = res;
    h_[axis] = (hi - lo) / (res + 1);
    nodes_[axis].resize(res);
    for (int k = 0; k < res; ++k) nodes_[axis][k] = lo + (k + 1) * h_[axis];
}

void Grid::apply_origin_policy() {
    // A node "contains the origin" when every axis has a node numerically at 0.
    bool collision = true;
    for (int a = 0; a < dim_; ++a) {
        bool axis_hit = false;
        for (double x : nodes_[a])
            if (std::abs(x) < 1e-12 * h_[a]) axis_hit = true;
        collision = collision && axis_hit;
    }
    if (!collision) return;
    offset_applied_ = true;
    for (int a = 0; a < dim_; ++a)
        for (double& x : nodes_[a]) x += 0.5 * h_[a];
}

std::size_t Grid::size() const {
    std::size_t n = res_[0];
    if (dim_ == 2) n *= res_[1];
    return n;
}

std::array<double, 2> Grid::node(std::size_t idx) const {
    if (dim_ == 1) return {nodes_[0][idx], 0.0};
    const std::size_t i = idx % res_[0];
    const std::size_t j = idx / res_[0];
    return {nodes_[0][i], nodes_[1][j]};
}

double Grid::node_radius(std::size_t idx) const {
    const auto x = node(idx);
    return dim_ == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

double Grid::cell_weight() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

double Grid::min_spacing() const { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }

bool Grid::same_layout(const Grid& other) const {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a)
        if (res_[a] != other.res_[a] || lo_[a] != other.lo_[a] || hi_[a] != other.hi_[a] ||
            nodes_[a].front() != other.nodes_[a].front())
            return false;
    return true;
}

GridFunction::GridFunction(const Grid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != g.size())
        throw std::invalid_argument("GridFunction: value count does not match node count");
}

GridFunction GridFunction::zero(const Grid& g) {
    GridFunction u;
    u.grid = g;
    u.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    return u;
}

double GridFunction::dot(const GridFunction& other) const {
    if (!grid.same_layout(other.grid)) throw std::invalid_argument("GridFunction: grid mismatch");
    return grid.cell_weight() * values.dot(other.values);
}

double GridFunction::norm_l2() const { return std::sqrt(grid.cell_weight()) * values.norm(); }

bool GridFunction::finite() const { return values.allFinite(); }

}  // namespace frachs
