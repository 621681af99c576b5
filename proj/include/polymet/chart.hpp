#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "polymet/errors.hpp"

namespace polymet {

// A rectangular coordinate domain with a uniform grid. On a periodic axis the
// right endpoint is identified with the left one, so no sample is duplicated:
// spacing is (hi-lo)/N on periodic axes and (hi-lo)/(N-1) otherwise.
class Chart {
public:
    Chart(int dim, std::vector<std::pair<double, double>> bounds,
          std::vector<int> resolution, std::vector<bool> periodic)
        : dim_(dim),
          bounds_(std::move(bounds)),
          resolution_(std::move(resolution)),
          periodic_(std::move(periodic)) {
        if (dim_ < 1) throw InvalidBounds("chart dimension must be positive");
        if (static_cast<int>(bounds_.size()) != dim_ ||
            static_cast<int>(resolution_.size()) != dim_ ||
            static_cast<int>(periodic_.size()) != dim_)
            throw InvalidBounds("bounds/resolution/periodic size must equal dim");
        for (int a = 0; a < dim_; ++a) {
            if (!(bounds_[a].first < bounds_[a].second))
                throw InvalidBounds("axis " + std::to_string(a) + ": lo >= hi");
            if (resolution_[a] < 2)
                throw ResolutionTooSmall("axis " + std::to_string(a) +
                                         ": need at least 2 nodes");
        }
        node_count_ = 1;
        strides_.assign(dim_, 0);
        for (int a = dim_ - 1; a >= 0; --a) {
            strides_[a] = node_count_;
            node_count_ *= static_cast<std::size_t>(resolution_[a]);
        }
    }

    int dim() const { return dim_; }
    std::size_t node_count() const { return node_count_; }
    int resolution(int axis) const { return resolution_[axis]; }
    const std::vector<int>& resolution() const { return resolution_; }
    bool periodic(int axis) const { return periodic_[axis]; }
    const std::vector<bool>& periodic() const { return periodic_; }
    double lo(int axis) const { return bounds_[axis].first; }
    double hi(int axis) const { return bounds_[axis].second; }
    double length(int axis) const { return bounds_[axis].second - bounds_[axis].first; }

    bool fully_periodic() const {
        for (int a = 0; a < dim_; ++a)
            if (!periodic_[a]) return false;
        return true;
    }

    // Grid spacing along an axis.
    double spacing(int axis) const {
        const int n = resolution_[axis];
        return periodic_[axis] ? length(axis) / n : length(axis) / (n - 1);
    }

    double coordinate(int axis, int k) const { return lo(axis) + k * spacing(axis); }

    std::size_t stride(int axis) const { return strides_[axis]; }

    std::size_t flat_index(const std::vector<int>& multi) const {
        std::size_t idx = 0;
        for (int a = 0; a < dim_; ++a) idx += strides_[a] * static_cast<std::size_t>(multi[a]);
        return idx;
    }

    std::vector<int> multi_index(std::size_t flat) const {
        std::vector<int> m(dim_);
        for (int a = 0; a < dim_; ++a) {
            m[a] = static_cast<int>(flat / strides_[a]);
            flat %= strides_[a];
        }
        return m;
    }

    std::vector<double> node_coords(std::size_t flat) const {
        std::vector<double> x(dim_);
        for (int a = 0; a < dim_; ++a) {
            const int k = static_cast<int>(flat / strides_[a]);
            flat %= strides_[a];
            x[a] = coordinate(a, k);
        }
        return x;
    }

    // Wraps k into [0, N) on periodic axes; bounds-checks otherwise.
    int wrap_node(int axis, int k) const {
        const int n = resolution_[axis];
        if (periodic_[axis]) {
            k %= n;
            if (k < 0) k += n;
            return k;
        }
        if (k < 0 || k >= n)
            throw MapsOutsideChart("node index outside non-periodic axis " +
                                   std::to_string(axis));
        return k;
    }

    // Quadrature weight of one node: product of per-axis weights
    // (uniform h on periodic axes, trapezoid on bounded axes).
    double quadrature_weight(const std::vector<int>& multi) const {
        double w = 1.0;
        for (int a = 0; a < dim_; ++a) {
            const double h = spacing(a);
            if (periodic_[a]) {
                w *= h;
            } else {
                const bool edge = (multi[a] == 0 || multi[a] == resolution_[a] - 1);
                w *= edge ? 0.5 * h : h;
            }
        }
        return w;
    }

    bool operator==(const Chart& o) const {
        return dim_ == o.dim_ && bounds_ == o.bounds_ && resolution_ == o.resolution_ &&
               periodic_ == o.periodic_;
    }
    bool operator!=(const Chart& o) const { return !(*this == o); }

private:
    int dim_;
    std::vector<std::pair<double, double>> bounds_;
    std::vector<int> resolution_;
    std::vector<bool> periodic_;
    std::size_t node_count_ = 0;
    std::vector<std::size_t> strides_;
};

inline Chart make_chart(int dim, std::vector<std::pair<double, double>> bounds,
                        std::vector<int> resolution, std::vector<bool> periodic) {
    return Chart(dim, std::move(bounds), std::move(resolution), std::move(periodic));
}

// Convenience constructors used across the test suites.
inline Chart circle_chart(int n, double length = 2.0 * M_PI) {
    return Chart(1, {{0.0, length}}, {n}, {true});
}

inline Chart torus_chart(int nx, int ny, double lx = 2.0 * M_PI, double ly = 2.0 * M_PI) {
    return Chart(2, {{0.0, lx}, {0.0, ly}}, {nx, ny}, {true, true});
}

inline Chart box_chart(std::vector<std::pair<double, double>> bounds, std::vector<int> res) {
    const int d = static_cast<int>(bounds.size());
    return Chart(d, std::move(bounds), std::move(res), std::vector<bool>(d, false));
}

// Polar sphere chart with the poles excised: theta in [delta, pi-delta],
// phi periodic. delta defaults to 4 grid spacings of the theta axis.
inline Chart sphere_chart(int n_theta, int n_phi, double delta = -1.0) {
    if (delta <= 0.0) {
        // spacing of the untruncated axis, then excise 4 cells on each side
        const double h = M_PI / (n_theta - 1);
        delta = 4.0 * h;
    }
    return Chart(2, {{delta, M_PI - delta}, {0.0, 2.0 * M_PI}}, {n_theta, n_phi},
                 {false, true});
}

}  // namespace polymet
