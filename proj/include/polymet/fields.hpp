#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "polymet/chart.hpp"
#include "polymet/errors.hpp"

namespace polymet {

namespace detail {
inline void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + " has a non-finite value");
}
inline std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}
}  // namespace detail

// A sampled real function: one value per grid node, row-major over the chart.
class ScalarField {
public:
    ScalarField(Chart chart, std::vector<double> values)
        : chart_(std::move(chart)), values_(std::move(values)) {
        if (values_.size() != chart_.node_count())
            throw InvalidArgument("scalar field size does not match chart");
        detail::check_finite(values_, "ScalarField");
    }

    static ScalarField constant(const Chart& chart, double c) {
        return ScalarField(chart, std::vector<double>(chart.node_count(), c));
    }

    static ScalarField sample(const Chart& chart,
                              const std::function<double(const std::vector<double>&)>& f) {
        std::vector<double> v(chart.node_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(chart.node_coords(i));
        return ScalarField(chart, std::move(v));
    }

    const Chart& chart() const { return chart_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double sup_norm() const {
        double m = 0.0;
        for (double x : values_) m = std::max(m, std::abs(x));
        return m;
    }

    ScalarField& operator+=(const ScalarField& o) {
        require_same_chart(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        require_same_chart(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double c) {
        for (double& x : values_) x *= c;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double c, ScalarField a) { return a *= c; }

    void require_same_chart(const ScalarField& o) const {
        if (chart_ != o.chart_) throw ChartMismatch("scalar fields on different charts");
    }

private:
    Chart chart_;
    std::vector<double> values_;
};

// A sampled tensor field of type (contravariant_rank, covariant_rank).
// Per-node component block is row-major with contravariant slots first.
// The optional symmetric flag refers to the first covariant pair and is made
// exact at construction by averaging.
class TensorField {
public:
    TensorField(Chart chart, int contravariant_rank, int covariant_rank,
                std::vector<double> components, bool symmetric = false)
        : chart_(std::move(chart)),
          contra_(contravariant_rank),
          cov_(covariant_rank),
          symmetric_(symmetric),
          components_(std::move(components)) {
        if (contra_ < 0 || cov_ < 0) throw InvalidArgument("negative tensor rank");
        comp_count_ = detail::ipow(static_cast<std::size_t>(chart_.dim()), contra_ + cov_);
        if (components_.size() != chart_.node_count() * comp_count_)
            throw InvalidArgument("tensor component array size mismatch");
        detail::check_finite(components_, "TensorField");
        if (symmetric_) {
            if (cov_ < 2) throw InvalidArgument("symmetric flag needs covariant rank >= 2");
            symmetrize_first_cov_pair();
        }
    }

    static TensorField zero(const Chart& chart, int contra, int cov, bool symmetric = false) {
        const std::size_t nc = detail::ipow(static_cast<std::size_t>(chart.dim()), contra + cov);
        return TensorField(chart, contra, cov,
                           std::vector<double>(chart.node_count() * nc, 0.0), symmetric);
    }

    const Chart& chart() const { return chart_; }
    int contravariant_rank() const { return contra_; }
    int covariant_rank() const { return cov_; }
    int total_rank() const { return contra_ + cov_; }
    bool symmetric() const { return symmetric_; }
    std::size_t components_per_node() const { return comp_count_; }
    const std::vector<double>& data() const { return components_; }
    std::vector<double>& data() { return components_; }

    // Flat component offset within a node block; indices listed contravariant
    // slots first, then covariant.
    std::size_t comp_offset(const std::vector<int>& idx) const {
        const int n = chart_.dim();
        std::size_t off = 0;
        for (int r = 0; r < total_rank(); ++r) off = off * n + static_cast<std::size_t>(idx[r]);
        return off;
    }

    double at(std::size_t node, const std::vector<int>& idx) const {
        return components_[node * comp_count_ + comp_offset(idx)];
    }
    double& at(std::size_t node, const std::vector<int>& idx) {
        return components_[node * comp_count_ + comp_offset(idx)];
    }
    double at_flat(std::size_t node, std::size_t comp) const {
        return components_[node * comp_count_ + comp];
    }
    double& at_flat(std::size_t node, std::size_t comp) {
        return components_[node * comp_count_ + comp];
    }

    double sup_norm() const {
        double m = 0.0;
        for (double x : components_) m = std::max(m, std::abs(x));
        return m;
    }

    TensorField& operator+=(const TensorField& o) {
        require_compatible(o);
        for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += o.components_[i];
        return *this;
    }
    TensorField& operator-=(const TensorField& o) {
        require_compatible(o);
        for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= o.components_[i];
        return *this;
    }
    TensorField& operator*=(double c) {
        for (double& x : components_) x *= c;
        return *this;
    }
    friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
    friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
    friend TensorField operator*(double c, TensorField a) { return a *= c; }

    void require_compatible(const TensorField& o) const {
        if (chart_ != o.chart_) throw ChartMismatch("tensor fields on different charts");
        if (contra_ != o.contra_ || cov_ != o.cov_)
            throw InvalidArgument("tensor rank mismatch");
    }

private:
    void symmetrize_first_cov_pair() {
        const int n = chart_.dim();
        // the first covariant pair sits at slots (contra_, contra_+1)
        const std::size_t tail = detail::ipow(static_cast<std::size_t>(n), cov_ - 2);
        const std::size_t head = detail::ipow(static_cast<std::size_t>(n), contra_);
        for (std::size_t node = 0; node < chart_.node_count(); ++node) {
            double* blk = components_.data() + node * comp_count_;
            for (std::size_t a = 0; a < head; ++a)
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        for (std::size_t t = 0; t < tail; ++t) {
                            const std::size_t ij = ((a * n + i) * n + j) * tail + t;
                            const std::size_t ji = ((a * n + j) * n + i) * tail + t;
                            const double avg = 0.5 * (blk[ij] + blk[ji]);
                            blk[ij] = avg;
                            blk[ji] = avg;
                        }
        }
    }

    Chart chart_;
    int contra_;
    int cov_;
    bool symmetric_;
    std::size_t comp_count_;
    std::vector<double> components_;
};

// Samples a symmetric rank-(0,2) field from a per-node matrix callback
// (row-major n*n values at coordinates x).
inline TensorField sample_sym2(const Chart& chart,
                               const std::function<std::vector<double>(const std::vector<double>&)>& f) {
    const int n = chart.dim();
    std::vector<double> comps(chart.node_count() * static_cast<std::size_t>(n) * n);
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const auto m = f(chart.node_coords(node));
        std::copy(m.begin(), m.end(),
                  comps.begin() + static_cast<std::ptrdiff_t>(node * n * n));
    }
    return TensorField(chart, 0, 2, std::move(comps), /*symmetric=*/true);
}

// Samples a vector field (rank (1,0)) from a callback returning n components.
inline TensorField sample_vector(const Chart& chart,
                                 const std::function<std::vector<double>(const std::vector<double>&)>& f) {
    const int n = chart.dim();
    std::vector<double> comps(chart.node_count() * static_cast<std::size_t>(n));
    for (std::size_t node = 0; node < chart.node_count(); ++node) {
        const auto v = f(chart.node_coords(node));
        std::copy(v.begin(), v.end(), comps.begin() + static_cast<std::ptrdiff_t>(node * n));
    }
    return TensorField(chart, 1, 0, std::move(comps));
}

}  // namespace polymet
