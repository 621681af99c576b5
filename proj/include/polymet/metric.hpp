#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polymet/fields.hpp"
#include "polymet/linalg.hpp"

namespace polymet {

// Eigenvalue inertia of a symmetric form: p positives, q negatives; the
// degenerate flag records eigenvalues inside the tolerance band.
struct Inertia {
    int positive = 0;
    int negative = 0;
    bool degenerate = false;

    bool operator==(const Inertia& o) const {
        return positive == o.positive && negative == o.negative && degenerate == o.degenerate;
    }
    bool operator!=(const Inertia& o) const { return !(*this == o); }

    std::string str() const {
        std::ostringstream os;
        os << "(" << positive << "," << negative << (degenerate ? ",degenerate)" : ")");
        return os.str();
    }
};

inline Inertia riemannian_inertia(int n) { return Inertia{n, 0, false}; }

// Signature of a symmetric matrix by eigenvalue counting. The sign pattern of
// leading principal minors is the classical criterion; eigenvalues are the
// numerically stable route, and |lambda| < tol counts as degenerate.
inline Inertia inertia_of(const std::vector<double>& a, int n, double tol) {
    if (tol <= 0.0) throw InvalidArgument("inertia tolerance must be positive");
    if (static_cast<int>(a.size()) != n * n) throw InvalidArgument("matrix size mismatch");
    const double scale = smallmat::max_abs(a.data(), n);
    if (smallmat::asymmetry(a.data(), n) > 1e-12 * std::max(scale, 1.0))
        throw NotSymmetric("inertia_of requires a symmetric matrix");
    JacobiEigen eig(a.data(), n);
    Inertia out;
    for (int i = 0; i < n; ++i) {
        const double e = eig.eigenvalue(i);
        if (e > tol)
            ++out.positive;
        else if (e < -tol)
            ++out.negative;
        else
            out.degenerate = true;
    }
    return out;
}

struct InertiaFailure {
    std::size_t node;
    std::vector<double> coords;
    Inertia found;
};

// A symmetric bilinear-form field with a declared, nodewise-verified inertia.
// eig_tolerance is relative to the largest eigenvalue magnitude at each node.
class MetricField {
public:
    static constexpr double kDefaultEigTolerance = 1e-9;

    MetricField(TensorField components, Inertia declared,
                double eig_tolerance = kDefaultEigTolerance)
        : components_(std::move(components)),
          declared_(declared),
          eig_tolerance_(eig_tolerance) {
        if (eig_tolerance_ <= 0.0) throw InvalidArgument("eig_tolerance must be positive");
        if (components_.contravariant_rank() != 0 || components_.covariant_rank() != 2 ||
            !components_.symmetric())
            throw InvalidArgument("metric components must be a symmetric (0,2) tensor");
        if (declared_.degenerate)
            throw InertiaMismatch("declared inertia of a metric cannot be degenerate");
        if (declared_.positive + declared_.negative != chart().dim())
            throw InertiaMismatch("declared inertia must be nondegenerate: p+q=n");
        if (auto fail = first_inertia_failure()) {
            std::ostringstream os;
            os << "node " << fail->node << " at (";
            for (std::size_t i = 0; i < fail->coords.size(); ++i)
                os << (i ? "," : "") << fail->coords[i];
            os << ") has inertia " << fail->found.str() << ", declared " << declared_.str();
            throw InertiaMismatch(os.str());
        }
    }

    const Chart& chart() const { return components_.chart(); }
    const TensorField& components() const { return components_; }
    const Inertia& declared_inertia() const { return declared_; }
    double eig_tolerance() const { return eig_tolerance_; }
    int dim() const { return chart().dim(); }

    const double* node_matrix(std::size_t node) const {
        return components_.data().data() + node * components_.components_per_node();
    }

    // First node whose eigenvalue inertia disagrees with the declaration.
    std::optional<InertiaFailure> first_inertia_failure() const {
        const int n = dim();
        std::vector<double> m(static_cast<std::size_t>(n) * n);
        for (std::size_t node = 0; node < chart().node_count(); ++node) {
            const double* blk = node_matrix(node);
            std::copy(blk, blk + m.size(), m.begin());
            const double scale = smallmat::max_abs(m.data(), n);
            const Inertia found = inertia_of(m, n, eig_tolerance_ * std::max(scale, 1e-300));
            if (found != declared_ || found.degenerate)
                return InertiaFailure{node, chart().node_coords(node), found};
        }
        return std::nullopt;
    }

    // Smallest absolute eigenvalue over all nodes.
    double min_abs_eigenvalue() const {
        const int n = dim();
        double m = 1e300;
        for (std::size_t node = 0; node < chart().node_count(); ++node) {
            JacobiEigen eig(node_matrix(node), n);
            for (int i = 0; i < n; ++i) m = std::min(m, std::abs(eig.eigenvalue(i)));
        }
        return m;
    }

    bool is_riemannian() const { return declared_ == riemannian_inertia(dim()); }

private:
    TensorField components_;
    Inertia declared_;
    double eig_tolerance_;
};

// Perturbation guarantee radius: any symmetric field with sup-node operator
// norm below this leaves the nodewise inertia unchanged.
inline double stability_radius(const MetricField& g) { return 0.5 * g.min_abs_eigenvalue(); }

// Straight-line path (1-t) g0 + t g1. Guaranteed to stay in the Riemannian
// cone; for indefinite inputs the nodewise check may fail, which is reported
// as SignatureLost rather than hidden.
inline MetricField convex_path(const MetricField& g0, const MetricField& g1, double t) {
    if (g0.chart() != g1.chart()) throw ChartMismatch("convex_path: different charts");
    if (g0.declared_inertia() != g1.declared_inertia())
        throw InertiaMismatch("convex_path: different declared inertias");
    TensorField comps = (1.0 - t) * g0.components() + t * g1.components();
    TensorField sym(comps.chart(), 0, 2, comps.data(), /*symmetric=*/true);
    try {
        return MetricField(std::move(sym), g0.declared_inertia(),
                           std::min(g0.eig_tolerance(), g1.eig_tolerance()));
    } catch (const InertiaMismatch& e) {
        throw SignatureLost(std::string("interpolant left the declared cone: ") + e.what());
    }
}

// A finite ordered tuple of metrics over one shared chart.
class Polymetric {
public:
    explicit Polymetric(std::vector<MetricField> components)
        : components_(std::move(components)) {
        if (components_.empty()) throw InvalidArgument("polymetric needs at least one component");
        for (std::size_t i = 1; i < components_.size(); ++i)
            if (components_[i].chart() != components_[0].chart())
                throw ChartMismatch("polymetric components on different charts");
    }

    const Chart& chart() const { return components_[0].chart(); }
    std::size_t size() const { return components_.size(); }
    const MetricField& component(std::size_t i) const { return components_[i]; }
    const std::vector<MetricField>& components() const { return components_; }

    std::vector<Inertia> inertias() const {
        std::vector<Inertia> v;
        v.reserve(components_.size());
        for (const auto& g : components_) v.push_back(g.declared_inertia());
        return v;
    }

    bool all_riemannian() const {
        for (const auto& g : components_)
            if (!g.is_riemannian()) return false;
        return true;
    }

private:
    std::vector<MetricField> components_;
};

struct PolymetricComponentFailure {
    std::size_t component;
    InertiaFailure failure;
};

struct PolymetricValidation {
    std::optional<Polymetric> polymetric;          // set when every component passes
    std::vector<PolymetricComponentFailure> failures;  // per-component first failures
    bool ok() const { return polymetric.has_value(); }
};

// Validates raw component tensors against declared inertias. Returns either
// the assembled Polymetric or a per-component failure report with the node
// coordinates of the first offending node.
inline PolymetricValidation validate_polymetric(const std::vector<TensorField>& components,
                                                const std::vector<Inertia>& inertias,
                                                double eig_tolerance =
                                                    MetricField::kDefaultEigTolerance) {
    if (components.empty()) throw InvalidArgument("validate_polymetric: empty component list");
    if (components.size() != inertias.size())
        throw InvalidArgument("validate_polymetric: component/inertia count mismatch");
    for (std::size_t i = 1; i < components.size(); ++i)
        if (components[i].chart() != components[0].chart())
            throw ChartMismatch("validate_polymetric: components on different charts");

    PolymetricValidation out;
    std::vector<MetricField> fields;
    for (std::size_t i = 0; i < components.size(); ++i) {
        TensorField sym(components[i].chart(), 0, 2, components[i].data(), true);
        try {
            fields.emplace_back(std::move(sym), inertias[i], eig_tolerance);
        } catch (const InertiaMismatch&) {
            // Re-derive the first failing node for the report.
            TensorField sym2(components[i].chart(), 0, 2, components[i].data(), true);
            const int n = components[i].chart().dim();
            std::vector<double> m(static_cast<std::size_t>(n) * n);
            for (std::size_t node = 0; node < components[i].chart().node_count(); ++node) {
                std::copy(sym2.data().begin() + node * m.size(),
                          sym2.data().begin() + (node + 1) * m.size(), m.begin());
                const double scale = smallmat::max_abs(m.data(), n);
                const Inertia found =
                    inertia_of(m, n, eig_tolerance * std::max(scale, 1e-300));
                if (found != inertias[i] || found.degenerate) {
                    out.failures.push_back(PolymetricComponentFailure{
                        i, InertiaFailure{node, components[i].chart().node_coords(node), found}});
                    break;
                }
            }
        }
    }
    if (out.failures.empty()) out.polymetric = Polymetric(std::move(fields));
    return out;
}

}  // namespace polymet
