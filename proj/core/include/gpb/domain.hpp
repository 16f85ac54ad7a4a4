#pragma once

#include "gpb/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <variant>

namespace gpb {

/// Affine piece of a parameterized path: param in [param_begin, param_end) maps
/// linearly from `start` to `end`.
struct PathSegment {
    double param_begin;
    double param_end;
    Point start;
    Point end;

    double length() const { return (end - start).norm(); }
    /// Arclength per unit parameter.
    double speed() const { return length() / (param_end - param_begin); }
    Point at(double param) const {
        const double u = (param - param_begin) / (param_end - param_begin);
        return start + u * (end - start);
    }
};

struct FinitePoints {
    PointSet points;
};

struct ParameterizedPath {
    std::vector<PathSegment> segments;
    double param_begin;
    double param_end;
};

/// The subset T0 on which the process values are known.
class ConstraintSet {
public:
    using Variant = std::variant<FinitePoints, ParameterizedPath>;

    static ConstraintSet finite(PointSet points);
    /// Closed polyline through `vertices` (in order), parameterized over
    /// [param_begin, param_end) proportionally to arclength.
    static ConstraintSet polyline(const PointSet& vertices, bool closed, double param_begin, double param_end);

    const Variant& variant() const { return variant_; }
    bool is_finite() const { return std::holds_alternative<FinitePoints>(variant_); }
    int ambient_dimension() const { return dimension_; }

    /// Path point at a parameter value in [a, b). Throws for finite sets.
    Point embed(double param) const;
    /// Sum of segment lengths for paths; number of points for finite sets.
    double measure() const;
    const ParameterizedPath& path() const;
    const PointSet& points() const;

    nlohmann::json to_json() const;
    static ConstraintSet from_json(const nlohmann::json& j);

private:
    friend ConstraintSet rect_boundary(const Point&, const Point&);
    friend ConstraintSet diagonal(const Point&, const Point&);
    friend ConstraintSet interval(double, double);

    ConstraintSet(Variant v, int dimension, nlohmann::json description)
        : variant_(std::move(v)), dimension_(dimension), description_(std::move(description)) {}

    Variant variant_;
    int dimension_;
    nlohmann::json description_;
};

/// Boundary of the rectangle [lo, hi], counterclockwise from the corner lo,
/// parameterized over [-1, 1) at constant speed.
ConstraintSet rect_boundary(const Point& lo, const Point& hi);
/// Segment from lo to hi, t in [-1, 1). For the box [-1,1]^2 this is t -> (t, t).
ConstraintSet diagonal(const Point& lo, const Point& hi);
/// The interval [lo, hi] of the real line as a one-segment path over [lo, hi).
ConstraintSet interval(double lo, double hi);

enum class QuadratureKind { Midpoint, GaussLegendre };

/// Discrete measure on T0: sum_i weights_i f(ambient_nodes_i) approximates the
/// integral of f over T0 with respect to arclength.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    PointSet ambient_nodes;

    std::size_t size() const { return weights.size(); }
    double total_weight() const;
    Eigen::VectorXd weight_vector() const;
    double integrate(const ScalarField& f) const;
};

/// Nodes are allotted to path segments in proportion to arclength (largest
/// remainder), with every segment receiving at least one node.
QuadratureRule quadrature(const ConstraintSet& set, std::size_t n_nodes, QuadratureKind rule = QuadratureKind::Midpoint);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

/// M points in [-1, 1]^d; each coordinate has exactly one point per stratum
/// [-1 + 2i/M, -1 + 2(i+1)/M).
PointSet latin_hypercube(std::size_t count, int dimension, std::uint64_t seed);

/// `count` equispaced points covering [lo, hi] including both ends.
PointSet linspace_1d(double lo, double hi, std::size_t count);

}  // namespace gpb
