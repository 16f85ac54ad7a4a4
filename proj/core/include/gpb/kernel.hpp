#pragma once

#include "gpb/types.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <vector>

namespace gpb {

enum class MaternSmoothness { Half, ThreeHalves, FiveHalves };

/// Positive weight function sigma(s) used by variance scaling, together with the
/// caller-asserted bounds lower <= sigma(s) <= upper. `description` is the JSON
/// form when the profile came from a named family; arbitrary callables leave it empty.
struct VarianceProfile {
    ScalarField sigma;
    double lower = 1.0;
    double upper = 1.0;
    std::optional<nlohmann::json> description;

    static VarianceProfile constant(double value);
    /// sigma(s) = 1 + scale * |s|^2, bounded on the box [-radius, radius]^d.
    static VarianceProfile one_plus_squared_norm(double scale, int dimension, double radius = 1.0);
    static VarianceProfile from_json(const nlohmann::json& j, int dimension);
};

/// Covariance kernel over R^d. Immutable value type; copies share the underlying
/// definition, so a Kernel can be passed around and evaluated concurrently.
class Kernel {
public:
    enum class Family { SquaredExponential, Matern, PoweredExponential, VarianceScaled, Sum };

    /// exp(-|s - t|^2 / lengthscale^2). lengthscale = 1 gives exp(-|s - t|^2).
    static Kernel squared_exponential(int dimension, double lengthscale = 1.0);
    static Kernel matern(int dimension, MaternSmoothness smoothness, double lengthscale = 1.0);
    /// amplitude * exp(-sum_i rates_i |s_i - t_i|^exponents_i); exponents in (0, 2].
    static Kernel powered_exponential(double amplitude, std::vector<double> rates,
                                      std::vector<double> exponents);
    static Kernel sum(const Kernel& left, const Kernel& right);

    double operator()(const Point& s, const Point& t) const;

    Family family() const;
    int dimension() const;
    /// Declared Hoelder exponent of the kernel (not estimated).
    double holder_exponent() const;
    std::string name() const;

    nlohmann::json to_json() const;
    static Kernel from_json(const nlohmann::json& j);

    struct Node;

private:
    explicit Kernel(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    friend Kernel scale_variance(const Kernel&, VarianceProfile);

    std::shared_ptr<const Node> node_;
};

inline Kernel operator+(const Kernel& a, const Kernel& b) { return Kernel::sum(a, b); }

/// sigma(s) sigma(t) base(s, t). Throws if the declared bounds are not 0 < lower <= upper.
Kernel scale_variance(const Kernel& base, VarianceProfile profile);
Kernel scale_variance(const Kernel& base, ScalarField sigma, double lower, double upper);

/// Entry (i, j) = k(a_i, b_j).
Eigen::MatrixXd gram(const Kernel& k, const PointSet& a, const PointSet& b);
/// Symmetric Gram on a single point set; only the upper triangle is evaluated.
Eigen::MatrixXd gram(const Kernel& k, const PointSet& a);
/// Column of k(a_i, t).
Eigen::VectorXd section(const Kernel& k, const PointSet& a, const Point& t);

}  // namespace gpb
