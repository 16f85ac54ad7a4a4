#include "gpb/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpb {

struct Kernel::Node {
    Family family;
    int dimension;
    double holder;

    double lengthscale = 1.0;
    MaternSmoothness smoothness = MaternSmoothness::Half;

    double amplitude = 1.0;
    std::vector<double> rates;
    std::vector<double> exponents;

    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    VarianceProfile profile;

    double eval(const Point& s, const Point& t) const {
        switch (family) {
            case Family::SquaredExponential:
                return std::exp(-(s - t).squaredNorm() / (lengthscale * lengthscale));
            case Family::Matern: {
                const double r = (s - t).norm() / lengthscale;
                switch (smoothness) {
                    case MaternSmoothness::Half:
                        return std::exp(-r);
                    case MaternSmoothness::ThreeHalves: {
                        const double a = std::sqrt(3.0) * r;
                        return (1.0 + a) * std::exp(-a);
                    }
                    case MaternSmoothness::FiveHalves: {
                        const double a = std::sqrt(5.0) * r;
                        return (1.0 + a + a * a / 3.0) * std::exp(-a);
                    }
                }
                return 0.0;
            }
            case Family::PoweredExponential: {
                double acc = 0.0;
                for (int i = 0; i < dimension; ++i)
                    acc += rates[i] * std::pow(std::abs(s(i) - t(i)), exponents[i]);
                return amplitude * std::exp(-acc);
            }
            case Family::VarianceScaled:
                return profile.sigma(s) * profile.sigma(t) * left->eval(s, t);
            case Family::Sum:
                return left->eval(s, t) + right->eval(s, t);
        }
        return 0.0;
    }

    nlohmann::json to_json() const {
        using nlohmann::json;
        switch (family) {
            case Family::SquaredExponential:
                return {{"family", "squared_exponential"},
                        {"params", {{"dimension", dimension}, {"lengthscale", lengthscale}}}};
            case Family::Matern: {
                const char* nu = smoothness == MaternSmoothness::Half          ? "1/2"
                                 : smoothness == MaternSmoothness::ThreeHalves ? "3/2"
                                                                               : "5/2";
                return {{"family", "matern"},
                        {"params", {{"dimension", dimension}, {"nu", nu}, {"lengthscale", lengthscale}}}};
            }
            case Family::PoweredExponential:
                return {{"family", "powered_exponential"},
                        {"params", {{"amplitude", amplitude}, {"rates", rates}, {"exponents", exponents}}}};
            case Family::VarianceScaled: {
                if (!profile.description)
                    throw std::invalid_argument("variance-scaled kernel with a custom sigma is not serializable");
                return {{"family", "variance_scaled"},
                        {"params", {{"base", left->to_json()}, {"sigma", *profile.description}}}};
            }
            case Family::Sum:
                return {{"family", "sum"}, {"params", {{"left", left->to_json()}, {"right", right->to_json()}}}};
        }
        return {};
    }
};

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

VarianceProfile VarianceProfile::constant(double value) {
    require_positive(value, "constant variance scale");
    VarianceProfile p;
    p.sigma = [value](const Point&) { return value; };
    p.lower = value;
    p.upper = value;
    p.description = nlohmann::json{{"type", "constant"}, {"value", value}};
    return p;
}

VarianceProfile VarianceProfile::one_plus_squared_norm(double scale, int dimension, double radius) {
    if (scale < 0.0) throw std::invalid_argument("variance profile scale must be nonnegative");
    require_positive(radius, "variance profile radius");
    VarianceProfile p;
    p.sigma = [scale](const Point& s) { return 1.0 + scale * s.squaredNorm(); };
    p.lower = 1.0;
    p.upper = 1.0 + scale * radius * radius * dimension;
    p.description = nlohmann::json{{"type", "one_plus_squared_norm"}, {"scale", scale}, {"radius", radius}};
    return p;
}

VarianceProfile VarianceProfile::from_json(const nlohmann::json& j, int dimension) {
    const auto type = j.at("type").get<std::string>();
    if (type == "constant") return constant(j.at("value").get<double>());
    if (type == "one_plus_squared_norm")
        return one_plus_squared_norm(j.at("scale").get<double>(), dimension, j.value("radius", 1.0));
    throw std::invalid_argument("unknown variance profile type '" + type + "'");
}

Kernel Kernel::squared_exponential(int dimension, double lengthscale) {
    if (dimension < 1) throw std::invalid_argument("kernel dimension must be >= 1");
    require_positive(lengthscale, "lengthscale");
    auto n = std::make_shared<Node>();
    n->family = Family::SquaredExponential;
    n->dimension = dimension;
    n->holder = 2.0;
    n->lengthscale = lengthscale;
    return Kernel(std::move(n));
}

Kernel Kernel::matern(int dimension, MaternSmoothness smoothness, double lengthscale) {
    if (dimension < 1) throw std::invalid_argument("kernel dimension must be >= 1");
    require_positive(lengthscale, "lengthscale");
    auto n = std::make_shared<Node>();
    n->family = Family::Matern;
    n->dimension = dimension;
    n->holder = smoothness == MaternSmoothness::Half ? 1.0 : 2.0;
    n->lengthscale = lengthscale;
    n->smoothness = smoothness;
    return Kernel(std::move(n));
}

Kernel Kernel::powered_exponential(double amplitude, std::vector<double> rates, std::vector<double> exponents) {
    require_positive(amplitude, "amplitude");
    if (rates.empty() || rates.size() != exponents.size())
        throw std::invalid_argument("powered exponential needs one rate and one exponent per dimension");
    for (double r : rates) require_positive(r, "rate");
    for (double p : exponents)
        if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("powered exponential exponents must lie in (0, 2]");
    auto n = std::make_shared<Node>();
    n->family = Family::PoweredExponential;
    n->dimension = static_cast<int>(rates.size());
    n->holder = *std::min_element(exponents.begin(), exponents.end());
    n->amplitude = amplitude;
    n->rates = std::move(rates);
    n->exponents = std::move(exponents);
    return Kernel(std::move(n));
}

Kernel Kernel::sum(const Kernel& left, const Kernel& right) {
    if (left.dimension() != right.dimension()) throw std::invalid_argument("sum of kernels with different dimensions");
    auto n = std::make_shared<Node>();
    n->family = Family::Sum;
    n->dimension = left.dimension();
    n->holder = std::min(left.holder_exponent(), right.holder_exponent());
    n->left = left.node_;
    n->right = right.node_;
    return Kernel(std::move(n));
}

Kernel scale_variance(const Kernel& base, VarianceProfile profile) {
    if (!(profile.lower > 0.0) || profile.upper < profile.lower)
        throw std::invalid_argument("variance scaling bounds must satisfy 0 < lower <= upper");
    if (!profile.sigma) throw std::invalid_argument("variance scaling needs a sigma function");
    auto n = std::make_shared<Kernel::Node>();
    n->family = Kernel::Family::VarianceScaled;
    n->dimension = base.dimension();
    n->holder = base.holder_exponent();
    n->left = base.node_;
    n->profile = std::move(profile);
    return Kernel(std::move(n));
}

Kernel scale_variance(const Kernel& base, ScalarField sigma, double lower, double upper) {
    VarianceProfile p;
    p.sigma = std::move(sigma);
    p.lower = lower;
    p.upper = upper;
    return scale_variance(base, std::move(p));
}

double Kernel::operator()(const Point& s, const Point& t) const {
    if (s.size() != node_->dimension || t.size() != node_->dimension)
        throw std::invalid_argument("kernel of dimension " + std::to_string(node_->dimension) +
                                    " evaluated at points of dimension " + std::to_string(s.size()) + " and " +
                                    std::to_string(t.size()));
    return node_->eval(s, t);
}

Kernel::Family Kernel::family() const { return node_->family; }
int Kernel::dimension() const { return node_->dimension; }
double Kernel::holder_exponent() const { return node_->holder; }

std::string Kernel::name() const { return node_->to_json().value("family", std::string("kernel")); }

nlohmann::json Kernel::to_json() const { return node_->to_json(); }

Kernel Kernel::from_json(const nlohmann::json& j) {
    const auto family = j.at("family").get<std::string>();
    const auto& p = j.contains("params") ? j.at("params") : nlohmann::json::object();
    if (family == "squared_exponential")
        return squared_exponential(p.value("dimension", 1), p.value("lengthscale", 1.0));
    if (family == "matern") {
        const auto nu = p.value("nu", std::string("5/2"));
        MaternSmoothness s;
        if (nu == "1/2" || nu == "0.5")
            s = MaternSmoothness::Half;
        else if (nu == "3/2" || nu == "1.5")
            s = MaternSmoothness::ThreeHalves;
        else if (nu == "5/2" || nu == "2.5")
            s = MaternSmoothness::FiveHalves;
        else
            throw std::invalid_argument("matern smoothness must be one of 1/2, 3/2, 5/2");
        return matern(p.value("dimension", 1), s, p.value("lengthscale", 1.0));
    }
    if (family == "powered_exponential")
        return powered_exponential(p.value("amplitude", 1.0), p.at("rates").get<std::vector<double>>(),
                                   p.at("exponents").get<std::vector<double>>());
    if (family == "variance_scaled") {
        auto base = from_json(p.at("base"));
        return scale_variance(base, VarianceProfile::from_json(p.at("sigma"), base.dimension()));
    }
    if (family == "sum") return sum(from_json(p.at("left")), from_json(p.at("right")));
    throw std::invalid_argument("unknown kernel family '" + family + "'");
}

Eigen::MatrixXd gram(const Kernel& k, const PointSet& a, const PointSet& b) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(a[i], b[j]);
    return g;
}

Eigen::MatrixXd gram(const Kernel& k, const PointSet& a) {
    const auto n = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) g(i, j) = g(j, i) = k(a[i], a[j]);
    return g;
}

Eigen::VectorXd section(const Kernel& k, const PointSet& a, const Point& t) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = k(a[i], t);
    return v;
}

}  // namespace gpb
