#include "gpb/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gpb {

namespace {

void check_box(const Point& lo, const Point& hi) {
    if (lo.size() != 2 || hi.size() != 2) throw std::invalid_argument("rectangle corners must be points in R^2");
    if (!(lo.array() < hi.array()).all()) throw std::invalid_argument("degenerate rectangle: need lo < hi componentwise");
}

std::vector<double> to_vec(const Point& p) { return {p.data(), p.data() + p.size()}; }

Point from_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

ConstraintSet ConstraintSet::finite(PointSet points) {
    if (points.empty()) throw std::invalid_argument("finite constraint set needs at least one point");
    const auto d = points.front().size();
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("finite constraint set mixes point dimensions");
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points) pts.push_back(to_vec(p));
    nlohmann::json desc{{"variant", "finite"}, {"params", {{"points", pts}}}};
    return {FinitePoints{std::move(points)}, static_cast<int>(d), std::move(desc)};
}

ConstraintSet ConstraintSet::polyline(const PointSet& vertices, bool closed, double param_begin, double param_end) {
    if (vertices.size() < 2) throw std::invalid_argument("a path needs at least two vertices");
    if (!(param_begin < param_end)) throw std::invalid_argument("empty parameter interval");
    const auto d = vertices.front().size();
    const std::size_t n_seg = closed ? vertices.size() : vertices.size() - 1;
    std::vector<double> lengths(n_seg);
    for (std::size_t i = 0; i < n_seg; ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % vertices.size()];
        if (a.size() != d || b.size() != d) throw std::invalid_argument("path vertices mix dimensions");
        lengths[i] = (b - a).norm();
        if (!(lengths[i] > 0.0)) throw std::invalid_argument("path has a zero-length segment");
    }
    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    ParameterizedPath path{{}, param_begin, param_end};
    double acc = 0.0;
    for (std::size_t i = 0; i < n_seg; ++i) {
        const double b = param_begin + (param_end - param_begin) * acc / total;
        acc += lengths[i];
        const double e = i + 1 == n_seg ? param_end : param_begin + (param_end - param_begin) * acc / total;
        path.segments.push_back({b, e, vertices[i], vertices[(i + 1) % vertices.size()]});
    }
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : vertices) verts.push_back(to_vec(v));
    nlohmann::json desc{{"variant", "polyline"},
                        {"params",
                         {{"vertices", verts}, {"closed", closed}, {"param_begin", param_begin}, {"param_end", param_end}}}};
    return {std::move(path), static_cast<int>(d), std::move(desc)};
}

Point ConstraintSet::embed(double param) const {
    const auto& p = path();
    if (param < p.param_begin || param >= p.param_end)
        throw std::out_of_range("path parameter outside [" + std::to_string(p.param_begin) + ", " +
                                std::to_string(p.param_end) + ")");
    for (const auto& seg : p.segments)
        if (param < seg.param_end) return seg.at(param);
    return p.segments.back().at(param);
}

double ConstraintSet::measure() const {
    if (is_finite()) return static_cast<double>(points().size());
    double total = 0.0;
    for (const auto& seg : path().segments) total += seg.length();
    return total;
}

const ParameterizedPath& ConstraintSet::path() const {
    if (const auto* p = std::get_if<ParameterizedPath>(&variant_)) return *p;
    throw std::logic_error("constraint set is a finite point set, not a path");
}

const PointSet& ConstraintSet::points() const {
    if (const auto* p = std::get_if<FinitePoints>(&variant_)) return p->points;
    throw std::logic_error("constraint set is a path, not a finite point set");
}

nlohmann::json ConstraintSet::to_json() const { return description_; }

ConstraintSet ConstraintSet::from_json(const nlohmann::json& j) {
    const auto variant = j.at("variant").get<std::string>();
    const auto& p = j.contains("params") ? j.at("params") : nlohmann::json::object();
    auto corner = [&](const char* key, double fallback) {
        return p.contains(key) ? from_vec(p.at(key).get<std::vector<double>>()) : make_point({fallback, fallback});
    };
    if (variant == "rect_boundary") return rect_boundary(corner("lo", -1.0), corner("hi", 1.0));
    if (variant == "diagonal") return diagonal(corner("lo", -1.0), corner("hi", 1.0));
    if (variant == "interval") return interval(p.value("lo", -1.0), p.value("hi", 1.0));
    if (variant == "finite") {
        PointSet pts;
        for (const auto& v : p.at("points")) pts.push_back(from_vec(v.get<std::vector<double>>()));
        return finite(std::move(pts));
    }
    if (variant == "polyline") {
        PointSet verts;
        for (const auto& v : p.at("vertices")) verts.push_back(from_vec(v.get<std::vector<double>>()));
        return polyline(verts, p.value("closed", false), p.value("param_begin", -1.0), p.value("param_end", 1.0));
    }
    throw std::invalid_argument("unknown constraint set variant '" + variant + "'");
}

ConstraintSet rect_boundary(const Point& lo, const Point& hi) {
    check_box(lo, hi);
    auto set = ConstraintSet::polyline(
        {make_point({lo(0), lo(1)}), make_point({hi(0), lo(1)}), make_point({hi(0), hi(1)}), make_point({lo(0), hi(1)})},
        true, -1.0, 1.0);
    set.description_ = {{"variant", "rect_boundary"}, {"params", {{"lo", to_vec(lo)}, {"hi", to_vec(hi)}}}};
    return set;
}

ConstraintSet diagonal(const Point& lo, const Point& hi) {
    check_box(lo, hi);
    auto set = ConstraintSet::polyline({lo, hi}, false, -1.0, 1.0);
    set.description_ = {{"variant", "diagonal"}, {"params", {{"lo", to_vec(lo)}, {"hi", to_vec(hi)}}}};
    return set;
}

ConstraintSet interval(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("degenerate interval");
    auto set = ConstraintSet::polyline({make_point({lo}), make_point({hi})}, false, lo, hi);
    set.description_ = {{"variant", "interval"}, {"params", {{"lo", lo}, {"hi", hi}}}};
    return set;
}

double QuadratureRule::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

Eigen::VectorXd QuadratureRule::weight_vector() const {
    return Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

double QuadratureRule::integrate(const ScalarField& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * f(ambient_nodes[i]);
    return acc;
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    if (n == 1) {
        weights[0] = 2.0;
        return;
    }
    const auto nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p_prev = 1.0, p = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const auto kd = static_cast<double>(k);
                const double next = ((2.0 * kd - 1.0) * x * p - (kd - 1.0) * p_prev) / kd;
                p_prev = p;
                p = next;
            }
            dp = nd * (x * p - p_prev) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

QuadratureRule quadrature(const ConstraintSet& set, std::size_t n_nodes, QuadratureKind rule) {
    QuadratureRule q;
    if (set.is_finite()) {
        const auto& pts = set.points();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            q.nodes.push_back(static_cast<double>(i));
            q.weights.push_back(1.0);
            q.ambient_nodes.push_back(pts[i]);
        }
        return q;
    }

    const auto& segs = set.path().segments;
    if (n_nodes < segs.size())
        throw std::invalid_argument("quadrature on a path with " + std::to_string(segs.size()) +
                                    " segments needs at least that many nodes");
    const double total = set.measure();

    // one node per segment, the rest by largest remainder of the arclength share
    std::vector<std::size_t> counts(segs.size(), 1);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = segs.size();
    const double spare = static_cast<double>(n_nodes - segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const double share = spare * segs[i].length() / total;
        const auto whole = static_cast<std::size_t>(std::floor(share + 1e-12));
        counts[i] += whole;
        assigned += whole;
        remainders.emplace_back(share - static_cast<double>(whole), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first + 1e-12; });
    for (std::size_t r = 0; assigned < n_nodes; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];

    std::vector<double> gl_nodes, gl_weights;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& seg = segs[i];
        const std::size_t c = counts[i];
        const double plen = seg.param_end - seg.param_begin;
        if (rule == QuadratureKind::Midpoint) {
            for (std::size_t j = 0; j < c; ++j) {
                const double param = seg.param_begin + (static_cast<double>(j) + 0.5) * plen / static_cast<double>(c);
                q.nodes.push_back(param);
                q.weights.push_back(seg.length() / static_cast<double>(c));
                q.ambient_nodes.push_back(seg.at(param));
            }
        } else {
            gauss_legendre(c, gl_nodes, gl_weights);
            for (std::size_t j = 0; j < c; ++j) {
                const double param = seg.param_begin + 0.5 * (gl_nodes[j] + 1.0) * plen;
                q.nodes.push_back(param);
                q.weights.push_back(0.5 * gl_weights[j] * seg.length());
                q.ambient_nodes.push_back(seg.at(param));
            }
        }
    }
    return q;
}

PointSet latin_hypercube(std::size_t count, int dimension, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("latin hypercube needs at least one point");
    if (dimension < 1) throw std::invalid_argument("latin hypercube dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointSet out(count, Point::Zero(dimension));
    std::vector<std::size_t> strata(count);
    const double width = 2.0 / static_cast<double>(count);
    for (int d = 0; d < dimension; ++d) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        for (std::size_t i = 0; i < count; ++i) {
            const double lo = -1.0 + width * static_cast<double>(strata[i]);
            const double x = lo + width * unit(rng);
            out[i](d) = std::min(x, std::nextafter(lo + width, lo));
        }
    }
    return out;
}

PointSet linspace_1d(double lo, double hi, std::size_t count) {
    PointSet out;
    if (count == 1) {
        out.push_back(make_point({0.5 * (lo + hi)}));
        return out;
    }
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(make_point({lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)}));
    return out;
}

}  // namespace gpb
