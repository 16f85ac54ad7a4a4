#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gpb::cli {

namespace {

using Backend = RkhsForm::Backend;

std::vector<double> to_vec(const Point& p) { return {p.data(), p.data() + p.size()}; }

Point from_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const Point& unit_lo() {
    static const Point p = make_point({-1.0, -1.0});
    return p;
}

const Point& unit_hi() {
    static const Point p = make_point({1.0, 1.0});
    return p;
}

std::vector<ErrorRow> run_error_grid(const ExperimentConfig& config, const ConstraintSet& t0, const ScalarField& f,
                                     const PointSet& test_set) {
    std::vector<ErrorRow> rows;
    for (const auto& backend : config.backends)
        for (std::size_t n : config.nodes)
            rows.push_back({"", backend.label(), n,
                            constrained_prediction_error(config.kernel, t0, f, backend, n, config.quadrature_nodes,
                                                         config.truncation, config.m_points, config.seed, test_set)});
    return rows;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

std::string BackendSpec::label() const {
    switch (backend) {
        case Backend::Interpolation: return "interpolation";
        case Backend::Spectral: return "spectral";
        case Backend::Nugget: return "nugget";
        case Backend::SumKernel: return "sum_kernel";
    }
    return "unknown";
}

nlohmann::json BackendSpec::to_json() const {
    nlohmann::json j{{"type", label()}};
    if (backend == Backend::Nugget || (backend == Backend::SumKernel && sigma2 != 0.0)) j["sigma2"] = sigma2;
    if (correlated) j["q"] = correlated->to_json();
    return j;
}

BackendSpec BackendSpec::from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse(j.get<std::string>());
    BackendSpec spec = parse(j.at("type").get<std::string>());
    spec.sigma2 = j.value("sigma2", spec.backend == Backend::Nugget ? 1e-4 : 0.0);
    if (j.contains("q")) spec.correlated = Kernel::from_json(j.at("q"));
    if (spec.backend == Backend::SumKernel && !spec.correlated)
        throw ConfigError("backend sum_kernel needs a \"q\" kernel");
    if (spec.sigma2 < 0.0) throw ConfigError("backend sigma2 must be nonnegative");
    return spec;
}

BackendSpec BackendSpec::parse(const std::string& name) {
    if (name == "interpolation") return {Backend::Interpolation, 0.0, std::nullopt};
    if (name == "spectral") return {Backend::Spectral, 0.0, std::nullopt};
    if (name == "nugget") return {Backend::Nugget, 1e-4, std::nullopt};
    if (name == "sum_kernel") return {Backend::SumKernel, 0.0, std::nullopt};
    throw ConfigError("unknown backend '" + name + "' (expected interpolation, spectral, nugget, sum_kernel)");
}

// ---------------------------------------------------------------------------

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["kernel"] = kernel.to_json();
    j["backends"] = nlohmann::json::array();
    for (const auto& b : backends) j["backends"].push_back(b.to_json());
    j["nodes"] = nodes;
    j["quadrature_nodes"] = quadrature_nodes;
    j["m_points"] = m_points;
    j["seed"] = seed;
    j["out"] = out;
    j["test_grid"] = test_grid;
    j["interpolation_points"] = interpolation_points;
    j["truncation"] = truncation;
    if (constraint) j["constraint"] = constraint->to_json();
    j["constraint_function"] = constraint_function;
    if (probes_on_nodes) {
        j["probes"] = "nodes";
    } else if (probes) {
        j["probes"] = nlohmann::json::array();
        for (const auto& p : *probes) j["probes"].push_back(to_vec(p));
    }
    j["dat"] = write_dat;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
        c.experiment = j.value("experiment", c.experiment);
        if (j.contains("kernel")) c.kernel = Kernel::from_json(j.at("kernel"));
        if (j.contains("backends")) {
            c.backends.clear();
            for (const auto& b : j.at("backends")) c.backends.push_back(BackendSpec::from_json(b));
        } else if (j.contains("backend")) {
            c.backends = {BackendSpec::from_json(j.at("backend"))};
        }
        if (j.contains("nodes")) {
            const auto& n = j.at("nodes");
            c.nodes = n.is_array() ? n.get<std::vector<std::size_t>>() : std::vector<std::size_t>{n.get<std::size_t>()};
        }
        c.quadrature_nodes = j.value("quadrature_nodes", c.quadrature_nodes);
        c.m_points = j.value("m_points", c.m_points);
        c.seed = j.value("seed", c.seed);
        c.out = j.value("out", c.out);
        c.test_grid = j.value("test_grid", c.test_grid);
        c.interpolation_points = j.value("interpolation_points", c.interpolation_points);
        c.truncation = j.value("truncation", c.truncation);
        if (j.contains("constraint")) c.constraint = ConstraintSet::from_json(j.at("constraint"));
        if (j.contains("constraint_function")) c.constraint_function = j.at("constraint_function");
        if (j.contains("probes")) {
            const auto& p = j.at("probes");
            if (p.is_string()) {
                if (p.get<std::string>() != "nodes") throw ConfigError("probes must be a list of points or \"nodes\"");
                c.probes_on_nodes = true;
            } else {
                PointSet pts;
                for (const auto& v : p) pts.push_back(from_vec(v.get<std::vector<double>>()));
                c.probes = std::move(pts);
            }
        }
        c.write_dat = j.value("dat", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what());
    }
    return from_json(j);
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> known{"reproduce", "boundary", "diagonal", "eig", "condition"};
    if (std::find(known.begin(), known.end(), experiment) == known.end())
        throw ConfigError("unknown experiment '" + experiment + "'");
    if (backends.empty()) throw ConfigError("at least one backend is required");
    if (nodes.empty()) throw ConfigError("at least one node count is required");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == 0 && i != 0) throw ConfigError("node count 0 (no constraint) may only appear first");
        if (i > 0 && nodes[i] <= nodes[i - 1]) throw ConfigError("node counts must be strictly ascending");
    }
    if (quadrature_nodes == 0) throw ConfigError("quadrature_nodes must be positive");
    if (test_grid == 0) throw ConfigError("test_grid must be positive");
    if (!(truncation >= 0.0 && truncation < 1.0)) throw ConfigError("truncation must lie in [0, 1)");
    if (experiment == "boundary" || experiment == "diagonal") {
        if (kernel.dimension() != 2) throw ConfigError(experiment + " experiment needs a 2-D kernel");
    }
    if (experiment == "reproduce") {
        if (kernel.dimension() != 1) throw ConfigError("reproduce experiment needs a 1-D kernel");
        if (interpolation_points < 2) throw ConfigError("interpolation_points must be at least 2");
    }
    if ((experiment == "eig" || experiment == "condition") && !constraint)
        throw ConfigError(experiment + " needs a \"constraint\" set");
    if (constraint && constraint->ambient_dimension() != kernel.dimension())
        throw ConfigError("constraint set and kernel dimensions differ");
}

// ---------------------------------------------------------------------------

double boundary_test_function(const Point& t) {
    const double pi = std::numbers::pi;
    return 0.5 * std::exp(0.2 * (t(0) - 0.5) * (t(0) - 0.5)) * std::sin(pi * t(0) / 2.0) +
           std::exp(-t(1) * t(1)) * std::cos(pi * t(1) / 2.0);
}

double diagonal_test_function(const Point& t) {
    const double pi = std::numbers::pi;
    return t(1) * std::sqrt(1.0 + t(0)) * std::cos(pi * t(1)) * std::sin(pi * (t(0) - t(1)) / 2.0 + 1.0) *
           std::exp(0.5 * (t(0) + t(1)) * (t(0) + t(1)));
}

PointSet boundary_test_set(std::size_t count) {
    const auto boundary = rect_boundary(unit_lo(), unit_hi());
    PointSet out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(0.9 * boundary.embed(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(count)));
    return out;
}

PointSet diagonal_test_set(std::size_t count) {
    PointSet out;
    for (double offset : {-0.1, 0.1})
        for (const auto& t : linspace_1d(-1.0, 1.0, count)) {
            const double u = t(0), v = t(0) + offset;
            if (v >= -1.0 && v <= 1.0) out.push_back(make_point({u, v}));
        }
    return out;
}

ScalarField constraint_function_from_json(const nlohmann::json& j) {
    const auto type = j.value("type", std::string("zero"));
    if (type == "zero") return [](const Point&) { return 0.0; };
    if (type == "constant") {
        const double v = j.value("value", 0.0);
        return [v](const Point&) { return v; };
    }
    if (type == "boundary_test") return boundary_test_function;
    if (type == "diagonal_test") return diagonal_test_function;
    throw ConfigError("unknown constraint function '" + type + "'");
}

FormSpec form_spec(const BackendSpec& backend, std::size_t basis_count, std::size_t quadrature_nodes,
                   double truncation) {
    FormSpec spec;
    spec.backend = backend.backend;
    spec.truncation = truncation;
    spec.correlated = backend.correlated;
    spec.nugget = backend.backend == Backend::Spectral ? 0.0 : backend.sigma2;
    if (backend.backend == Backend::Interpolation) {
        spec.nodes = basis_count;
    } else {
        spec.nodes = quadrature_nodes;
        spec.retained = basis_count;
    }
    return spec;
}

double constrained_prediction_error(const Kernel& kernel, const ConstraintSet& t0, const ScalarField& f,
                                    const BackendSpec& backend, std::size_t basis_count,
                                    std::size_t quadrature_nodes, double truncation, std::size_t m_points,
                                    std::uint64_t seed, const PointSet& test_set) {
    const GP prior(kernel);
    std::shared_ptr<const Process> base;
    if (basis_count == 0)
        base = std::make_shared<const GP>(prior);
    else
        base = std::make_shared<const ConstrainedGP>(
            constrain(prior, t0, f, form_spec(backend, basis_count, quadrature_nodes, truncation)));

    PointSet obs;
    if (m_points > 0) obs = latin_hypercube(m_points, kernel.dimension(), seed);
    const PredictiveGP predictive = posterior(base, obs, evaluate(f, obs));
    const Eigen::VectorXd predicted = predictive.mean(test_set);
    double worst = 0.0;
    for (std::size_t i = 0; i < test_set.size(); ++i)
        worst = std::max(worst, std::abs(f(test_set[i]) - predicted(static_cast<Eigen::Index>(i))));
    return worst;
}

std::vector<ErrorRow> run_reproduce(const ExperimentConfig& config) {
    const auto data = random_interpolation_data(config.interpolation_points, config.seed);
    const Interpolant f1 = interpolant_build(data, InterpolantBasis::KernelSections, config.kernel);
    const Interpolant f2 = interpolant_build(data, InterpolantBasis::Polynomial);
    const auto t0 = interval(-1.0, 1.0);
    const auto test_points = linspace_1d(-1.0, 1.0, config.test_grid);

    std::vector<ErrorRow> rows;
    for (const auto& [name, fn] : {std::pair{"f1", &f1}, std::pair{"f2", &f2}}) {
        const ScalarField field = fn->as_field();
        for (const auto& backend : config.backends)
            for (std::size_t n : config.nodes) {
                if (n == 0) {
                    double worst = 0.0;
                    for (const auto& t : test_points) worst = std::max(worst, std::abs(field(t)));
                    rows.push_back({name, backend.label(), 0, worst});
                    continue;
                }
                const auto form = build_form(config.kernel, t0,
                                             form_spec(backend, n, config.quadrature_nodes, config.truncation));
                rows.push_back({name, backend.label(), n, reproduce_check(form, field, test_points).max_error});
            }
    }
    return rows;
}

std::vector<ErrorRow> run_boundary(const ExperimentConfig& config) {
    return run_error_grid(config, rect_boundary(unit_lo(), unit_hi()), boundary_test_function,
                          boundary_test_set(config.test_grid));
}

std::vector<ErrorRow> run_diagonal(const ExperimentConfig& config) {
    return run_error_grid(config, diagonal(unit_lo(), unit_hi()), diagonal_test_function,
                          diagonal_test_set(config.test_grid));
}

SpectralBasis run_eig(const ExperimentConfig& config) {
    return nystrom_eig(config.kernel, quadrature(*config.constraint, config.quadrature_nodes), config.truncation);
}

std::vector<PredictionRow> run_condition(const ExperimentConfig& config) {
    const GP prior(config.kernel);
    const auto g = constraint_function_from_json(config.constraint_function);
    const auto cgp = constrain(prior, *config.constraint, g,
                               form_spec(config.backends.front(), config.nodes.back(), config.quadrature_nodes,
                                         config.truncation));
    PointSet probes;
    if (config.probes_on_nodes) {
        probes = cgp.form().nodes();
    } else if (config.probes) {
        probes = *config.probes;
    } else if (config.kernel.dimension() == 1) {
        probes = linspace_1d(-1.0, 1.0, 21);
    } else {
        for (const auto& y : linspace_1d(-1.0, 1.0, 11))
            for (const auto& x : linspace_1d(-1.0, 1.0, 11)) {
                Point p = Point::Zero(config.kernel.dimension());
                p(0) = x(0);
                p(1) = y(0);
                probes.push_back(p);
            }
    }
    std::vector<PredictionRow> rows;
    const Eigen::VectorXd mean = cgp.mean(probes);
    for (std::size_t i = 0; i < probes.size(); ++i)
        rows.push_back({probes[i], mean(static_cast<Eigen::Index>(i)), cgp.cov(probes[i], probes[i])});
    return rows;
}

// ---------------------------------------------------------------------------

void write_error_csv(std::ostream& out, const std::vector<ErrorRow>& rows, bool with_function) {
    out << (with_function ? "function,backend,N,max_error\n" : "backend,N,max_error\n");
    for (const auto& r : rows) {
        if (with_function) out << r.function << ',';
        out << r.backend << ',' << r.basis_count << ',' << format_double(r.max_error) << '\n';
    }
}

void write_prediction_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
    const auto d = rows.empty() ? 0 : rows.front().probe.size();
    for (Eigen::Index i = 0; i < d; ++i) out << 'x' << i << ',';
    out << "mean,variance\n";
    for (const auto& r : rows) {
        for (Eigen::Index i = 0; i < d; ++i) out << format_double(r.probe(i)) << ',';
        out << format_double(r.mean) << ',' << format_double(r.variance) << '\n';
    }
}

std::string csv_to_dat(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        out << (header ? "# " : "") << line << '\n';
        header = false;
    }
    return out.str();
}

}  // namespace gpb::cli
