#pragma once

#include <gpb/conditioning.hpp>
#include <gpb/domain.hpp>
#include <gpb/kernel.hpp>
#include <gpb/spectral.hpp>
#include <gpb/verify.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gpb::cli {

/// Thrown for malformed or inconsistent configuration (exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One way of discretizing the H(T0) inner product, as named in configs:
/// "interpolation", "spectral", "nugget" (with sigma2), "sum_kernel" (with q).
struct BackendSpec {
    RkhsForm::Backend backend = RkhsForm::Backend::Spectral;
    double sigma2 = 0.0;
    std::optional<Kernel> correlated;

    std::string label() const;
    nlohmann::json to_json() const;
    static BackendSpec from_json(const nlohmann::json& j);
    static BackendSpec parse(const std::string& name);
};

struct ExperimentConfig {
    std::string experiment = "boundary";
    Kernel kernel = Kernel::squared_exponential(2);
    std::vector<BackendSpec> backends{BackendSpec{RkhsForm::Backend::Interpolation, 0.0, std::nullopt},
                                      BackendSpec{RkhsForm::Backend::Spectral, 0.0, std::nullopt}};
    /// Basis counts N: interpolation node count, or retained eigenpairs at a
    /// fixed spectral quadrature resolution. N = 0 means "no constraint".
    std::vector<std::size_t> nodes{5, 10, 20, 40, 60};
    std::size_t quadrature_nodes = 64;
    std::size_t m_points = 10;
    std::uint64_t seed = 1;
    std::string out;
    std::size_t test_grid = 200;
    std::size_t interpolation_points = 6;
    double truncation = kDefaultTruncation;
    /// eig / condition only
    std::optional<ConstraintSet> constraint;
    nlohmann::json constraint_function = {{"type", "zero"}};
    std::optional<PointSet> probes;
    bool probes_on_nodes = false;
    bool write_dat = false;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// Parses a JSON document; syntax errors report line and column.
    static ExperimentConfig parse(const std::string& text);

    bool operator==(const ExperimentConfig& other) const { return to_json() == other.to_json(); }
    void validate() const;
};

/// f(t1, t2) = 0.5 e^{0.2 (t1 - 0.5)^2} sin(pi t1 / 2) + e^{-t2^2} cos(pi t2 / 2)
double boundary_test_function(const Point& t);
/// f(t1, t2) = t2 sqrt(1 + t1) cos(pi t2) sin(pi (t1 - t2) / 2 + 1) e^{0.5 (t1 + t2)^2}
double diagonal_test_function(const Point& t);

/// {(0.9 t, 0.9 s) : (t, s) on the boundary of [-1,1]^2} at `count` equispaced path parameters.
PointSet boundary_test_set(std::size_t count = 200);
/// [-1,1]^2 intersected with the lines t -> (t, t +/- 0.1), `count` equispaced t per line.
PointSet diagonal_test_set(std::size_t count = 200);

/// Constraint function by name: zero, constant, boundary_test, diagonal_test.
ScalarField constraint_function_from_json(const nlohmann::json& j);

FormSpec form_spec(const BackendSpec& backend, std::size_t basis_count, std::size_t quadrature_nodes,
                   double truncation);

struct ErrorRow {
    std::string function;  ///< empty except for the reproduce experiment
    std::string backend;
    std::size_t basis_count = 0;
    double max_error = 0.0;
};

/// Max error over a test set of the posterior given the constraint on T0 and M
/// Latin-hypercube interior observations of f. basis_count = 0 skips the constraint.
double constrained_prediction_error(const Kernel& kernel, const ConstraintSet& t0, const ScalarField& f,
                                    const BackendSpec& backend, std::size_t basis_count,
                                    std::size_t quadrature_nodes, double truncation, std::size_t m_points,
                                    std::uint64_t seed, const PointSet& test_set);

std::vector<ErrorRow> run_reproduce(const ExperimentConfig& config);
std::vector<ErrorRow> run_boundary(const ExperimentConfig& config);
std::vector<ErrorRow> run_diagonal(const ExperimentConfig& config);
SpectralBasis run_eig(const ExperimentConfig& config);

struct PredictionRow {
    Point probe;
    double mean;
    double variance;
};
std::vector<PredictionRow> run_condition(const ExperimentConfig& config);

void write_error_csv(std::ostream& out, const std::vector<ErrorRow>& rows, bool with_function);
void write_prediction_csv(std::ostream& out, const std::vector<PredictionRow>& rows);
/// Whitespace-separated mirror of a CSV document with a '#' header line.
std::string csv_to_dat(const std::string& csv);

std::string format_double(double v);

}  // namespace gpb::cli
