// gpb: runs the constrained-GP experiments and inspection commands, writing CSV.

#include "experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr const char* kColumns = R"(CSV columns:
  reproduce            function,backend,N,max_error
  boundary, diagonal   backend,N,max_error
  eig                  index,eigenvalue,node_0,...,node_{m-1}
  condition            x0,...,x{d-1},mean,variance

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
GPB_SEED in the environment overrides the config seed; --seed overrides both.)";

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct Overrides {
    std::string config_path;
    std::string experiment;
    std::string kernel;
    std::string backend;
    std::string nodes;
    std::optional<std::size_t> m_points;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool dat = false;
};

gpb::cli::ExperimentConfig load(const std::string& subcommand, const Overrides& o) {
    using gpb::cli::ConfigError;
    gpb::cli::ExperimentConfig config;
    if (subcommand == "reproduce") {
        config.kernel = gpb::Kernel::squared_exponential(1);
        config.nodes = {5, 10, 20, 40};
    }
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("cannot open config file '" + o.config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        config = gpb::cli::ExperimentConfig::parse(buf.str());
    }
    if (!o.experiment.empty() && o.experiment != subcommand)
        throw ConfigError("--experiment " + o.experiment + " conflicts with subcommand " + subcommand);
    config.experiment = subcommand;
    try {
        if (!o.kernel.empty()) config.kernel = gpb::Kernel::from_json(nlohmann::json::parse(o.kernel));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("--kernel: ") + e.what());
    }
    if (!o.backend.empty()) {
        config.backends.clear();
        for (const auto& name : split(o.backend)) config.backends.push_back(gpb::cli::BackendSpec::parse(name));
    }
    if (!o.nodes.empty()) {
        config.nodes.clear();
        try {
            for (const auto& n : split(o.nodes)) config.nodes.push_back(std::stoul(n));
        } catch (const std::exception&) {
            throw ConfigError("--nodes expects a comma-separated list of integers");
        }
    }
    if (o.m_points) config.m_points = *o.m_points;
    if (const char* env = std::getenv("GPB_SEED")) {
        try {
            config.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("GPB_SEED is not an integer: ") + env);
        }
    }
    if (o.seed) config.seed = *o.seed;
    if (!o.out.empty()) config.out = o.out;
    if (o.dat) config.write_dat = true;
    config.validate();
    return config;
}

std::string run(const gpb::cli::ExperimentConfig& config) {
    using namespace gpb::cli;
    std::ostringstream csv;
    if (config.experiment == "reproduce")
        write_error_csv(csv, run_reproduce(config), true);
    else if (config.experiment == "boundary")
        write_error_csv(csv, run_boundary(config), false);
    else if (config.experiment == "diagonal")
        write_error_csv(csv, run_diagonal(config), false);
    else if (config.experiment == "eig")
        gpb::write_eigen_csv(csv, run_eig(config));
    else
        write_prediction_csv(csv, run_condition(config));
    return csv.str();
}

void emit(const gpb::cli::ExperimentConfig& config, const std::string& csv) {
    if (config.out.empty() || config.out == "-") {
        std::cout << csv;
        if (config.write_dat) std::cout << '\n' << gpb::cli::csv_to_dat(csv);
        return;
    }
    std::ofstream out(config.out, std::ios::binary);
    if (!out) throw gpb::cli::ConfigError("cannot write '" + config.out + "'");
    out << csv;
    if (config.write_dat) {
        std::ofstream dat(std::filesystem::path(config.out).replace_extension(".dat"), std::ios::binary);
        dat << gpb::cli::csv_to_dat(csv);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian processes conditioned on values over curves and boundaries", "gpb"};
    app.footer(kColumns);
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config file");
        sub->add_option("--experiment", o.experiment, "Must match the subcommand when given");
        sub->add_option("--kernel", o.kernel, R"(Kernel JSON, e.g. {"family":"squared_exponential","params":{"dimension":2}})");
        sub->add_option("--backend", o.backend, "Comma-separated: interpolation,spectral,nugget,sum_kernel");
        sub->add_option("--nodes", o.nodes, "Comma-separated basis counts N");
        sub->add_option("--m-points", o.m_points, "Interior Latin-hypercube observations M");
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--out", o.out, "Output CSV path (stdout if omitted)");
        sub->add_flag("--dat", o.dat, "Also write a whitespace-separated .dat mirror");
    };
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"reproduce", "Reproducing-property errors for kernel and polynomial interpolants"},
             {"boundary", "Prediction error with values known on the boundary of [-1,1]^2"},
             {"diagonal", "Prediction error with values known on the diagonal of [-1,1]^2"},
             {"eig", "Nystroem eigenpairs of the kernel on a constraint set"},
             {"condition", "Constrained mean and variance at probe points"}})
        add_common(app.add_subcommand(name, help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        const auto config = load(subcommand, o);
        emit(config, run(config));
    } catch (const gpb::cli::ConfigError& e) {
        std::cerr << "gpb: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gpb: " << e.what() << '\n';
        return 1;
    } catch (const gpb::NumericalError& e) {
        std::cerr << "gpb: numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "gpb: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
