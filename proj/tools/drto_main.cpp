#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "drto/config.hpp"
#include "drto/io.hpp"
#include "drto/oracle.hpp"
#include "drto/setup.hpp"

namespace {

int cmd_optimize(const std::string& config_path) {
    const drto::RunConfig cfg = drto::parse_config_file(config_path);
    drto::ProblemInstance inst = drto::build_instance(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    drto::ConvergenceLog log;
    inst.optimizer.on_row = [&log](const drto::LogRow& row) {
        log.push_back(row);
        if (row.iter % 10 == 0)
            std::printf("iter %4llu  objective %.6g  volume %.6g  lambda %.4g\n",
                        static_cast<unsigned long long>(row.iter), row.objective, row.volume,
                        row.lambda);
    };

    const std::string stem = cfg.output_dir + "/" + cfg.preset + "_" +
                             drto::to_string(cfg.formulation);
    try {
        drto::RunResult result = drto::run(inst.problem, inst.initial, inst.optimizer);
        const std::vector<double> physical =
            inst.filter ? inst.filter->apply(result.state.h) : result.state.h;
        drto::write_log_csv(result.log, stem + "_log.csv");
        drto::write_density_pgm(drto::DensityField(physical), inst.preset.grid,
                                stem + ".pgm");
        if (cfg.write_vtk)
            drto::write_field_vtk({{"density", physical}, {"design", result.state.h}},
                                  inst.preset.grid, stem + ".vtk");
        std::printf("done: %s_log.csv, %s.pgm\n", stem.c_str(), stem.c_str());
        return 0;
    } catch (const std::exception& ex) {
        // flush whatever was logged before the failure
        if (!log.empty()) drto::write_log_csv(log, stem + "_log.csv");
        std::fprintf(stderr, "optimize failed: %s\n", ex.what());
        return 1;
    }
}

int cmd_evaluate(const std::string& config_path, const std::string& design_path,
                 const std::vector<std::string>& xi_specs) {
    const drto::RunConfig cfg = drto::parse_config_file(config_path);
    const drto::ProblemInstance inst = drto::build_instance(cfg);
    std::vector<double> design = drto::read_density(design_path);
    if (static_cast<int>(design.size()) != inst.preset.grid.num_elements())
        throw std::runtime_error("design size does not match the configured grid");

    // stored densities are the physical field: evaluate without re-filtering
    std::shared_ptr<drto::CostOracle> cost;
    if (inst.preset.target_displacement) {
        cost = std::make_shared<drto::TargetDisplacementCost>(
            inst.preset, inst.mat, nullptr, inst.kl_basis, drto::ModulusTransform{},
            cfg.penalty_volume, cfg.penalty_compliance);
    } else {
        cost = std::make_shared<drto::FemComplianceCost>(inst.preset, inst.mat, nullptr);
    }

    std::printf("xi,cost\n");
    for (const auto& spec : xi_specs) {
        std::vector<double> xi;
        std::string token;
        std::istringstream ss(spec);
        while (std::getline(ss, token, ',')) xi.push_back(std::stod(token));
        if (static_cast<int>(xi.size()) != inst.preset.parameter_dim)
            throw std::runtime_error("xi has dimension " + std::to_string(xi.size()) +
                                     ", expected " +
                                     std::to_string(inst.preset.parameter_dim));
        const double c = cost->value(design, xi);
        std::string xs;
        for (size_t i = 0; i < xi.size(); ++i)
            xs += (i ? ";" : "") + std::to_string(xi[i]);
        std::printf("%s,%.10g\n", xs.c_str(), c);
    }
    return 0;
}

int cmd_echo(const std::string& config_path) {
    const drto::RunConfig cfg = drto::parse_config_file(config_path);
    std::fputs(drto::serialize_config(cfg).c_str(), stdout);
    return 0;
}

int run_oracle_suite(const std::string& name);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributionally robust topology optimization"};
    app.require_subcommand(1);

    std::string config_path, design_path, suite;
    std::vector<std::string> xi_specs;

    auto* optimize = app.add_subcommand("optimize", "run a configured optimization");
    optimize->add_option("config", config_path, "config file")->required();

    auto* evaluate =
        app.add_subcommand("evaluate", "out-of-sample costs of a stored design");
    evaluate->add_option("config", config_path, "config file")->required();
    evaluate->add_option("--design", design_path, "density file (.vtk or .pgm)")->required();
    evaluate->add_option("--xi", xi_specs, "comma-separated load vector (repeatable)")
        ->required();

    auto* echo = app.add_subcommand("echo", "parse a config and print its canonical form");
    echo->add_option("config", config_path, "config file")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "run a brute-force verification suite");
    oracle_cmd->add_option("--suite", suite, "wasserstein | moment | cvar")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*optimize) return cmd_optimize(config_path);
        if (*evaluate) return cmd_evaluate(config_path, design_path, xi_specs);
        if (*echo) return cmd_echo(config_path);
        if (*oracle_cmd) return run_oracle_suite(suite);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}

namespace {

int run_oracle_suite(const std::string& name) {
    using namespace drto;
    int failures = 0;
    auto check = [&](const std::string& label, bool ok) {
        std::printf("%-60s %s\n", label.c_str(), ok ? "PASS" : "FAIL");
        if (!ok) ++failures;
    };

    if (name == "wasserstein" || name == "all") {
        const int n = 4001;
        std::vector<double> grid(n), f(n);
        for (int q = 0; q < n; ++q) {
            grid[static_cast<size_t>(q)] = -3.0 + 6.0 * q / (n - 1);
            f[static_cast<size_t>(q)] = grid[static_cast<size_t>(q)] * grid[static_cast<size_t>(q)];
        }
        WassersteinConfig cfg;
        cfg.m = 0.5;
        cfg.eps = 0.01;
        cfg.kernel = {0.1, ParameterSpace::ball(1, 3.0)};
        const NominalLaw law = NominalLaw::dirac({0.5});
        const auto primal = oracle::primal_sup_wasserstein_1d(f, grid, cfg, law);
        double best = 1e300;
        for (int s = 0; s < 64; ++s) {
            const double lam = std::pow(10.0, -2.0 + 3.0 * s / 63.0);
            best = std::min(best,
                            wasserstein_dual_value_quadrature(f, grid, lam, cfg, law));
        }
        const double gap = std::abs(best - primal.value) / std::abs(primal.value);
        check("wasserstein strong duality (quadratic f, m=0.5)", gap < 0.01);
        check("wasserstein complementary slackness",
              std::abs(primal.transport_cost - cfg.m) <= 1e-3 * (1.0 + cfg.m));
    }
    if (name == "moment" || name == "all") {
        const int n = 2001;
        std::vector<double> grid(n), f(n);
        for (int q = 0; q < n; ++q) {
            grid[static_cast<size_t>(q)] = -6.0 + 12.0 * q / (n - 1);
            f[static_cast<size_t>(q)] = grid[static_cast<size_t>(q)];
        }
        MomentConfig cfg;
        cfg.mu0 = {0.0};
        cfg.sigma0 = {{1.0}};
        cfg.m1 = 0.5;
        cfg.m2 = 1.0;
        cfg.eps = 0.1;
        const auto primal = oracle::primal_sup_moment_1d(f, grid, cfg);
        check("moment primal feasibility",
              std::abs(primal.mean - 0.0) <= cfg.m1 + 1e-3 &&
                  primal.second_central <= cfg.m2 + 1e-3);
        check("moment primal value sane", primal.value > 0.4 && primal.value < 0.55);
    }
    if (name == "cvar" || name == "all") {
        const double v1 = oracle::cvar_tail_average({1.0, 2.0, 3.0, 4.0}, 0.5);
        check("cvar tail average {1,2,3,4} beta=0.5 -> 3.5", std::abs(v1 - 3.5) < 1e-12);
        const int n = 20001;
        std::vector<double> x(n), p(n);
        for (int q = 0; q < n; ++q) {
            x[static_cast<size_t>(q)] = static_cast<double>(q) / (n - 1);
            p[static_cast<size_t>(q)] = 1.0;
        }
        const double v2 = oracle::cvar_tail_average_density(x, p, 0.9);
        check("cvar uniform density beta=0.9 -> 0.95", std::abs(v2 - 0.95) < 1e-12);
    }
    if (failures == 0 && name != "wasserstein" && name != "moment" && name != "cvar" &&
        name != "all") {
        std::fprintf(stderr, "unknown suite '%s' (wasserstein | moment | cvar | all)\n",
                     name.c_str());
        return 2;
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace
