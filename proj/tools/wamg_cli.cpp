#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wamg/experiment.hpp"
#include "wamg/mmio.hpp"

using namespace wamg;

int main(int argc, char** argv) {
    CLI::App app{
        "Aggregation-quality toolkit for coarsening by compatible weighted matching.\n"
        "Runs matching-based coarsening on diffusion benchmarks or Matrix Market\n"
        "inputs and reports the aggregate quality constants, the local splitting\n"
        "bound and the compatible-relaxation ratio."};

    std::string config_path, out_path, svg_path, format = "csv";
    std::string matrix_path, weight_file;
    std::string problem = "constant", matcher = "exact", weight = "ones";
    int threads = 1;
    long long n = 12;
    int sweeps = 1;
    long long seed = 42;
    int refine_k = 0;
    double eps = 100.0;
    bool measure_factor = false;

    app.add_option("--config", config_path, "batch config file (key=value sections)");
    app.add_option("--out", out_path, "output file (stdout when omitted)");
    app.add_option("--svg", svg_path, "write an aggregate map to this SVG file");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "thread budget (kernels are sequential; accepted for compatibility)");
    app.add_option("--seed", seed, "seed for all stochastic pieces");
    app.add_option("--matrix", matrix_path, "Matrix Market operator instead of a built-in problem");
    app.add_option("--weight-file", weight_file, "plain-text weight vector, one value per line");
    app.add_option("--problem", problem, "constant|anisotropy|jump|random|fem");
    app.add_option("--matcher", matcher, "exact|suitor|preis|auction");
    app.add_option("--weight", weight, "ones|random|ones-refined|eigenvector|bootstrap");
    app.add_option("--n", n, "FD grid side length");
    app.add_option("--sweeps", sweeps, "pairwise matching sweeps (ell)");
    app.add_option("--refine-k", refine_k, "smoother refinements of the weight vector");
    app.add_option("--eps", eps, "anisotropy strength");
    app.add_flag("--measure-factor", measure_factor, "also measure the TL-AMG convergence factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::vector<ReportRow> rows;
        if (!config_path.empty()) {
            rows = run_table(config_path);
        } else {
            ExperimentConfig cfg;
            if (!matrix_path.empty()) {
                cfg.problem = ExperimentConfig::Problem::Matrix;
                cfg.matrix_path = matrix_path;
            } else {
                apply_config_entry(cfg, "problem", problem);
            }
            apply_config_entry(cfg, "matcher", matcher);
            apply_config_entry(cfg, "weight", weight);
            cfg.n = n;
            cfg.sweeps = sweeps;
            cfg.seed = static_cast<std::uint64_t>(seed);
            cfg.weight_seed = static_cast<std::uint64_t>(seed);
            cfg.problem_seed = static_cast<std::uint64_t>(seed);
            cfg.refine_k = refine_k;
            cfg.eps = eps;
            cfg.weight_file = weight_file;
            cfg.svg_path = svg_path;
            cfg.measure_factor = measure_factor;
            rows.push_back(run_experiment(cfg));
            if (!svg_path.empty() && cfg.problem == ExperimentConfig::Problem::Matrix)
                std::cerr << "warning: --svg skipped, Matrix Market input has no geometry\n";
        }

        const std::string text = format == "json" ? rows_to_json(rows) : rows_to_csv(rows);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot open output file " + out_path);
            out << text;
        }

        for (const auto& r : rows)
            if (!r.error.empty()) {
                std::cerr << "error in row '" << r.cfg.label << "': " << r.error << "\n";
                return 1;
            }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
