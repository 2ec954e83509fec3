#ifndef WAMG_EXPERIMENT_HPP
#define WAMG_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wamg/coarsening.hpp"
#include "wamg/problems.hpp"
#include "wamg/quality.hpp"

namespace wamg {

/// A usage error (bad names, malformed config) as opposed to a numerical
/// failure; the CLI maps this to exit code 2.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    enum class Problem { Constant, Anisotropy, Jump, Random, Fem, Matrix };
    enum class Weight { Ones, Random, OnesRefined, Eigenvector, Bootstrap };

    std::string label;
    Problem problem = Problem::Constant;
    index_t n = 12;              // FD grid side
    double eps = 100.0;          // axial anisotropy strength
    int axis = 0;                // 0 = x, 1 = y
    std::uint64_t problem_seed = 1;
    std::string mesh_path;       // FEM: mesh file, or
    int mesh_levels = -1;        //      structured mesh level
    double theta = 0.0;          // FEM rotated-tensor angle
    double fem_eps = 1.0;        // FEM tensor strength (1 = scalar Laplacian)
    std::string matrix_path;     // external Matrix Market operator
    std::string weight_file;     // optional vector file

    MatcherKind matcher = MatcherKind::Exact;
    int sweeps = 1;

    Weight weight = Weight::Ones;
    std::uint64_t weight_seed = 7;
    int refine_k = 0;
    int boot_r = 4;
    int boot_m = 1;

    double eps_auction = 1e-2;
    index_t exact_budget = 20000;
    index_t dense_cap = 2000;
    double eig_tol = 1e-6;
    std::uint64_t seed = 42;
    bool compute_bound = true;
    bool compute_rho = true;
    bool measure_factor = false;
    std::string svg_path;
};

struct ReportRow {
    ExperimentConfig cfg;
    index_t n = 0;
    index_t n_c = 0;
    index_t n_pairs = 0;
    index_t n_singletons = 0;
    double mu_inv = 0.0;
    bool bound_available = false;
    double bound = 0.0;
    bool splitting_verified = false;
    double delta_factor = 0.0;
    std::vector<AggregateBound> per_aggregate; // from the splitting bound, when available
    std::optional<double> rho_f;
    std::optional<double> conv_factor;
    double timing_ms = 0.0;
    std::string error; // nonempty when the row failed
};

/// Runs problem -> weight -> matching -> coarsening -> quality and returns
/// one table row. Throws UsageError for invalid configuration and
/// runtime_error for numerical failures.
ReportRow run_experiment(const ExperimentConfig& cfg);

/// Parses a flat key=value config file with [experiment] section headers.
std::vector<ExperimentConfig> parse_config_file(const std::string& path);

/// Parses one "key=value" assignment into the config.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Runs every section of a batch file; per-row failures are recorded in the
/// row and the batch continues.
std::vector<ReportRow> run_table(const std::string& batch_path);

std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::string rows_to_json(const std::vector<ReportRow>& rows, bool include_timing = true);
std::string row_to_json(const ReportRow& row, bool include_timing = true);

} // namespace wamg

#endif
