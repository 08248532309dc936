#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relpca/classifier.hpp"
#include "relpca/projection.hpp"
#include "relpca/types.hpp"

namespace relpca {

// One flat configuration drives the whole pipeline; every key mirrors a CLI
// flag and a `key = value` line in the config file (CLI overrides file).
struct ExperimentConfig {
    std::string train_images, train_labels;  // IDX paths
    std::string test_images, test_labels;    // optional; empty = no test stage
    std::vector<int> digits = {5, 6};
    Index per_class = 256;
    Index test_per_class = 0;  // 0 = entire test split restricted to digits
    double sigma = 1.0;
    double h = 1.317;
    Index total_samples = 20000;
    Index k_max = 16;
    bool method_proj = true;
    bool method_proj0 = true;
    bool method_rbf = true;
    double delta = 40.0;
    std::vector<double> delta_grid;  // non-empty: pick delta by small-k error
    bool rbf_center = true;
    bool rbf_blur = true;
    int neighbors = 3;
    KnnWeighting weighting = KnnWeighting::inverse;
    Index proj0_samples = 0;  // 0 = same as kernel per-row S
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int workers = 0;  // 0 = hardware concurrency
};

ExperimentConfig load_config(const std::string& path);
// Applies one key=value override (same keys as the config file).
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);
void validate(const ExperimentConfig& config);

struct RunReport {
    Index n_train = 0, n_test = 0;
    Index samples_per_row = 0;
    double asymmetry = 0.0;
    Index clamp_count = 0;
    double delta_used = 0.0;
    bool resumed_from_cache = false;
    // set when the RBF baseline fails to trail the fast projection at k=2
    bool rbf_not_worse_at_k2 = false;
    std::vector<double> err_proj, err_proj0, err_rbf;  // index k-1, empty if off
    std::string csv_path, manifest_path, kernel_path;
};

RunReport run(const ExperimentConfig& config);

// Content hash (FNV-1a over dataset bytes and the kernel-defining
// parameters) used to key the kernel cache.
std::string kernel_cache_key(const MatrixXd& train_points, double sigma, double h,
                             Index total_samples, std::uint64_t seed);

}  // namespace relpca
