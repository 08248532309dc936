#include "relpca/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relpca/baseline.hpp"
#include "relpca/channel.hpp"
#include "relpca/dataset.hpp"
#include "relpca/errors.hpp"
#include "relpca/kernel.hpp"
#include "relpca/matrix_io.hpp"
#include "relpca/spectral.hpp"

namespace relpca {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}

std::uint64_t sub_seed(std::uint64_t seed, std::string_view purpose) {
    std::uint64_t state = seed ^ fnv1a64(purpose);
    return splitmix64(state);
}

void format_cell(std::string& line, double v, bool present) {
    if (present) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        line += buf;
    }
}

Dataset full_split(const ImageSet& images, const LabelSet& labels,
                   const std::vector<int>& digits) {
    std::vector<int> wanted(digits);
    std::sort(wanted.begin(), wanted.end());
    std::vector<Index> rows;
    for (Index i = 0; i < images.count; ++i)
        if (std::binary_search(wanted.begin(), wanted.end(),
                               labels.labels[static_cast<std::size_t>(i)]))
            rows.push_back(i);
    Dataset out;
    out.points.resize(static_cast<Index>(rows.size()), images.dim());
    out.has_labels = true;
    out.labels.reserve(rows.size());
    Index r = 0;
    for (Index i : rows) {
        out.points.row(r++) = images.pixels.row(i);
        out.labels.push_back(labels.labels[static_cast<std::size_t>(i)]);
    }
    return out;
}

struct StageTimer {
    std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
    double take_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last).count();
        last = now;
        return ms;
    }
};

}  // namespace

void apply_config_entry(ExperimentConfig& config, const std::string& raw_key,
                        const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "train_images") config.train_images = value;
    else if (key == "train_labels") config.train_labels = value;
    else if (key == "test_images") config.test_images = value;
    else if (key == "test_labels") config.test_labels = value;
    else if (key == "out") config.out_dir = value;
    else if (key == "digits") {
        config.digits.clear();
        for (const std::string& d : split_list(value))
            config.digits.push_back(static_cast<int>(parse_int(key, d)));
    } else if (key == "per_class") config.per_class = parse_int(key, value);
    else if (key == "test_per_class") config.test_per_class = parse_int(key, value);
    else if (key == "sigma") config.sigma = parse_double(key, value);
    else if (key == "h") config.h = parse_double(key, value);
    else if (key == "samples") config.total_samples = parse_int(key, value);
    else if (key == "kmax") config.k_max = parse_int(key, value);
    else if (key == "method") {
        config.method_proj = config.method_proj0 = config.method_rbf = false;
        for (const std::string& m : split_list(value)) {
            if (m == "proj") config.method_proj = true;
            else if (m == "proj0") config.method_proj0 = true;
            else if (m == "rbf") config.method_rbf = true;
            else throw ConfigError("unknown method '" + m + "'");
        }
    } else if (key == "delta") config.delta = parse_double(key, value);
    else if (key == "delta_grid") {
        config.delta_grid.clear();
        for (const std::string& d : split_list(value))
            config.delta_grid.push_back(parse_double(key, d));
    } else if (key == "rbf_center") config.rbf_center = parse_bool(key, value);
    else if (key == "rbf_blur") config.rbf_blur = parse_bool(key, value);
    else if (key == "neighbors") config.neighbors = static_cast<int>(parse_int(key, value));
    else if (key == "weighting") {
        if (value == "inverse") config.weighting = KnnWeighting::inverse;
        else if (value == "inverse_squared") config.weighting = KnnWeighting::inverse_squared;
        else if (value == "exponential") config.weighting = KnnWeighting::exponential;
        else throw ConfigError("unknown weighting '" + value + "'");
    } else if (key == "proj0_samples") config.proj0_samples = parse_int(key, value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "workers") config.workers = static_cast<int>(parse_int(key, value));
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    ExperimentConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        apply_config_entry(config, line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

void validate(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    if (config.train_images.empty() || config.train_labels.empty())
        throw ConfigError("train_images and train_labels are required");
    for (const std::string& p : {config.train_images, config.train_labels})
        if (!fs::exists(p)) throw ConfigError("missing file: " + p);
    if (config.test_images.empty() != config.test_labels.empty())
        throw ConfigError("test_images and test_labels must be given together");
    if (!config.test_images.empty())
        for (const std::string& p : {config.test_images, config.test_labels})
            if (!fs::exists(p)) throw ConfigError("missing file: " + p);
    if (config.digits.empty()) throw ConfigError("digits must be non-empty");
    for (int d : config.digits)
        if (d < 0 || d > 9) throw ConfigError("digit out of range: " + std::to_string(d));
    if (config.per_class < 1) throw ConfigError("per_class must be >= 1");
    if (config.sigma < 0) throw ConfigError("sigma must be >= 0");
    if (config.h <= 0) throw ConfigError("h must be > 0");
    if (config.k_max < 1) throw ConfigError("kmax must be >= 1");
    if (config.neighbors < 1) throw ConfigError("neighbors must be >= 1");
    if (config.delta <= 0) throw ConfigError("delta must be > 0");
    for (double d : config.delta_grid)
        if (d <= 0) throw ConfigError("delta_grid entries must be > 0");
}

std::string kernel_cache_key(const MatrixXd& train_points, double sigma, double h,
                             Index total_samples, std::uint64_t seed) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    auto mix64 = [&hash](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            hash ^= (v >> (8 * b)) & 0xFF;
            hash *= 0x100000001B3ull;
        }
    };
    auto mix_double = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        mix64(bits);
    };
    mix64(static_cast<std::uint64_t>(train_points.rows()));
    mix64(static_cast<std::uint64_t>(train_points.cols()));
    for (Index i = 0; i < train_points.rows(); ++i)
        for (Index j = 0; j < train_points.cols(); ++j) mix_double(train_points(i, j));
    mix_double(sigma);
    mix_double(h);
    mix64(static_cast<std::uint64_t>(total_samples));
    mix64(seed);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

RunReport run(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    validate(config);
    const int workers = config.workers > 0 ? config.workers : default_workers();
    nlohmann::json timings;
    StageTimer timer;

    // ingest
    const ImageSet train_images = load_idx_images(config.train_images);
    const LabelSet train_labels = load_idx_labels(config.train_labels);
    const Dataset train =
        select_subset(train_images, train_labels, config.digits, config.per_class, config.seed);
    Dataset test;
    const bool have_test = !config.test_images.empty();
    if (have_test) {
        const ImageSet test_images = load_idx_images(config.test_images);
        const LabelSet test_labels = load_idx_labels(config.test_labels);
        test = config.test_per_class > 0
                   ? select_subset(test_images, test_labels, config.digits,
                                   config.test_per_class, config.seed + 1)
                   : full_split(test_images, test_labels, config.digits);
    }
    timings["ingest_ms"] = timer.take_ms();

    RunReport report;
    report.n_train = train.n();
    report.n_test = test.n();
    if (config.k_max > train.n())
        throw ConfigError("kmax exceeds training size n = " + std::to_string(train.n()));
    if (config.total_samples < train.n())
        throw InsufficientSamples("samples " + std::to_string(config.total_samples) +
                                  " < n " + std::to_string(train.n()));

    ChannelParams channel;
    channel.sigma = config.sigma;
    channel.h = config.h;
    channel.rows = train_images.rows;
    channel.cols = train_images.cols;

    fs::create_directories(config.out_dir);
    const BlurredSet blurred = blur_set(train, channel);
    timings["blur_ms"] = timer.take_ms();

    // kernel (cached on a content hash so spectrum/projection work can iterate)
    const Index S = config.total_samples / train.n();
    report.samples_per_row = S;
    const std::string cache_key =
        kernel_cache_key(train.points, config.sigma, config.h, config.total_samples, config.seed);
    const std::string kernel_path =
        (fs::path(config.out_dir) / ("kernel_" + cache_key + ".rkm")).string();
    report.kernel_path = kernel_path;
    KernelMatrix raw;
    raw.stage = KernelStage::raw;
    raw.meta.seed = config.seed;
    raw.meta.samples_per_row = S;
    raw.meta.sigma = config.sigma;
    raw.meta.h = config.h;
    if (fs::exists(kernel_path)) {
        raw.entries = read_matrix(kernel_path);
        if (raw.entries.rows() != train.n() || raw.entries.cols() != train.n())
            throw DataError("cached kernel has wrong shape: " + kernel_path);
        report.resumed_from_cache = true;
    } else {
        const GaussianPointChannel point_channel{blurred, channel};
        raw.entries = estimate_kernel_raw(point_channel, S, config.seed, workers);
        write_matrix(kernel_path, raw.entries);
    }
    timings["kernel_ms"] = timer.take_ms();

    report.asymmetry = asymmetry(raw);
    raw.meta.asymmetry = report.asymmetry;
    const KernelMatrix sym = symmetrize(raw);
    report.clamp_count = sym.meta.clamp_count;
    const KernelMatrix detraced = detrace(sym);
    const Spectrum spectrum = eigendecompose(detraced);
    const FeatureBasis basis = top_features(spectrum, config.k_max);
    write_matrix((fs::path(config.out_dir) / "basis.rkm").string(), basis.coefficients);
    write_matrix((fs::path(config.out_dir) / "eigenvalues.rkm").string(), spectrum.eigenvalues);
    timings["spectrum_ms"] = timer.take_ms();

    // components per method
    MatrixXd proj_train, proj_test, proj0_train, proj0_test, rbf_train, rbf_test;
    if (config.method_proj) {
        proj_train = project_batch(train, basis, blurred, channel, ProjectionMethod::proj,
                                   0, 0, workers)
                         .values;
        write_matrix((fs::path(config.out_dir) / "components_proj_train.rkm").string(), proj_train);
        if (have_test) {
            proj_test = project_batch(test, basis, blurred, channel, ProjectionMethod::proj,
                                      0, 0, workers)
                            .values;
            write_matrix((fs::path(config.out_dir) / "components_proj_test.rkm").string(),
                         proj_test);
        }
    }
    if (config.method_proj0) {
        const Index T = config.proj0_samples > 0 ? config.proj0_samples : S;
        proj0_train = project_batch(train, basis, blurred, channel, ProjectionMethod::proj0,
                                    T, sub_seed(config.seed, "proj0-train"), workers)
                          .values;
        write_matrix((fs::path(config.out_dir) / "components_proj0_train.rkm").string(),
                     proj0_train);
        if (have_test) {
            proj0_test = project_batch(test, basis, blurred, channel, ProjectionMethod::proj0,
                                       T, sub_seed(config.seed, "proj0-test"), workers)
                             .values;
            write_matrix((fs::path(config.out_dir) / "components_proj0_test.rkm").string(),
                         proj0_test);
        }
    }
    timings["project_ms"] = timer.take_ms();

    report.delta_used = config.delta;
    if (config.method_rbf) {
        RbfParams rbf{config.delta, config.rbf_blur};
        if (!config.delta_grid.empty() && have_test) {
            // tune delta against classification quality at small k, where the
            // baseline's component ranking matters most
            const Index k_obj = std::min<Index>(3, config.k_max);
            double best_err = std::numeric_limits<double>::infinity();
            double best_delta = config.delta_grid.front();
            for (double d : config.delta_grid) {
                RbfParams trial{d, config.rbf_blur};
                const KpcaBasis fitted =
                    kpca_fit(rbf_kernel(train, trial, channel), config.k_max, config.rbf_center);
                const MatrixXd comps = kpca_project(test, fitted, train, trial, channel);
                const std::vector<int> pred =
                    knn_classify(fitted.train_components.leftCols(k_obj), train.labels,
                                 comps.leftCols(k_obj), config.neighbors, config.weighting,
                                 workers);
                const double err = error_rate(pred, test.labels);
                if (err < best_err || (err == best_err && d < best_delta)) {
                    best_err = err;
                    best_delta = d;
                }
            }
            rbf.delta = best_delta;
            report.delta_used = best_delta;
        }
        const KpcaBasis fitted =
            kpca_fit(rbf_kernel(train, rbf, channel), config.k_max, config.rbf_center);
        rbf_train = fitted.train_components;
        write_matrix((fs::path(config.out_dir) / "components_rbf_train.rkm").string(), rbf_train);
        if (have_test) {
            rbf_test = kpca_project(test, fitted, train, rbf, channel);
            write_matrix((fs::path(config.out_dir) / "components_rbf_test.rkm").string(), rbf_test);
        }
    }
    timings["rbf_ms"] = timer.take_ms();

    // error curves
    if (have_test) {
        auto curve = [&](const MatrixXd& tr, const MatrixXd& te) {
            std::vector<double> errs;
            errs.reserve(static_cast<std::size_t>(config.k_max));
            for (Index k = 1; k <= config.k_max; ++k) {
                const std::vector<int> pred =
                    knn_classify(tr.leftCols(k), train.labels, te.leftCols(k),
                                 config.neighbors, config.weighting, workers);
                errs.push_back(error_rate(pred, test.labels));
            }
            return errs;
        };
        if (config.method_proj) report.err_proj = curve(proj_train, proj_test);
        if (config.method_proj0) report.err_proj0 = curve(proj0_train, proj0_test);
        if (config.method_rbf) report.err_rbf = curve(rbf_train, rbf_test);
        if (config.method_proj && config.method_rbf && config.k_max >= 2)
            report.rbf_not_worse_at_k2 = !(report.err_rbf[1] > report.err_proj[1]);
    }
    timings["classify_ms"] = timer.take_ms();

    // curve CSV: fixed schema, absent methods leave the column empty
    report.csv_path = (fs::path(config.out_dir) / "curve.csv").string();
    {
        std::ofstream csv(report.csv_path, std::ios::trunc);
        if (!csv) throw DataError("cannot write " + report.csv_path);
        csv << "k,error_proj,error_proj0,error_rbf\n";
        for (Index k = 1; k <= config.k_max; ++k) {
            std::string line = std::to_string(k);
            line += ',';
            format_cell(line, report.err_proj.empty() ? 0 : report.err_proj[k - 1],
                        !report.err_proj.empty());
            line += ',';
            format_cell(line, report.err_proj0.empty() ? 0 : report.err_proj0[k - 1],
                        !report.err_proj0.empty());
            line += ',';
            format_cell(line, report.err_rbf.empty() ? 0 : report.err_rbf[k - 1],
                        !report.err_rbf.empty());
            csv << line << '\n';
        }
    }

    // manifest: full parameter echo plus derived quantities (timings included,
    // so the manifest itself is not part of the bitwise-reproducibility set)
    nlohmann::json manifest;
    manifest["train_images"] = config.train_images;
    manifest["train_labels"] = config.train_labels;
    manifest["test_images"] = config.test_images;
    manifest["test_labels"] = config.test_labels;
    manifest["digits"] = config.digits;
    manifest["per_class"] = config.per_class;
    manifest["test_per_class"] = config.test_per_class;
    manifest["sigma"] = config.sigma;
    manifest["h"] = config.h;
    manifest["noise_stddev"] = channel.noise_stddev();
    manifest["total_samples"] = config.total_samples;
    manifest["samples_per_row"] = S;
    manifest["k_max"] = config.k_max;
    manifest["methods"] = {{"proj", config.method_proj},
                           {"proj0", config.method_proj0},
                           {"rbf", config.method_rbf}};
    manifest["delta"] = config.delta;
    manifest["delta_used"] = report.delta_used;
    manifest["delta_grid"] = config.delta_grid;
    manifest["rbf_center"] = config.rbf_center;
    manifest["rbf_blur"] = config.rbf_blur;
    manifest["neighbors"] = config.neighbors;
    manifest["proj0_samples"] = config.proj0_samples;
    manifest["seed"] = config.seed;
    manifest["workers_configured"] = config.workers;
    manifest["n_train"] = report.n_train;
    manifest["n_test"] = report.n_test;
    manifest["asymmetry"] = report.asymmetry;
    manifest["clamp_count"] = report.clamp_count;
    manifest["degenerate_pairs"] = basis.degenerate_pairs.size();
    manifest["resumed_from_cache"] = report.resumed_from_cache;
    manifest["rbf_not_worse_at_k2"] = report.rbf_not_worse_at_k2;
    manifest["kernel_file"] = fs::path(kernel_path).filename().string();
    manifest["timings"] = timings;
    report.manifest_path = (fs::path(config.out_dir) / "manifest.json").string();
    std::ofstream mf(report.manifest_path, std::ios::trunc);
    if (!mf) throw DataError("cannot write " + report.manifest_path);
    mf << manifest.dump(2) << '\n';

    return report;
}

}  // namespace relpca
