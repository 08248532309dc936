// command line driver for the relevance-kernel PCA pipeline
#include <cstdio>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relpca/baseline.hpp"
#include "relpca/channel.hpp"
#include "relpca/classifier.hpp"
#include "relpca/dataset.hpp"
#include "relpca/errors.hpp"
#include "relpca/experiment.hpp"
#include "relpca/kernel.hpp"
#include "relpca/matrix_io.hpp"
#include "relpca/spectral.hpp"
#include "relpca/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace relpca;

struct SubsetArgs {
    std::string images;
    std::string labels;
    std::vector<int> digits{5, 6};
    long long per_class = 256;
    std::uint64_t seed = 1;
};

void add_subset_flags(CLI::App* cmd, SubsetArgs& args) {
    cmd->add_option("--images", args.images, "IDX image file")->required();
    cmd->add_option("--labels", args.labels, "IDX label file")->required();
    cmd->add_option("--digits", args.digits, "digit classes to keep");
    cmd->add_option("--per-class", args.per_class, "points drawn per digit");
    cmd->add_option("--seed", args.seed, "subset draw seed");
}

Dataset load_subset(const SubsetArgs& args) {
    return select_subset(load_idx_images(args.images), load_idx_labels(args.labels),
                         args.digits, args.per_class, args.seed);
}

void save_idx_pair(const Dataset& data, Index rows, Index cols, const std::string& dir) {
    fs::create_directories(dir);
    ImageSet images;
    images.count = data.n();
    images.rows = rows;
    images.cols = cols;
    images.pixels = data.points;
    save_idx_images((fs::path(dir) / "images.idx").string(), images);
    LabelSet labels;
    labels.labels = data.labels;
    save_idx_labels((fs::path(dir) / "labels.idx").string(), labels);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"relevance-kernel PCA pipeline"};
    app.require_subcommand(1);
    // --h mirrors the bandwidth config key, so help stays long-form only
    app.set_help_flag("--help", "print help");

    // synth: deterministic toy digit corpus
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic digit corpus");
    synth_cmd->set_help_flag("--help", "print help");
    std::vector<int> synth_digits{5, 6};
    long long synth_per_class = 256;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "out/synth";
    synth_cmd->add_option("--digits", synth_digits, "digit classes to render");
    synth_cmd->add_option("--per-class", synth_per_class, "images per digit");
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--out", synth_out, "output directory");

    // ingest: draw a reproducible subset and re-emit it as IDX
    auto* ingest_cmd = app.add_subcommand("ingest", "draw a per-digit subset from IDX files");
    ingest_cmd->set_help_flag("--help", "print help");
    SubsetArgs ingest_args;
    std::string ingest_out = "out/subset";
    add_subset_flags(ingest_cmd, ingest_args);
    ingest_cmd->add_option("--out", ingest_out, "output directory");

    // kernel: Monte Carlo relevance kernel estimate
    auto* kernel_cmd = app.add_subcommand("kernel", "estimate the raw relevance kernel");
    kernel_cmd->set_help_flag("--help", "print help");
    SubsetArgs kernel_args;
    double kernel_sigma = 1.0, kernel_h = 1.317;
    long long kernel_samples = 20000;
    int kernel_workers = 0;
    std::string kernel_out = "out/kernel.rkm";
    add_subset_flags(kernel_cmd, kernel_args);
    kernel_cmd->add_option("--sigma", kernel_sigma, "blur width");
    kernel_cmd->add_option("--h", kernel_h, "channel bandwidth");
    kernel_cmd->add_option("--samples", kernel_samples, "total Monte Carlo samples");
    kernel_cmd->add_option("--workers", kernel_workers, "worker threads (0 = hardware)");
    kernel_cmd->add_option("--out", kernel_out, "output matrix file");

    // eigen: symmetrize + detrace + eigendecompose a raw kernel
    auto* eigen_cmd = app.add_subcommand("eigen", "feature basis from a raw kernel matrix");
    eigen_cmd->set_help_flag("--help", "print help");
    std::string eigen_kernel, eigen_out = "out";
    long long eigen_kmax = 16;
    eigen_cmd->add_option("--kernel", eigen_kernel, "raw kernel matrix file")->required();
    eigen_cmd->add_option("--kmax", eigen_kmax, "number of leading features");
    eigen_cmd->add_option("--out", eigen_out, "output directory");

    // project: channel-space components for a point set
    auto* project_cmd = app.add_subcommand("project", "project points onto a feature basis");
    project_cmd->set_help_flag("--help", "print help");
    SubsetArgs project_train;
    std::string project_points, project_basis, project_eigs, project_out = "out/components.rkm";
    std::string project_method = "proj";
    double project_sigma = 1.0, project_h = 1.317;
    long long project_samples = 0;
    std::uint64_t project_seed = 1;
    int project_workers = 0;
    add_subset_flags(project_cmd, project_train);
    project_cmd->add_option("--points", project_points, "IDX images to project")->required();
    project_cmd->add_option("--basis", project_basis, "basis coefficient matrix")->required();
    project_cmd->add_option("--eigenvalues", project_eigs, "eigenvalue column matrix")->required();
    project_cmd->add_option("--method", project_method, "proj or proj0");
    project_cmd->add_option("--sigma", project_sigma, "blur width");
    project_cmd->add_option("--h", project_h, "channel bandwidth");
    project_cmd->add_option("--samples", project_samples, "Monte Carlo samples for proj0");
    project_cmd->add_option("--proj-seed", project_seed, "sampling seed for proj0");
    project_cmd->add_option("--workers", project_workers, "worker threads (0 = hardware)");
    project_cmd->add_option("--out", project_out, "output matrix file");

    // rbf: kernel PCA baseline components
    auto* rbf_cmd = app.add_subcommand("rbf", "RBF kernel PCA baseline components");
    rbf_cmd->set_help_flag("--help", "print help");
    SubsetArgs rbf_train;
    std::string rbf_points, rbf_out = "out";
    double rbf_sigma = 1.0, rbf_h = 1.317, rbf_delta = 40.0;
    long long rbf_kmax = 16;
    bool rbf_no_center = false, rbf_no_blur = false;
    add_subset_flags(rbf_cmd, rbf_train);
    rbf_cmd->add_option("--points", rbf_points, "IDX images to project (optional)");
    rbf_cmd->add_option("--sigma", rbf_sigma, "blur width");
    rbf_cmd->add_option("--h", rbf_h, "channel bandwidth (unused by the kernel itself)");
    rbf_cmd->add_option("--delta", rbf_delta, "RBF bandwidth");
    rbf_cmd->add_option("--kmax", rbf_kmax, "number of components");
    rbf_cmd->add_flag("--no-center", rbf_no_center, "skip Gram centering");
    rbf_cmd->add_flag("--no-blur", rbf_no_blur, "apply the kernel to raw pixels");
    rbf_cmd->add_option("--out", rbf_out, "output directory");

    // classify: weighted kNN on component matrices
    auto* classify_cmd = app.add_subcommand("classify", "kNN error rate on component files");
    classify_cmd->set_help_flag("--help", "print help");
    std::string cls_train, cls_train_labels, cls_test, cls_test_labels;
    long long cls_k = 0;
    int cls_neighbors = 3;
    std::string cls_weighting = "inverse";
    classify_cmd->add_option("--train-components", cls_train, "training matrix")->required();
    classify_cmd->add_option("--train-labels", cls_train_labels, "training IDX labels")->required();
    classify_cmd->add_option("--test-components", cls_test, "test matrix")->required();
    classify_cmd->add_option("--test-labels", cls_test_labels, "test IDX labels")->required();
    classify_cmd->add_option("--k", cls_k, "use only the first k columns (0 = all)");
    classify_cmd->add_option("--neighbors", cls_neighbors, "neighbor count");
    classify_cmd->add_option("--weighting", cls_weighting,
                             "inverse, inverse_squared or exponential");

    // run: full experiment from a config file plus overrides
    auto* run_cmd = app.add_subcommand("run", "full experiment pipeline");
    run_cmd->set_help_flag("--help", "print help");
    std::string run_config;
    run_cmd->add_option("--config", run_config, "key = value config file");
    std::deque<std::string> run_values;  // stable addresses for CLI11 bindings
    std::vector<std::string> run_keys;
    std::vector<CLI::Option*> run_opts;
    auto mirror = [&](const std::string& flag, const std::string& key, const std::string& help) {
        run_values.emplace_back();
        run_keys.push_back(key);
        run_opts.push_back(run_cmd->add_option(flag, run_values.back(), help));
    };
    mirror("--train-images", "train_images", "training IDX image file");
    mirror("--train-labels", "train_labels", "training IDX label file");
    mirror("--test-images", "test_images", "test IDX image file");
    mirror("--test-labels", "test_labels", "test IDX label file");
    mirror("--digits", "digits", "comma separated digits");
    mirror("--per-class", "per_class", "training points per digit");
    mirror("--test-per-class", "test_per_class", "test points per digit (0 = full split)");
    mirror("--sigma", "sigma", "blur width");
    mirror("--h", "h", "channel bandwidth");
    mirror("--samples", "samples", "total Monte Carlo samples");
    mirror("--kmax", "kmax", "maximum component count");
    mirror("--method", "method", "comma separated subset of proj,proj0,rbf");
    mirror("--delta", "delta", "RBF bandwidth");
    mirror("--delta-grid", "delta_grid", "comma separated RBF bandwidth grid");
    mirror("--rbf-center", "rbf_center", "center the RBF Gram (true/false)");
    mirror("--rbf-blur", "rbf_blur", "blur RBF inputs (true/false)");
    mirror("--neighbors", "neighbors", "kNN neighbor count");
    mirror("--weighting", "weighting", "kNN weighting scheme");
    mirror("--proj0-samples", "proj0_samples", "samples per point for proj0 (0 = kernel S)");
    mirror("--seed", "seed", "master seed");
    mirror("--workers", "workers", "worker threads (0 = hardware)");
    mirror("--out", "out", "output directory");

    CLI11_PARSE(app, argc, argv);

    if (synth_cmd->parsed()) {
        const SynthSet data = synth_dataset(synth_digits, synth_per_class, synth_seed);
        fs::create_directories(synth_out);
        save_idx_images((fs::path(synth_out) / "images.idx").string(), data.images);
        save_idx_labels((fs::path(synth_out) / "labels.idx").string(), data.labels);
        std::printf("wrote %lld synthetic images to %s\n",
                    static_cast<long long>(data.images.count), synth_out.c_str());
        return 0;
    }

    if (ingest_cmd->parsed()) {
        const Dataset data = load_subset(ingest_args);
        const ImageSet source = load_idx_images(ingest_args.images);
        save_idx_pair(data, source.rows, source.cols, ingest_out);
        std::printf("wrote %lld selected images to %s\n",
                    static_cast<long long>(data.n()), ingest_out.c_str());
        return 0;
    }

    if (kernel_cmd->parsed()) {
        const Dataset data = load_subset(kernel_args);
        ChannelParams channel;
        channel.sigma = kernel_sigma;
        channel.h = kernel_h;
        const ImageSet source = load_idx_images(kernel_args.images);
        channel.rows = source.rows;
        channel.cols = source.cols;
        const KernelMatrix raw = estimate_kernel(data, channel, kernel_samples,
                                                 kernel_args.seed,
                                                 kernel_workers > 0 ? kernel_workers
                                                                    : default_workers());
        fs::create_directories(fs::path(kernel_out).parent_path().string().empty()
                                   ? "."
                                   : fs::path(kernel_out).parent_path().string());
        write_matrix(kernel_out, raw.entries);
        std::printf("kernel %lldx%lld  S=%lld  asymmetry=%.6f  -> %s\n",
                    static_cast<long long>(raw.n()), static_cast<long long>(raw.n()),
                    static_cast<long long>(raw.meta.samples_per_row), asymmetry(raw),
                    kernel_out.c_str());
        return 0;
    }

    if (eigen_cmd->parsed()) {
        KernelMatrix raw;
        raw.entries = read_matrix(eigen_kernel);
        raw.stage = KernelStage::raw;
        const Spectrum spectrum = eigendecompose(detrace(symmetrize(raw)));
        const FeatureBasis basis = top_features(spectrum, eigen_kmax);
        fs::create_directories(eigen_out);
        write_matrix((fs::path(eigen_out) / "basis.rkm").string(), basis.coefficients);
        write_matrix((fs::path(eigen_out) / "eigenvalues.rkm").string(), spectrum.eigenvalues);
        std::printf("top eigenvalue %.6f, kept %lld features -> %s\n",
                    spectrum.eigenvalues(0), static_cast<long long>(basis.k),
                    eigen_out.c_str());
        if (!basis.degenerate_pairs.empty())
            std::printf("warning: %zu near-degenerate eigenvalue pairs\n",
                        basis.degenerate_pairs.size());
        return 0;
    }

    if (project_cmd->parsed()) {
        const Dataset train = load_subset(project_train);
        const ImageSet source = load_idx_images(project_train.images);
        ChannelParams channel;
        channel.sigma = project_sigma;
        channel.h = project_h;
        channel.rows = source.rows;
        channel.cols = source.cols;
        const BlurredSet blurred = blur_set(train, channel);
        FeatureBasis basis;
        basis.coefficients = read_matrix(project_basis);
        basis.k = basis.coefficients.cols();
        const MatrixXd eigs = read_matrix(project_eigs);
        basis.eigenvalues = eigs.col(0).head(basis.k);
        const ImageSet points = load_idx_images(project_points);
        Dataset query;
        query.points = points.pixels;
        ProjectionMethod method;
        if (project_method == "proj") method = ProjectionMethod::proj;
        else if (project_method == "proj0") method = ProjectionMethod::proj0;
        else throw ConfigError("unknown projection method '" + project_method + "'");
        const ComponentMatrix components =
            project_batch(query, basis, blurred, channel, method, project_samples,
                          project_seed, project_workers > 0 ? project_workers
                                                            : default_workers());
        const std::string parent = fs::path(project_out).parent_path().string();
        fs::create_directories(parent.empty() ? "." : parent);
        write_matrix(project_out, components.values);
        std::printf("projected %lld points onto %lld features -> %s\n",
                    static_cast<long long>(components.values.rows()),
                    static_cast<long long>(components.values.cols()), project_out.c_str());
        return 0;
    }

    if (rbf_cmd->parsed()) {
        const Dataset train = load_subset(rbf_train);
        const ImageSet source = load_idx_images(rbf_train.images);
        ChannelParams channel;
        channel.sigma = rbf_sigma;
        channel.h = rbf_h;
        channel.rows = source.rows;
        channel.cols = source.cols;
        const RbfParams params{rbf_delta, !rbf_no_blur};
        const KpcaBasis fitted =
            kpca_fit(rbf_kernel(train, params, channel), rbf_kmax, !rbf_no_center);
        fs::create_directories(rbf_out);
        write_matrix((fs::path(rbf_out) / "components_rbf_train.rkm").string(),
                     fitted.train_components);
        if (!rbf_points.empty()) {
            const ImageSet points = load_idx_images(rbf_points);
            Dataset query;
            query.points = points.pixels;
            const MatrixXd components = kpca_project(query, fitted, train, params, channel);
            write_matrix((fs::path(rbf_out) / "components_rbf_test.rkm").string(), components);
        }
        std::printf("RBF kernel PCA with delta=%.4f, %lld components -> %s\n",
                    rbf_delta, static_cast<long long>(rbf_kmax), rbf_out.c_str());
        return 0;
    }

    if (classify_cmd->parsed()) {
        MatrixXd train = read_matrix(cls_train);
        MatrixXd test = read_matrix(cls_test);
        if (cls_k > 0) {
            if (cls_k > train.cols())
                throw ConfigError("k exceeds component count " + std::to_string(train.cols()));
            train = train.leftCols(cls_k).eval();
            test = test.leftCols(cls_k).eval();
        }
        KnnWeighting weighting;
        if (cls_weighting == "inverse") weighting = KnnWeighting::inverse;
        else if (cls_weighting == "inverse_squared") weighting = KnnWeighting::inverse_squared;
        else if (cls_weighting == "exponential") weighting = KnnWeighting::exponential;
        else throw ConfigError("unknown weighting '" + cls_weighting + "'");
        const std::vector<int> predicted =
            knn_classify(train, load_idx_labels(cls_train_labels).labels, test,
                         cls_neighbors, weighting, default_workers());
        const double err = error_rate(predicted, load_idx_labels(cls_test_labels).labels);
        std::printf("error rate %.4f%% over %zu test points\n", err, predicted.size());
        return 0;
    }

    if (run_cmd->parsed()) {
        ExperimentConfig config;
        if (!run_config.empty()) config = load_config(run_config);
        for (std::size_t i = 0; i < run_opts.size(); ++i)
            if (run_opts[i]->count() > 0)
                apply_config_entry(config, run_keys[i], run_values[i]);
        const RunReport report = run(config);
        std::printf("n_train=%lld n_test=%lld S=%lld asymmetry=%.4f%s\n",
                    static_cast<long long>(report.n_train),
                    static_cast<long long>(report.n_test),
                    static_cast<long long>(report.samples_per_row), report.asymmetry,
                    report.resumed_from_cache ? " (kernel resumed from cache)" : "");
        auto print_curve = [](const char* name, const std::vector<double>& errs) {
            if (errs.empty()) return;
            std::printf("%s:", name);
            for (double e : errs) std::printf(" %.2f", e);
            std::printf("\n");
        };
        print_curve("err_proj", report.err_proj);
        print_curve("err_proj0", report.err_proj0);
        print_curve("err_rbf", report.err_rbf);
        if (report.rbf_not_worse_at_k2)
            std::printf("note: RBF baseline matches or beats the channel projection at k=2\n");
        std::printf("curve: %s\nmanifest: %s\n", report.csv_path.c_str(),
                    report.manifest_path.c_str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const relpca::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const relpca::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const relpca::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
