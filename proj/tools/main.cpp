#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ctvae/dataset.hpp"
#include "ctvae/forest.hpp"
#include "ctvae/kmeans.hpp"
#include "ctvae/metrics.hpp"
#include "ctvae/models.hpp"
#include "ctvae/priors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ctvae;

namespace {

/// Error already labeled with the pipeline stage it came from.
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("[" + stage + "] " + what) {}
};

template <typename F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

struct DataOpts {
    std::string csv;
    std::string label_col = "label";
    bool no_header = false;

    int blob_classes = 3;
    std::size_t blob_train = 3500;
    std::size_t blob_test = 1500;
    std::size_t blob_dim = 10;
    double blob_std = 0.2;

    double train_fraction = 0.7;
};

void add_csv_opts(CLI::App* cmd, DataOpts& d) {
    cmd->add_option("--csv", d.csv, "input CSV (features plus one label column)");
    cmd->add_option("--label-col", d.label_col,
                    "label column: header name, or zero-based index with --no-header");
    cmd->add_flag("--no-header", d.no_header, "CSV has no header row");
}

void add_blob_opts(CLI::App* cmd, DataOpts& d) {
    cmd->add_option("--blob-classes", d.blob_classes, "synthetic data: number of classes");
    cmd->add_option("--blob-train", d.blob_train, "synthetic data: training samples");
    cmd->add_option("--blob-test", d.blob_test, "synthetic data: test samples");
    cmd->add_option("--blob-dim", d.blob_dim, "synthetic data: feature dimensionality");
    cmd->add_option("--blob-std", d.blob_std, "synthetic data: per-class standard deviation");
    cmd->add_option("--train-fraction", d.train_fraction,
                    "train share of a CSV input (stratified split)");
}

/// Raw (unnormalized) train/test pair from either source.
std::pair<Dataset, Dataset> load_pair(const DataOpts& d, std::uint64_t seed) {
    return stage("data", [&] {
        if (!d.csv.empty()) {
            Dataset all = load_csv(d.csv, d.label_col, !d.no_header);
            return split(all, d.train_fraction, seed, true);
        }
        BlobSpec spec;
        spec.n_classes = d.blob_classes;
        spec.n_train = d.blob_train;
        spec.n_test = d.blob_test;
        spec.d = d.blob_dim;
        spec.std_dev = d.blob_std;
        spec.seed = seed;
        return make_blobs(spec);
    });
}

void ensure_out(const std::string& out) {
    fs::create_directories(out);
}

void write_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw StageError("report", "cannot write " + path);
    f << j.dump(2) << "\n";
}

void write_loss_history(const std::vector<double>& history, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw StageError("report", "cannot write " + path);
    f << "epoch,loss\n" << std::setprecision(17);
    for (std::size_t i = 0; i < history.size(); ++i) f << i + 1 << "," << history[i] << "\n";
}

/// Representation rows plus the original labels, in load_csv-compatible shape.
void write_representation(const Representation& rep, const Dataset& data,
                          const std::string& path) {
    Dataset out;
    out.features = rep.values;
    out.labels = data.labels;
    out.class_names = data.class_names;
    save_csv(out, path);
}

void write_scatter(const Matrix& points, const std::vector<int>& labels,
                   const std::string& path) {
    std::ofstream f(path);
    if (!f) throw StageError("report", "cannot write " + path);
    f << "dim1,dim2,label\n" << std::setprecision(17);
    for (std::size_t i = 0; i < points.rows(); ++i)
        f << points(i, 0) << "," << points(i, 1) << "," << labels[i] << "\n";
}

struct EvalNumbers {
    double acc = 0.0, precision = 0.0, recall = 0.0, fscore = 0.0;
    double d_bet = 0.0, d_wit = 0.0;
};

EvalNumbers evaluate_rep(const Matrix& train_x, const std::vector<int>& train_y,
                         const Matrix& test_x, const std::vector<int>& test_y,
                         std::size_t trees, std::uint64_t seed) {
    ForestConfig cfg;
    cfg.n_estimators = trees;
    cfg.seed = seed;
    RandomForest rf = stage("classify", [&] { return fit_forest(train_x, train_y, cfg); });
    std::vector<int> pred = predict(rf, test_x);
    Prf prf = precision_recall_fscore(test_y, pred);
    // separability is reported on min-max-scaled features (fit on the train
    // side) so d_bet/d_wit are comparable across representations that live at
    // different scales
    Dataset tr, te;
    tr.features = train_x;
    tr.labels = train_y;
    te.features = test_x;
    te.labels = test_y;
    Dataset te_scaled = apply_normalizer(fit_normalizer(tr), te);
    SeparabilityReport sep = separability(te_scaled.features, te_scaled.labels);
    EvalNumbers n;
    n.acc = accuracy(test_y, pred);
    n.precision = prf.precision;
    n.recall = prf.recall;
    n.fscore = prf.fscore;
    n.d_bet = sep.d_bet;
    n.d_wit = sep.d_wit;
    return n;
}

json eval_json(const EvalNumbers& n) {
    return json{{"accuracy", n.acc},   {"precision", n.precision}, {"recall", n.recall},
                {"fscore", n.fscore},  {"d_bet", n.d_bet},         {"d_wit", n.d_wit}};
}

void print_eval_table(const std::string& title, const std::vector<std::string>& names,
                      const std::vector<EvalNumbers>& rows) {
    std::cout << title << "\n";
    std::cout << std::left << std::setw(22) << "representation" << std::right << std::setw(10)
              << "accuracy" << std::setw(11) << "precision" << std::setw(9) << "recall"
              << std::setw(9) << "fscore" << std::setw(12) << "d_bet" << std::setw(12) << "d_wit"
              << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const EvalNumbers& n = rows[i];
        std::cout << std::left << std::setw(22) << names[i] << std::right << std::fixed
                  << std::setprecision(4) << std::setw(10) << n.acc << std::setw(11) << n.precision
                  << std::setw(9) << n.recall << std::setw(9) << n.fscore << std::scientific
                  << std::setprecision(3) << std::setw(12) << n.d_bet << std::setw(12) << n.d_wit
                  << "\n";
        std::cout.unsetf(std::ios::floatfield);
    }
}

// ---- subcommands ----

struct TrainOpts {
    DataOpts data;
    std::string model = "ctvae";
    std::string out = "out";
    TrainConfig cfg;
    std::size_t d_z = 0;
    double scale = 20.0;
    bool fixed_means_flag = false;
    std::vector<double> betas{1.0, 1.0, 1.0, 1.0};
};

/// Shared by train/simulate/ablate: normalize, fit priors if needed, train.
struct TrainedRun {
    Model model;
    TrainResult result;
    Dataset train_norm;
    Dataset test_norm;
};

TrainedRun run_training(ModelKind kind, const Dataset& train_raw, const Dataset& test_raw,
                        const TrainConfig& cfg, std::size_t d_z_override, double scale,
                        bool fixed, const std::vector<double>& betas) {
    TrainedRun r;
    NormStats norm = fit_normalizer(train_raw);
    r.train_norm = apply_normalizer(norm, train_raw);
    r.test_norm = apply_normalizer(norm, test_raw);

    ArchSpec arch = ArchSpec::derive(r.train_norm.d_input(), d_z_override);
    std::optional<ClassPriors> priors;
    if (kind == ModelKind::CTVAE)
        priors = stage("priors",
                       [&] { return fit_priors(r.train_norm, arch.d_z, scale, fixed); });

    std::array<double, 4> b{betas[0], betas[1], betas[2], betas[3]};
    r.model = stage("train", [&] {
        Model m = make_model(kind, arch, cfg.seed, priors, b);
        m.norm = norm;
        return m;
    });
    r.result = stage("train", [&] { return train(r.model, r.train_norm, cfg); });
    return r;
}

int cmd_train(const TrainOpts& o) {
    ModelKind kind = stage("config", [&] { return model_kind_from_string(o.model); });
    auto [train_raw, test_raw] = load_pair(o.data, o.cfg.seed);
    if (kind == ModelKind::CTVAE && train_raw.n_classes() < 2)
        throw StageError("data", "ctvae needs labeled data with at least two classes");

    TrainedRun run = run_training(kind, train_raw, test_raw, o.cfg, o.d_z, o.scale,
                                  o.fixed_means_flag, o.betas);

    ensure_out(o.out);
    save_model(run.model, o.out + "/model.bin");
    write_loss_history(run.result.loss_history, o.out + "/loss_history.csv");
    if (o.data.csv.empty()) {
        save_csv(train_raw, o.out + "/train.csv");
        save_csv(test_raw, o.out + "/test.csv");
    }

    json report;
    report["command"] = "train";
    report["model"] = to_string(kind);
    report["seed"] = o.cfg.seed;
    report["epochs"] = o.cfg.epochs;
    report["lr"] = o.cfg.lr;
    report["d_input"] = run.model.arch.d_input;
    report["d_z"] = run.model.arch.d_z;
    report["n_train"] = run.train_norm.n();
    report["first_epoch_loss"] = run.result.loss_history.front();
    report["final_epoch_loss"] = run.result.loss_history.back();
    report["artifacts"] = {"model.bin", "loss_history.csv"};
    write_json(report, o.out + "/report.json");

    std::cout << to_string(kind) << " trained: loss " << run.result.loss_history.front()
              << " -> " << run.result.loss_history.back() << " over " << o.cfg.epochs
              << " epochs; artifacts in " << o.out << "/\n";
    return 0;
}

struct ExtractOpts {
    std::string model_file;
    DataOpts data;
    std::string out = "out";
};

int cmd_extract(const ExtractOpts& o) {
    Model model = stage("model", [&] { return load_model(o.model_file); });
    Dataset raw = stage("data", [&] {
        if (o.data.csv.empty()) throw std::invalid_argument("--csv is required");
        return load_csv(o.data.csv, o.data.label_col, !o.data.no_header);
    });
    Dataset norm = stage("data", [&] { return apply_normalizer(model.norm, raw); });
    Representation rep = stage("extract", [&] { return extract(model, norm.features); });

    ensure_out(o.out);
    write_representation(rep, raw, o.out + "/representation.csv");

    json report;
    report["command"] = "extract";
    report["model"] = to_string(model.kind);
    report["source"] = rep.source == RepSource::ReconstructionZhat ? "reconstruction-zhat"
                       : rep.source == RepSource::LatentMu         ? "latent-mu"
                                                                   : "latent-z";
    report["rows"] = rep.values.rows();
    report["width"] = rep.values.cols();
    report["artifacts"] = {"representation.csv"};
    write_json(report, o.out + "/report.json");

    std::cout << "extracted " << rep.values.rows() << " x " << rep.values.cols() << " ("
              << report["source"].get<std::string>() << ") -> " << o.out
              << "/representation.csv\n";
    return 0;
}

struct EvalOpts {
    std::string train_csv, test_csv;
    std::string compare_train_csv, compare_test_csv;
    std::string label_col = "label";
    bool no_header = false;
    std::size_t trees = 100;
    std::uint64_t seed = 0;
    std::string out = "out";
};

int cmd_eval(const EvalOpts& o) {
    auto load = [&](const std::string& path) {
        return stage("data", [&] { return load_csv(path, o.label_col, !o.no_header); });
    };
    Dataset train = load(o.train_csv);
    Dataset test = load(o.test_csv);
    std::vector<std::string> names{"primary"};
    std::vector<EvalNumbers> rows{
        evaluate_rep(train.features, train.labels, test.features, test.labels, o.trees, o.seed)};

    if (!o.compare_train_csv.empty()) {
        Dataset ctrain = load(o.compare_train_csv);
        Dataset ctest = load(o.compare_test_csv);
        names.push_back("comparison");
        rows.push_back(evaluate_rep(ctrain.features, ctrain.labels, ctest.features, ctest.labels,
                                    o.trees, o.seed));
    }

    ensure_out(o.out);
    json report;
    report["command"] = "eval";
    report["trees"] = o.trees;
    report["seed"] = o.seed;
    for (std::size_t i = 0; i < rows.size(); ++i) report[names[i]] = eval_json(rows[i]);
    write_json(report, o.out + "/eval_report.json");

    print_eval_table("evaluation (random forest + separability)", names, rows);
    return 0;
}

struct RelabelOpts {
    DataOpts data;
    std::string majority = "auto";
    std::vector<std::size_t> k_list{2, 3, 4, 5, 6, 7};
    std::uint64_t seed = 0;
    std::string out = "out";
};

int cmd_relabel(const RelabelOpts& o) {
    Dataset raw = stage("data", [&] {
        if (o.data.csv.empty()) throw std::invalid_argument("--csv is required");
        return load_csv(o.data.csv, o.data.label_col, !o.data.no_header);
    });
    NormStats norm = fit_normalizer(raw);
    Dataset scaled = apply_normalizer(norm, raw);

    int majority = 0;
    if (o.majority == "auto") {
        auto counts = raw.class_counts();
        for (std::size_t c = 1; c < counts.size(); ++c)
            if (counts[c] > counts[std::size_t(majority)]) majority = int(c);
    } else {
        auto it = std::find(raw.class_names.begin(), raw.class_names.end(), o.majority);
        if (it == raw.class_names.end())
            throw StageError("config", "unknown majority class '" + o.majority + "'");
        majority = int(it - raw.class_names.begin());
    }

    std::set<std::size_t> candidates(o.k_list.begin(), o.k_list.end());
    RelabelResult r = stage("cluster", [&] {
        RelabelResult rr = relabel_majority(scaled, majority, candidates, o.seed);
        rr.data.features = raw.features;  // keep the unnormalized features on disk
        return rr;
    });

    ensure_out(o.out);
    save_csv(r.data, o.out + "/relabeled.csv");
    {
        std::ofstream f(o.out + "/mapping.csv");
        f << "original_label,new_label\n";
        for (const auto& [from, to] : r.mapping)
            f << raw.class_names[std::size_t(from)] << "," << to << "\n";
    }

    json report;
    report["command"] = "relabel";
    report["majority_class"] = raw.class_names[std::size_t(majority)];
    report["chosen_k"] = r.chosen_k;
    report["n_classes_after"] = r.data.n_classes();
    json sil = json::array();
    for (const auto& [k, s] : r.silhouette_by_k) sil.push_back({{"k", k}, {"silhouette", s}});
    report["silhouette_by_k"] = sil;
    report["artifacts"] = {"relabeled.csv", "mapping.csv"};
    write_json(report, o.out + "/report.json");

    std::cout << "majority class '" << raw.class_names[std::size_t(majority)] << "' split into "
              << r.chosen_k << " pseudo-classes (|C| now " << r.data.n_classes() << ") -> "
              << o.out << "/relabeled.csv\n";
    return 0;
}

struct SimulateOpts {
    TrainConfig cfg;
    double blob_std = 0.2;
    double scale = 20.0;
    std::size_t trees = 100;
    std::string out = "out";
};

int cmd_simulate(const SimulateOpts& o) {
    DataOpts d;  // the simulation's fixed shape: 3 classes, 3500/1500, d=10
    d.blob_std = o.blob_std;
    auto [train_raw, test_raw] = load_pair(d, o.cfg.seed);

    TrainedRun run =
        run_training(ModelKind::CTVAE, train_raw, test_raw, o.cfg, /*d_z=*/2, o.scale,
                     /*fixed=*/false, {1.0, 1.0, 1.0, 1.0});

    Representation train_rep =
        stage("extract", [&] { return extract(run.model, run.train_norm.features); });
    Representation test_rep =
        stage("extract", [&] { return extract(run.model, run.test_norm.features); });

    EvalNumbers raw_eval =
        evaluate_rep(run.train_norm.features, run.train_norm.labels, run.test_norm.features,
                     run.test_norm.labels, o.trees, o.cfg.seed);
    EvalNumbers rep_eval = evaluate_rep(train_rep.values, run.train_norm.labels, test_rep.values,
                                        run.test_norm.labels, o.trees, o.cfg.seed);

    // scatter panels on the test split: x through the priors' PCA plane,
    // then mu, sampled z and zhat from the trained model
    const Dataset& ts = run.test_norm;
    PcaProjector pca = stage("priors", [&] { return fit_pca(run.train_norm, 2); });
    Matrix x_panel = pca.project_all(ts.features);

    Matrix mu_panel(ts.n(), 2), z_panel(ts.n(), 2);
    Rng zrng(o.cfg.seed ^ 0x73696d756c617465ULL);
    for (std::size_t i = 0; i < ts.n(); ++i) {
        std::vector<double> h = run.model.enc_trunk.forward(ts.features.row(i));
        std::vector<double> mu = run.model.mu_head.forward(h);
        std::vector<double> logvar = run.model.logvar_head.forward(h);
        std::vector<double> sigma(logvar.size());
        for (std::size_t j = 0; j < sigma.size(); ++j) sigma[j] = std::exp(0.5 * logvar[j]);
        std::vector<double> z =
            reparameterize_ctvae(mu, sigma, ts.labels[i], *run.model.priors, zrng);
        mu_panel.set_row(i, mu);
        z_panel.set_row(i, z);
    }

    ensure_out(o.out);
    save_model(run.model, o.out + "/model.bin");
    write_loss_history(run.result.loss_history, o.out + "/loss_history.csv");
    write_representation(train_rep, run.train_norm, o.out + "/train_representation.csv");
    write_representation(test_rep, run.test_norm, o.out + "/test_representation.csv");
    write_scatter(x_panel, ts.labels, o.out + "/scatter_x.csv");
    write_scatter(mu_panel, ts.labels, o.out + "/scatter_mu.csv");
    write_scatter(z_panel, ts.labels, o.out + "/scatter_z.csv");
    write_scatter(test_rep.values, ts.labels, o.out + "/scatter_zhat.csv");

    json report;
    report["command"] = "simulate";
    report["seed"] = o.cfg.seed;
    report["epochs"] = o.cfg.epochs;
    report["lr"] = o.cfg.lr;
    report["scale"] = o.scale;
    report["blob_std"] = o.blob_std;
    report["raw_x"] = eval_json(raw_eval);
    report["reconstruction_zhat"] = eval_json(rep_eval);
    report["artifacts"] = {"model.bin",           "loss_history.csv", "train_representation.csv",
                           "test_representation.csv", "scatter_x.csv", "scatter_mu.csv",
                           "scatter_z.csv",       "scatter_zhat.csv"};
    write_json(report, o.out + "/report.json");

    print_eval_table("simulation: raw x vs reconstruction representation",
                     {"normalized x", "zhat"}, {raw_eval, rep_eval});
    return 0;
}

struct AblateOpts {
    TrainConfig cfg;
    DataOpts data;
    double scale = 20.0;
    std::size_t trees = 100;
    std::string out = "out";
};

int cmd_ablate(const AblateOpts& o) {
    auto [train_raw, test_raw] = load_pair(o.data, o.cfg.seed);

    std::vector<std::string> names{"ctvae-transform", "ctvae-fix"};
    std::vector<EvalNumbers> rows;
    json report;
    report["command"] = "ablate";
    report["seed"] = o.cfg.seed;
    report["epochs"] = o.cfg.epochs;
    report["lr"] = o.cfg.lr;
    report["scale"] = o.scale;

    for (bool fixed : {false, true}) {
        TrainedRun run = run_training(ModelKind::CTVAE, train_raw, test_raw, o.cfg, /*d_z=*/0,
                                      o.scale, fixed, {1.0, 1.0, 1.0, 1.0});
        Representation train_rep = extract(run.model, run.train_norm.features);
        Representation test_rep = extract(run.model, run.test_norm.features);
        EvalNumbers n = evaluate_rep(train_rep.values, run.train_norm.labels, test_rep.values,
                                     run.test_norm.labels, o.trees, o.cfg.seed);
        rows.push_back(n);
        report[fixed ? "ctvae_fix" : "ctvae_transform"] = eval_json(n);
    }

    ensure_out(o.out);
    write_json(report, o.out + "/ablate_report.json");
    print_eval_table("ablation: mean transform vs fixed means", names, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CTVAE representation-learning pipeline"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags override");

    TrainOpts t;
    CLI::App* train_cmd = app.add_subcommand("train", "train a representation model");
    train_cmd->add_option("--model", t.model, "ae | vae | tvae | ctvae");
    add_csv_opts(train_cmd, t.data);
    add_blob_opts(train_cmd, t.data);
    train_cmd->add_option("--epochs", t.cfg.epochs);
    train_cmd->add_option("--batch-size", t.cfg.batch_size);
    train_cmd->add_option("--lr", t.cfg.lr);
    train_cmd->add_option("--seed", t.cfg.seed);
    train_cmd->add_option("--mc-samples", t.cfg.mc_samples);
    train_cmd->add_option("--d-z", t.d_z, "latent width override (default round(sqrt(d)))");
    train_cmd->add_option("--scale", t.scale, "mean-dispersal scale S");
    train_cmd->add_flag("--fixed-means", t.fixed_means_flag,
                        "use constant-vector prior means (ablation variant)");
    train_cmd->add_option("--betas", t.betas, "beta1..beta4")->expected(4);
    train_cmd->add_option("--out", t.out);

    ExtractOpts x;
    CLI::App* extract_cmd = app.add_subcommand("extract", "write a representation CSV");
    extract_cmd->add_option("--model-file", x.model_file)->required();
    add_csv_opts(extract_cmd, x.data);
    extract_cmd->add_option("--out", x.out);

    EvalOpts e;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a representation with a random forest");
    eval_cmd->add_option("--train-csv", e.train_csv)->required();
    eval_cmd->add_option("--test-csv", e.test_csv)->required();
    eval_cmd->add_option("--compare-train-csv", e.compare_train_csv);
    eval_cmd->add_option("--compare-test-csv", e.compare_test_csv);
    eval_cmd->add_option("--label-col", e.label_col);
    eval_cmd->add_flag("--no-header", e.no_header);
    eval_cmd->add_option("--trees", e.trees);
    eval_cmd->add_option("--seed", e.seed);
    eval_cmd->add_option("--out", e.out);

    RelabelOpts r;
    CLI::App* relabel_cmd =
        app.add_subcommand("relabel", "split the majority class into pseudo-classes");
    add_csv_opts(relabel_cmd, r.data);
    relabel_cmd->add_option("--majority", r.majority, "class name, or 'auto' for the largest");
    relabel_cmd->add_option("--k-list", r.k_list, "candidate cluster counts");
    relabel_cmd->add_option("--seed", r.seed);
    relabel_cmd->add_option("--out", r.out);

    SimulateOpts s;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "synthetic pipeline: blobs -> ctvae(d_z=2) -> extract -> eval + scatter data");
    sim_cmd->add_option("--epochs", s.cfg.epochs);
    sim_cmd->add_option("--batch-size", s.cfg.batch_size)->default_val(20);
    sim_cmd->add_option("--lr", s.cfg.lr)->default_val(1e-2);
    sim_cmd->add_option("--seed", s.cfg.seed);
    sim_cmd->add_option("--blob-std", s.blob_std);
    sim_cmd->add_option("--scale", s.scale)->default_val(0.5);
    sim_cmd->add_option("--trees", s.trees);
    sim_cmd->add_option("--out", s.out);

    AblateOpts a;
    CLI::App* ablate_cmd =
        app.add_subcommand("ablate", "ctvae-transform vs ctvae-fix on the same data and seed");
    add_blob_opts(ablate_cmd, a.data);
    ablate_cmd->add_option("--epochs", a.cfg.epochs);
    ablate_cmd->add_option("--batch-size", a.cfg.batch_size)->default_val(20);
    ablate_cmd->add_option("--lr", a.cfg.lr)->default_val(1e-2);
    ablate_cmd->add_option("--seed", a.cfg.seed);
    ablate_cmd->add_option("--scale", a.scale)->default_val(0.5);
    ablate_cmd->add_option("--trees", a.trees);
    ablate_cmd->add_option("--out", a.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return cmd_train(t);
        if (*extract_cmd) return cmd_extract(x);
        if (*eval_cmd) return cmd_eval(e);
        if (*relabel_cmd) return cmd_relabel(r);
        if (*sim_cmd) return cmd_simulate(s);
        if (*ablate_cmd) return cmd_ablate(a);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
