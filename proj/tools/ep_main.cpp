// Command line front end: train / infer / evaluate / reproduce / inspect.
// All numeric work lives in the library; this file only wires files and
// flags together.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ep/dataset_io.hpp"
#include "ep/errors.hpp"
#include "ep/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string dataset;
    std::optional<bool> directed_override;
    std::uint64_t seed = 42;
    std::size_t workers = 1;
};

struct TrainOptions {
    CommonOptions common;
    double gamma = 1.0;
    double learning_rate = 0.001;
    std::size_t batch_size = 64;
    std::size_t epochs = 200;
    std::int64_t kappa = 0; // 0 = unbounded
    std::size_t dim = 128;
    std::size_t negatives = 1;
    bool relations = false;
    std::string out;
};

DatasetManifest load_manifest(const CommonOptions& common) {
    if (common.dataset.empty()) {
        throw std::invalid_argument("--dataset is required (flag or config file)");
    }
    DatasetManifest manifest = DatasetManifest::from_file(common.dataset);
    if (common.directed_override) manifest.directed = *common.directed_override;
    return manifest;
}

// Flat "key = value" run config; command line flags win. CLI11 option names
// double as the key names.
void apply_config_file(CLI::App* sub, const std::string& path) {
    const KeyValueFile kv = KeyValueFile::parse(path);
    for (const auto& [key, value] : kv.entries) {
        if (key == "config") throw std::invalid_argument("config files cannot nest");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw std::invalid_argument("unknown config key '" + key + "' in " + path);
        }
        if (opt->count() > 0) continue; // set on the command line
        if (opt->get_expected_min() == 0) {
            // Flag: only an explicit true should trip it.
            if (value == "true" || value == "1" || value == "yes") {
                opt->add_result("true");
                opt->run_callback();
            } else if (value != "false" && value != "0" && value != "no") {
                throw std::invalid_argument("expected a boolean for config key '" + key + "'");
            }
            continue;
        }
        opt->add_result(value);
        opt->run_callback();
    }
}

void require_value(const std::string& value, const std::string& flag) {
    if (value.empty()) {
        throw std::invalid_argument(flag + " is required (flag or config file)");
    }
}

TrainingConfig to_config(const TrainOptions& opt) {
    TrainingConfig cfg;
    cfg.margin = opt.gamma;
    cfg.learning_rate = opt.learning_rate;
    cfg.batch_size = opt.batch_size;
    cfg.epochs = opt.epochs;
    if (opt.kappa > 0) cfg.neighbor_cap = static_cast<std::size_t>(opt.kappa);
    cfg.seed = opt.common.seed;
    cfg.negatives_per_vertex = opt.negatives;
    cfg.use_relations = opt.relations;
    cfg.validate();
    return cfg;
}

void write_run_manifest(const fs::path& dir, const TrainOptions& opt, bool directed) {
    std::ofstream out(dir / "run_manifest.txt");
    out << "version = " << kVersion << "\n";
    out << "dataset = " << fs::absolute(opt.common.dataset).string() << "\n";
    out << "directed = " << (directed ? "true" : "false") << "\n";
    out << "gamma = " << opt.gamma << "\n";
    out << "learning_rate = " << opt.learning_rate << "\n";
    out << "batch_size = " << opt.batch_size << "\n";
    out << "epochs = " << opt.epochs << "\n";
    out << "kappa = " << opt.kappa << "\n";
    out << "dim = " << opt.dim << "\n";
    out << "negatives = " << opt.negatives << "\n";
    out << "relations = " << (opt.relations ? "true" : "false") << "\n";
    out << "seed = " << opt.common.seed << "\n";
}

void print_summary_line(const std::string& label, const MetricsSummary& s, bool single_label) {
    if (single_label) {
        std::printf("%s: accuracy %.2f ± %.2f\n", label.c_str(), 100.0 * s.mean.accuracy,
                    100.0 * s.stddev.accuracy);
    } else {
        std::printf("%s: micro-F1 %.2f ± %.2f, macro-F1 %.2f ± %.2f\n", label.c_str(),
                    100.0 * s.mean.micro_f1, 100.0 * s.stddev.micro_f1, 100.0 * s.mean.macro_f1,
                    100.0 * s.stddev.macro_f1);
    }
}

bool dataset_is_single_label(const ParsedDataset& dataset) {
    for (const auto& cs : dataset.classes) {
        if (cs.size() > 1) return false;
    }
    return true;
}

int cmd_train(const TrainOptions& opt) {
    require_value(opt.out, "--out");
    const DatasetManifest manifest = load_manifest(opt.common);
    const ParsedDataset dataset = load_dataset(manifest);
    if (dataset.stats.dropped_self_loops > 0) {
        std::fprintf(stderr, "warning: dropped %zu self-loop(s)\n",
                     dataset.stats.dropped_self_loops);
    }

    const TrainingConfig cfg = to_config(opt);
    ModelDims dims;
    dims.default_dim = opt.dim;

    const TrainedModel model = train_model(dataset, cfg, dims, opt.common.workers);
    fs::create_directories(opt.out);
    save_model(opt.out, model, dataset);
    write_run_manifest(opt.out, opt, dataset.graph.directed());

    std::printf("trained %zu epochs on %zu vertices, %zu edges; %zu parameters\n", cfg.epochs,
                dataset.graph.num_vertices(), dataset.graph.num_edges(),
                parameter_count(model.tables,
                                model.relations.empty() ? nullptr : &model.relations));
    if (!model.reports.empty()) {
        std::printf("first/final mean batch loss: %.6f / %.6f\n",
                    model.reports.front().mean_batch_loss, model.reports.back().mean_batch_loss);
    }
    return kExitOk;
}

int cmd_infer(const CommonOptions& common, const std::string& model_dir,
              const std::string& spec_file, const std::string& out_dir) {
    require_value(model_dir, "--model");
    require_value(spec_file, "--nodes");
    const DatasetManifest manifest = load_manifest(common);
    const ParsedDataset dataset = load_dataset(manifest);

    auto completed = complete_with_dummy_labels(dataset.graph, dataset.vocab);
    std::vector<EmbeddingTable> tables = load_tables(model_dir, completed.second);
    const TrainedModel model{std::move(completed.first), std::move(completed.second),
                             std::move(tables), {}, {}};

    std::vector<std::string> type_names;
    for (std::size_t t = 0; t < model.vocab.num_types(); ++t) {
        type_names.push_back(model.vocab.type_name(t));
    }
    const std::vector<HeldOutNode> nodes =
        load_new_node_spec(spec_file, type_names, manifest.delimiter);

    const InductiveEmbedding embedded = held_out_representations(model, dataset, nodes);

    const fs::path out = out_dir.empty() ? fs::path(model_dir) : fs::path(out_dir);
    fs::create_directories(out);
    std::size_t accepted = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) accepted += !embedded.rejected[j];

    std::vector<std::string> accepted_ids;
    Matrix rows(accepted, embedded.reps.cols);
    std::size_t next = 0;
    std::ofstream rejects(out / "rejects.txt");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (embedded.rejected[j]) {
            rejects << nodes[j].name << "\tno neighbor present in the trained graph\n";
            continue;
        }
        accepted_ids.push_back(nodes[j].name);
        std::copy(embedded.reps.row(j).begin(), embedded.reps.row(j).end(),
                  rows.row(next).begin());
        ++next;
    }
    save_embeddings(out / "inductive.emb", accepted_ids, rows);
    if (accepted < nodes.size()) {
        std::fprintf(stderr, "warning: %zu node(s) rejected, see %s\n", nodes.size() - accepted,
                     (out / "rejects.txt").string().c_str());
    }
    std::printf("embedded %zu of %zu new nodes\n", accepted, nodes.size());
    return kExitOk;
}

int cmd_evaluate(const CommonOptions& common, const std::string& embeddings_file,
                 const std::string& protocol, std::size_t repetitions, std::size_t per_class_n,
                 std::size_t n_test, std::size_t n_val, const std::vector<double>& fractions,
                 const std::string& out_dir) {
    require_value(embeddings_file, "--embeddings");
    const DatasetManifest manifest = load_manifest(common);
    const ParsedDataset dataset = load_dataset(manifest);

    auto [ids, values] = load_embeddings(embeddings_file);
    if (values.rows != dataset.graph.num_vertices()) {
        throw FormatError("embedding file has " + std::to_string(values.rows) +
                          " rows, dataset has " + std::to_string(dataset.graph.num_vertices()) +
                          " vertices");
    }
    Matrix reps(values.rows, values.cols);
    for (std::size_t row = 0; row < values.rows; ++row) {
        const auto it = dataset.vertex_ids.find(ids[row]);
        if (it == dataset.vertex_ids.end()) {
            throw FormatError("embedding row '" + ids[row] + "' is not a dataset vertex");
        }
        std::copy(values.row(row).begin(), values.row(row).end(), reps.row(it->second).begin());
    }

    EvalOptions options;
    options.repetitions = repetitions;
    options.per_class_n = per_class_n;
    options.n_test = n_test;
    options.n_val = n_val;
    options.seed = common.seed;
    options.num_threads = common.workers;

    fs::create_directories(out_dir);
    const bool single_label = dataset_is_single_label(dataset);

    if (protocol == "per-class") {
        const MetricsSummary summary =
            evaluate_per_class(reps, dataset.classes, dataset.class_names.size(), options);
        save_metrics(fs::path(out_dir) / "metrics.tsv", summary);
        for (std::size_t r = 0; r < repetitions; ++r) {
            const Split split = make_per_class_split(dataset.classes, per_class_n, n_test, n_val,
                                                     common.seed + r);
            save_split(fs::path(out_dir) / ("split_run" + std::to_string(r) + ".tsv"), split);
        }
        print_summary_line("per-class protocol", summary, single_label);
    } else {
        for (double tr : fractions) {
            options.train_fraction = tr;
            const MetricsSummary summary =
                evaluate_fraction(reps, dataset.classes, dataset.class_names.size(), options);
            const int percent = static_cast<int>(tr * 100.0 + 0.5);
            save_metrics(fs::path(out_dir) / ("metrics_tr" + std::to_string(percent) + ".tsv"),
                         summary);
            print_summary_line("T_r = " + std::to_string(percent) + "%", summary, single_label);
        }
    }
    return kExitOk;
}

int cmd_inspect(const CommonOptions& common) {
    const DatasetManifest manifest = load_manifest(common);
    const ParsedDataset ds = load_dataset(manifest);
    double degree_sum = 0.0;
    for (std::size_t v = 0; v < ds.graph.num_vertices(); ++v) {
        degree_sum += static_cast<double>(ds.graph.degree(static_cast<VertexId>(v)));
    }
    std::printf("vertices:          %zu\n", ds.stats.vertices);
    std::printf("edges:             %zu (dropped %zu duplicate, %zu self-loop)\n", ds.stats.edges,
                ds.stats.dropped_duplicate_edges, ds.stats.dropped_self_loops);
    std::printf("directed:          %s\n", ds.graph.directed() ? "true" : "false");
    std::printf("classes:           %zu\n", ds.stats.num_classes);
    std::printf("label types (k):   %zu\n", ds.vocab.num_types());
    for (const auto& [name, count] : ds.stats.labels_per_type) {
        std::printf("  %-16s %zu labels\n", name.c_str(), count);
    }
    std::printf("mean |N(v)|:       %.3f\n",
                degree_sum / static_cast<double>(ds.graph.num_vertices()));
    std::printf("max degree:        %zu\n", ds.graph.max_degree());
    return kExitOk;
}

struct PaperRow {
    double gamma;
    double mean;
    double std;
};

// Reported accuracy (citation networks) / micro-F1 at T_r = 50% (BlogCatalog)
// with the margin each column used.
std::optional<PaperRow> paper_row(const std::string& name, const std::string& setting) {
    if (name == "cora") {
        if (setting == "transductive") return PaperRow{20.0, 78.05, 1.49};
        if (setting == "inductive") return PaperRow{5.0, 73.09, 1.75};
        if (setting == "directed") return PaperRow{20.0, 77.31, 1.43};
    } else if (name == "citeseer") {
        if (setting == "transductive") return PaperRow{10.0, 71.01, 1.35};
        if (setting == "inductive") return PaperRow{5.0, 68.61, 1.69};
        if (setting == "directed") return PaperRow{5.0, 70.21, 1.17};
    } else if (name == "pubmed") {
        if (setting == "transductive") return PaperRow{1.0, 79.56, 2.10};
        if (setting == "inductive") return PaperRow{1.0, 79.94, 2.30};
        if (setting == "directed") return PaperRow{1.0, 78.77, 2.06};
    } else if (name == "blogcatalog") {
        if (setting == "transductive") return PaperRow{1.0, 39.44, 0.29};
    }
    return std::nullopt;
}

int cmd_reproduce(const std::string& name, const std::string& setting,
                  const std::string& data_dir, std::size_t repetitions, std::uint64_t seed,
                  std::size_t workers, const std::string& out_dir) {
    const auto row = paper_row(name, setting);
    if (!row) {
        std::fprintf(stderr, "no reference configuration for %s/%s\n", name.c_str(),
                     setting.c_str());
        return kExitUsage;
    }
    const fs::path manifest_path = fs::path(data_dir) / name / (name + ".manifest");
    DatasetManifest manifest = DatasetManifest::from_file(manifest_path);
    if (setting == "directed") manifest.directed = true;
    const ParsedDataset dataset = load_dataset(manifest);

    TrainingConfig cfg;
    cfg.margin = row->gamma;
    cfg.seed = seed;
    if (name == "blogcatalog") cfg.neighbor_cap = 50; // dense graph

    EvalOptions options;
    options.repetitions = repetitions;
    options.seed = seed;
    options.num_threads = workers;

    const ModelDims dims;
    MetricsSummary summary;
    const bool single_label = dataset_is_single_label(dataset);

    if (setting == "inductive") {
        summary = evaluate_inductive_per_class(dataset, cfg, dims, options, workers);
    } else {
        const TrainedModel model = train_model(dataset, cfg, dims, workers);
        const Matrix reps = node_representations(model);
        if (name == "blogcatalog") {
            options.train_fraction = 0.5;
            summary =
                evaluate_fraction(reps, dataset.classes, dataset.class_names.size(), options);
        } else {
            summary =
                evaluate_per_class(reps, dataset.classes, dataset.class_names.size(), options);
        }
    }

    const double ours = 100.0 * (single_label ? summary.mean.accuracy : summary.mean.micro_f1);
    const double ours_std =
        100.0 * (single_label ? summary.stddev.accuracy : summary.stddev.micro_f1);
    std::printf("%s %s (gamma = %g): ours %.2f ± %.2f | reported %.2f ± %.2f\n", name.c_str(),
                setting.c_str(), row->gamma, ours, ours_std, row->mean, row->std);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        save_metrics(fs::path(out_dir) / (name + "_" + setting + "_metrics.tsv"), summary);
    }
    return kExitOk;
}

void add_common(CLI::App* sub, CommonOptions& common, std::string& config_path) {
    sub->add_option("--dataset", common.dataset, "Dataset manifest file");
    sub->add_flag_callback(
        "--directed", [&common] { common.directed_override = true; },
        "Treat edges as directed regardless of the manifest");
    sub->add_option("--seed", common.seed, "Run seed; all randomness derives from it");
    sub->add_option("--workers", common.workers, "Worker threads for batches and classifiers");
    sub->add_option("--config", config_path, "Flat key = value run config; flags win");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised label/node embeddings for attributed graphs"};
    app.require_subcommand(1);

    TrainOptions train_opt;
    std::string train_config;
    CLI::App* train_cmd = app.add_subcommand("train", "Learn label embeddings");
    add_common(train_cmd, train_opt.common, train_config);
    train_cmd->add_option("--gamma", train_opt.gamma, "Ranking loss margin");
    train_cmd->add_option("--lr", train_opt.learning_rate, "Adam learning rate");
    train_cmd->add_option("--batch-size", train_opt.batch_size, "Mini-batch size");
    train_cmd->add_option("--epochs", train_opt.epochs, "Training epochs");
    train_cmd->add_option("--kappa", train_opt.kappa, "Neighbor sample bound (0 = all neighbors)");
    train_cmd->add_option("--dim", train_opt.dim, "Embedding dimension per label type");
    train_cmd->add_option("--negatives", train_opt.negatives, "Negative samples per vertex/type");
    train_cmd->add_flag("--relations", train_opt.relations, "Learn per-edge-type vectors");
    train_cmd->add_option("--out", train_opt.out, "Output directory");

    CommonOptions infer_common;
    std::string infer_config, infer_model, infer_spec, infer_out;
    CLI::App* infer_cmd = app.add_subcommand("infer", "Embed unseen nodes from trained tables");
    add_common(infer_cmd, infer_common, infer_config);
    infer_cmd->add_option("--model", infer_model, "Directory written by train");
    infer_cmd->add_option("--nodes", infer_spec, "New-node spec file");
    infer_cmd->add_option("--out", infer_out, "Output directory (default: model dir)");

    CommonOptions eval_common;
    std::string eval_config, eval_embeddings, eval_protocol = "per-class", eval_out = ".";
    std::size_t eval_reps = 10, eval_per_class = 20, eval_test = 1000, eval_val = 1000;
    std::vector<double> eval_fractions{0.5};
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Classify on frozen embeddings");
    add_common(eval_cmd, eval_common, eval_config);
    eval_cmd->add_option("--embeddings", eval_embeddings, "nodes.emb file");
    eval_cmd->add_option("--protocol", eval_protocol, "per-class | fraction")
        ->check(CLI::IsMember({"per-class", "fraction"}));
    eval_cmd->add_option("--repetitions", eval_reps, "Independent splits");
    eval_cmd->add_option("--per-class-n", eval_per_class, "Train vertices per class");
    eval_cmd->add_option("--n-test", eval_test, "Test vertices (per-class protocol)");
    eval_cmd->add_option("--n-val", eval_val, "Validation vertices (per-class protocol)");
    eval_cmd->add_option("--tr", eval_fractions, "Train fraction sweep (fraction protocol)")
        ->delimiter(',');
    eval_cmd->add_option("--out", eval_out, "Output directory");

    std::string rep_name, rep_setting = "transductive", rep_data = "data", rep_out;
    std::size_t rep_repetitions = 10, rep_workers = 1;
    std::uint64_t rep_seed = 42;
    CLI::App* rep_cmd = app.add_subcommand("reproduce", "Run a full reported configuration");
    rep_cmd->add_option("--name", rep_name, "cora | citeseer | pubmed | blogcatalog")->required();
    rep_cmd->add_option("--setting", rep_setting, "transductive | inductive | directed")
        ->check(CLI::IsMember({"transductive", "inductive", "directed"}));
    rep_cmd->add_option("--data-dir", rep_data, "Directory holding prepared datasets");
    rep_cmd->add_option("--repetitions", rep_repetitions, "Evaluation repetitions");
    rep_cmd->add_option("--seed", rep_seed, "Run seed");
    rep_cmd->add_option("--workers", rep_workers, "Worker threads");
    rep_cmd->add_option("--out", rep_out, "Directory for metric files");

    CommonOptions inspect_common;
    std::string inspect_config;
    CLI::App* inspect_cmd = app.add_subcommand("inspect", "Print dataset statistics");
    add_common(inspect_cmd, inspect_common, inspect_config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (train_cmd->parsed() && !train_config.empty()) {
            apply_config_file(train_cmd, train_config);
        }
        if (infer_cmd->parsed() && !infer_config.empty()) {
            apply_config_file(infer_cmd, infer_config);
        }
        if (eval_cmd->parsed() && !eval_config.empty()) {
            apply_config_file(eval_cmd, eval_config);
        }
        if (inspect_cmd->parsed() && !inspect_config.empty()) {
            apply_config_file(inspect_cmd, inspect_config);
        }
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_opt);
        if (infer_cmd->parsed()) return cmd_infer(infer_common, infer_model, infer_spec, infer_out);
        if (eval_cmd->parsed()) {
            return cmd_evaluate(eval_common, eval_embeddings, eval_protocol, eval_reps,
                                eval_per_class, eval_test, eval_val, eval_fractions, eval_out);
        }
        if (rep_cmd->parsed()) {
            return cmd_reproduce(rep_name, rep_setting, rep_data, rep_repetitions, rep_seed,
                                 rep_workers, rep_out);
        }
        if (inspect_cmd->parsed()) return cmd_inspect(inspect_common);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
