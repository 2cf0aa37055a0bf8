#include "ep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ep/errors.hpp"
#include "ep/rng.hpp"

namespace ep {

TrainedModel train_model(const ParsedDataset& dataset, const TrainingConfig& config,
                         const ModelDims& dims, std::size_t num_workers) {
    auto [graph, vocab] = complete_with_dummy_labels(dataset.graph, dataset.vocab);

    std::vector<EmbeddingTable> tables;
    tables.reserve(vocab.num_types());
    for (std::size_t t = 0; t < vocab.num_types(); ++t) {
        const std::string& name = vocab.type_name(t);
        Rng rng = make_substream(config.seed, "init/" + name);
        tables.push_back(EmbeddingTable::glorot(t, vocab.size(t), dims.dim_for(name), rng));
    }

    std::vector<RelationTable> relations;
    if (config.use_relations) {
        std::set<EdgeTypeId> edge_types;
        for (const Edge& e : graph.edges()) edge_types.insert(e.type);
        for (std::size_t t = 0; t < vocab.num_types(); ++t) {
            Rng rng = make_substream(config.seed, "relations/" + vocab.type_name(t));
            RelationTable rel(tables[t].dim());
            const double limit = std::sqrt(6.0 / static_cast<double>(edge_types.size() + rel.dim()));
            std::vector<double> value(rel.dim());
            for (EdgeTypeId type : edge_types) {
                for (double& x : value) x = uniform_real(rng, -limit, limit);
                rel.add(type, value);
            }
            relations.push_back(std::move(rel));
        }
    }

    TrainResult result =
        train(graph, tables, config.use_relations ? &relations : nullptr, config, num_workers);

    return TrainedModel{std::move(graph), std::move(vocab), std::move(tables),
                        std::move(relations), std::move(result.reports)};
}

Matrix node_representations(const TrainedModel& model) {
    Matrix reps(model.graph.num_vertices(), model.representation_dim());
    for (std::size_t v = 0; v < model.graph.num_vertices(); ++v) {
        const NodeRepresentation rep =
            node_representation(model.graph, model.tables, static_cast<VertexId>(v));
        std::copy(rep.values.begin(), rep.values.end(), reps.row(v).begin());
    }
    return reps;
}

InductiveEmbedding held_out_representations(const TrainedModel& model,
                                            const ParsedDataset& train_dataset,
                                            std::span<const HeldOutNode> nodes) {
    const std::size_t n_kept = model.graph.num_vertices();

    // One augmented graph holds all new nodes; they only connect to trained
    // vertices, so they cannot contaminate each other's reconstructions.
    std::vector<Edge> edges = model.graph.edges();
    std::vector<std::vector<VertexId>> resolved(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const VertexId new_id = static_cast<VertexId>(n_kept + j);
        for (const std::string& name : nodes[j].neighbors) {
            const auto it = train_dataset.vertex_ids.find(name);
            if (it == train_dataset.vertex_ids.end()) continue; // not in the training graph
            resolved[j].push_back(it->second);
            // Directed or not, (trained -> new) puts the trained vertex in
            // N(new_id).
            edges.push_back(Edge{it->second, new_id, kNoEdgeType});
        }
    }

    LabelAssignments labels = model.graph.all_labels();
    for (auto& per_vertex : labels) per_vertex.resize(n_kept + nodes.size());
    const LabeledGraph augmented(n_kept + nodes.size(), std::move(edges), model.graph.directed(),
                                 std::move(labels));

    InductiveEmbedding out;
    out.reps = Matrix(nodes.size(), model.representation_dim());
    out.rejected.assign(nodes.size(), false);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (resolved[j].empty()) {
            out.rejected[j] = true; // row stays zero
            continue;
        }
        const NodeRepresentation rep = inductive_node_representation(
            augmented, model.tables, static_cast<VertexId>(n_kept + j));
        std::copy(rep.values.begin(), rep.values.end(), out.reps.row(j).begin());
    }
    return out;
}

namespace {

bool is_single_label(const ClassLabels& classes) {
    for (const auto& cs : classes) {
        if (cs.size() > 1) return false;
    }
    return true;
}

std::vector<std::size_t> true_counts(const ClassLabels& classes) {
    std::vector<std::size_t> counts(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) counts[i] = classes[i].size();
    return counts;
}

Metrics run_once(const Matrix& reps, const Split& split, double lambda, std::size_t num_classes,
                 std::size_t num_threads) {
    const ClassifierModel model = fit_logistic(reps, split, lambda, num_classes, num_threads);
    const auto counts = true_counts(split.test_classes);
    const auto predictions = predict_multilabel(model, reps, split.test, counts);
    return compute_metrics(predictions, split.test_classes, num_classes);
}

double validation_score(const Matrix& reps, const Split& split, double lambda,
                        std::size_t num_classes, bool single_label, std::size_t num_threads) {
    const ClassifierModel model = fit_logistic(reps, split, lambda, num_classes, num_threads);
    const auto counts = true_counts(split.validation_classes);
    const auto predictions = predict_multilabel(model, reps, split.validation, counts);
    const Metrics m = compute_metrics(predictions, split.validation_classes, num_classes);
    return single_label ? m.accuracy : m.micro_f1;
}

} // namespace

MetricsSummary evaluate_per_class(const Matrix& representations, const ClassLabels& classes,
                                  std::size_t num_classes, const EvalOptions& options) {
    const bool single_label = is_single_label(classes);
    std::vector<Metrics> runs;
    runs.reserve(options.repetitions);
    for (std::size_t r = 0; r < options.repetitions; ++r) {
        const Split split = make_per_class_split(classes, options.per_class_n, options.n_test,
                                                 options.n_val, options.seed + r);
        const double single_margin[] = {1.0}; // margin is fixed upstream of evaluation
        const auto [margin, lambda] = select_hyperparameters(
            single_margin, options.lambda_grid, [&](double, double l) {
                return validation_score(representations, split, l, num_classes, single_label,
                                        options.num_threads);
            });
        (void)margin;
        runs.push_back(run_once(representations, split, lambda, num_classes, options.num_threads));
    }
    return summarize(std::move(runs));
}

MetricsSummary evaluate_fraction(const Matrix& representations, const ClassLabels& classes,
                                 std::size_t num_classes, const EvalOptions& options) {
    // The L2 strength is selected once per train fraction (3-fold CV on the
    // first split's train portion) and reused across the repetitions.
    const Split first = make_fraction_split(classes, options.train_fraction, options.seed);
    const double single_margin[] = {1.0}; // margin is fixed upstream of evaluation
    const auto [margin, lambda] = select_hyperparameters(
        single_margin, options.lambda_grid, [&](double, double l) {
            return cross_validate_micro_f1(representations, first.train, classes, num_classes, l,
                                           3, options.seed, options.num_threads);
        });
    (void)margin;

    std::vector<Metrics> runs;
    runs.reserve(options.repetitions);
    for (std::size_t r = 0; r < options.repetitions; ++r) {
        const Split split = r == 0
                                ? first
                                : make_fraction_split(classes, options.train_fraction,
                                                      options.seed + r);
        runs.push_back(run_once(representations, split, lambda, num_classes, options.num_threads));
    }
    return summarize(std::move(runs));
}

MetricsSummary evaluate_inductive_per_class(const ParsedDataset& dataset,
                                            const TrainingConfig& config, const ModelDims& dims,
                                            const EvalOptions& options, std::size_t num_workers) {
    const bool single_label = is_single_label(dataset.classes);
    const std::size_t num_classes = dataset.class_names.size();
    std::vector<Metrics> runs;
    runs.reserve(options.repetitions);

    for (std::size_t r = 0; r < options.repetitions; ++r) {
        const Split split = make_per_class_split(dataset.classes, options.per_class_n,
                                                 options.n_test, options.n_val, options.seed + r);
        const InductiveSplit ind = remove_nodes_for_inductive(dataset, split.test);

        TrainingConfig run_config = config;
        run_config.seed = config.seed + r;
        const TrainedModel model = train_model(ind.training, run_config, dims, num_workers);

        // Assemble per-original-vertex representations: transductive rows for
        // surviving vertices, reconstructed rows for the removed ones.
        Matrix reps(dataset.graph.num_vertices(), model.representation_dim());
        const Matrix kept = node_representations(model);
        for (std::size_t v = 0; v < ind.training.vertex_names.size(); ++v) {
            const VertexId orig = dataset.vertex_ids.at(ind.training.vertex_names[v]);
            std::copy(kept.row(v).begin(), kept.row(v).end(), reps.row(orig).begin());
        }
        const InductiveEmbedding held = held_out_representations(model, ind.training, ind.held_out);
        for (std::size_t j = 0; j < ind.held_out.size(); ++j) {
            const VertexId orig = dataset.vertex_ids.at(ind.held_out[j].name);
            std::copy(held.reps.row(j).begin(), held.reps.row(j).end(), reps.row(orig).begin());
        }

        const double single_margin[] = {config.margin};
        const auto [margin, lambda] = select_hyperparameters(
            single_margin, options.lambda_grid, [&](double, double l) {
                return validation_score(reps, split, l, num_classes, single_label,
                                        options.num_threads);
            });
        (void)margin;
        runs.push_back(run_once(reps, split, lambda, num_classes, options.num_threads));
    }
    return summarize(std::move(runs));
}

void save_model(const std::filesystem::path& directory, const TrainedModel& model,
                const ParsedDataset& dataset) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    for (std::size_t t = 0; t < model.tables.size(); ++t) {
        const EmbeddingTable& table = model.tables[t];
        std::vector<std::string> ids;
        ids.reserve(table.rows());
        Matrix values(table.rows(), table.dim());
        for (std::size_t row = 0; row < table.rows(); ++row) {
            ids.push_back(model.vocab.label_name(t, static_cast<LabelIndex>(row)));
            const auto src = table.row(static_cast<LabelIndex>(row));
            std::copy(src.begin(), src.end(), values.row(row).begin());
        }
        save_embeddings(directory / ("labels_" + model.vocab.type_name(t) + ".emb"), ids, values);
    }

    for (std::size_t t = 0; t < model.relations.size(); ++t) {
        const RelationTable& rel = model.relations[t];
        std::vector<std::string> ids;
        Matrix values(rel.size(), rel.dim());
        for (std::size_t s = 0; s < rel.size(); ++s) {
            const EdgeTypeId type = rel.edge_types()[s];
            ids.push_back(type == kNoEdgeType ? "__untyped__" : dataset.edge_type_names.at(type));
            const auto src = rel.row(static_cast<LabelIndex>(s));
            std::copy(src.begin(), src.end(), values.row(s).begin());
        }
        save_embeddings(directory / ("relations_" + model.vocab.type_name(t) + ".emb"), ids,
                        values);
    }

    const Matrix reps = node_representations(model);
    save_embeddings(directory / "nodes.emb", dataset.vertex_names, reps);
    save_loss_curve(directory / "loss_curve.tsv", model.reports);
}

std::vector<EmbeddingTable> load_tables(const std::filesystem::path& directory,
                                        const LabelVocabulary& vocab) {
    std::vector<EmbeddingTable> tables;
    for (std::size_t t = 0; t < vocab.num_types(); ++t) {
        const auto path = directory / ("labels_" + vocab.type_name(t) + ".emb");
        auto [ids, values] = load_embeddings(path);
        if (values.rows != vocab.size(t)) {
            throw FormatError(path.string() + ": " + std::to_string(values.rows) +
                              " rows, but the vocabulary for type '" + vocab.type_name(t) +
                              "' has " + std::to_string(vocab.size(t)) + " labels");
        }
        EmbeddingTable table(t, values.rows, values.cols);
        for (std::size_t row = 0; row < values.rows; ++row) {
            const auto index = vocab.find(t, ids[row]);
            if (!index) {
                throw FormatError(path.string() + ": unknown label '" + ids[row] + "'");
            }
            const auto src = values.row(row);
            std::copy(src.begin(), src.end(), table.row(*index).begin());
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

} // namespace ep
