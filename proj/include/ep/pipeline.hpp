#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ep/dataset_io.hpp"
#include "ep/embedding.hpp"
#include "ep/evaluator.hpp"
#include "ep/graph.hpp"
#include "ep/matrix.hpp"
#include "ep/trainer.hpp"

namespace ep {

inline constexpr std::string_view kVersion = "0.1.0";

struct ModelDims {
    std::size_t default_dim = 128;
    std::vector<std::pair<std::string, std::size_t>> per_type; // override by type name

    std::size_t dim_for(const std::string& type_name) const {
        for (const auto& [name, d] : per_type) {
            if (name == type_name) return d;
        }
        return default_dim;
    }
};

struct TrainedModel {
    LabeledGraph graph; // dummy-completed
    LabelVocabulary vocab;
    std::vector<EmbeddingTable> tables;
    std::vector<RelationTable> relations; // empty unless trained with relations
    std::vector<LossReport> reports;

    std::size_t representation_dim() const {
        std::size_t d = 0;
        for (const auto& t : tables) d += t.dim();
        return d;
    }
};

// Dummy completion, Glorot init (seeded per type), then mini-batch training.
TrainedModel train_model(const ParsedDataset& dataset, const TrainingConfig& config,
                         const ModelDims& dims = {}, std::size_t num_workers = 1);

// Per-vertex concatenated type embeddings, row = vertex id.
Matrix node_representations(const TrainedModel& model);

struct InductiveEmbedding {
    Matrix reps;                // row per held-out node, spec order
    std::vector<bool> rejected; // isolated nodes (no trained neighbor); rows stay zero
};

// Embeds held-out nodes against the trained graph without touching any
// parameter: each node's representation is the concatenated reconstruction
// from the neighbors that exist in the training graph.
InductiveEmbedding held_out_representations(const TrainedModel& model,
                                            const ParsedDataset& train_dataset,
                                            std::span<const HeldOutNode> nodes);

struct EvalOptions {
    std::size_t repetitions = 10;
    std::vector<double> lambda_grid = kDefaultLambdaGrid;
    std::size_t per_class_n = 20;
    std::size_t n_test = 1000;
    std::size_t n_val = 1000;
    double train_fraction = 0.5;
    std::uint64_t seed = 42;
    std::size_t num_threads = 1;
};

// Planetoid-style protocol on frozen representations: per repetition a fresh
// per-class split, L2 strength chosen on the validation set, metrics on test.
MetricsSummary evaluate_per_class(const Matrix& representations, const ClassLabels& classes,
                                  std::size_t num_classes, const EvalOptions& options);

// DeepWalk-style protocol: per repetition a fresh fraction split, L2 strength
// by 3-fold cross validation on the train portion, top-n prediction on test.
MetricsSummary evaluate_fraction(const Matrix& representations, const ClassLabels& classes,
                                 std::size_t num_classes, const EvalOptions& options);

// Full inductive protocol: per repetition, draw a per-class split, remove the
// test vertices from the graph, retrain from scratch, embed the removed
// vertices inductively and evaluate on them. Representation rows are indexed
// by the original vertex ids.
MetricsSummary evaluate_inductive_per_class(const ParsedDataset& dataset,
                                            const TrainingConfig& config, const ModelDims& dims,
                                            const EvalOptions& options,
                                            std::size_t num_workers = 1);

// Model directory layout: labels_<type>.emb per label type, nodes.emb,
// loss_curve.tsv, and relations_<type>.emb when present.
void save_model(const std::filesystem::path& directory, const TrainedModel& model,
                const ParsedDataset& dataset);

// Rebuilds the embedding tables from a model directory against the completed
// vocabulary (rows are matched by label name).
std::vector<EmbeddingTable> load_tables(const std::filesystem::path& directory,
                                        const LabelVocabulary& vocab);

} // namespace ep
