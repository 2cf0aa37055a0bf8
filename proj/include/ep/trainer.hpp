#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ep/embedding.hpp"
#include "ep/graph.hpp"
#include "ep/rng.hpp"

namespace ep {

struct TrainingConfig {
    double margin = 1.0;          // gamma of the ranking loss
    double learning_rate = 0.001;
    std::size_t batch_size = 64;
    std::size_t epochs = 200;
    std::optional<std::size_t> neighbor_cap; // kappa; unset = use all neighbors
    std::uint64_t seed = 42;
    std::size_t negatives_per_vertex = 1; // per label type
    bool use_relations = false;

    void validate() const; // throws std::invalid_argument
};

struct LossReport {
    std::size_t epoch = 0;
    double mean_batch_loss = 0.0; // mean over batches of the batch's per-vertex mean loss
    std::vector<double> per_type_loss; // epoch mean per contributing vertex, per label type
    double wall_time_seconds = 0.0;
};

// Sparse row-indexed gradient accumulator for one table.
struct SparseGrad {
    explicit SparseGrad(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::span<const LabelIndex> touched_rows() const { return rows_; }

    // Get-or-create the (zero-initialized) gradient slice for a row.
    std::span<double> slot(LabelIndex row);
    std::span<const double> at(LabelIndex row) const; // throws if untouched

    void accumulate(const SparseGrad& other);
    void scale(double factor);
    void clear();

private:
    std::size_t dim_;
    std::vector<LabelIndex> rows_;
    std::vector<double> data_;
    std::unordered_map<LabelIndex, std::size_t> slot_of_;
};

// Lazy per-row Adam: moments and the bias-correction step counter are kept
// per row and advance only when the row receives a gradient.
struct AdamState {
    AdamState(std::size_t rows, std::size_t dim);

    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<double> m;
    std::vector<double> v;
    std::vector<std::uint64_t> step;

    void apply(std::span<double> params, const SparseGrad& grads, double learning_rate);
};

// [margin + d(recon, pos) - d(recon, neg)]_+ with d the Euclidean distance.
double margin_loss_term(std::span<const double> recon, std::span<const double> pos,
                        std::span<const double> neg, double margin);

// Uniform over V \ {v}. Throws CannotSampleError when num_vertices < 2.
VertexId sample_negative(VertexId v, std::size_t num_vertices, Rng& rng);

// N(v) exactly when the cap is unset or not binding (no rng draw in that
// case); otherwise a uniform without-replacement subset of size cap, returned
// sorted ascending.
std::vector<VertexId> sample_neighbors(const LabeledGraph& graph, VertexId v,
                                       std::optional<std::size_t> cap, Rng& rng);

struct VertexTerms {
    double loss = 0.0;
    std::vector<double> per_type_loss;
    std::vector<SparseGrad> table_grads;    // one per label type
    std::vector<SparseGrad> relation_grads; // one per label type, rows = relation slots
};

// Loss and sparse gradients of one vertex: the per-type margin terms summed
// over label types and the configured negatives. Gradient rows cover exactly
// the labels feeding the reconstruction, the positive mean, and the negative
// means (plus relation slots when enabled); hinge-inactive terms contribute
// nothing and the kink uses subgradient zero. Returns nullopt when
// `used_neighbors` is empty (vertex skipped).
std::optional<VertexTerms> vertex_loss_and_gradients(
    const LabeledGraph& graph, std::span<const EmbeddingTable> tables,
    const std::vector<RelationTable>* relations, const TrainingConfig& config, VertexId v,
    std::span<const std::vector<VertexId>> negatives, std::span<const VertexId> used_neighbors);

struct TrainResult {
    std::vector<LossReport> reports;
};

// Mini-batch training: per epoch, a seeded shuffle of all vertices is
// partitioned into batches; per batch, per-vertex gradients are reduced in
// ascending vertex id, averaged over the contributing vertices, and applied
// with one Adam step per table. Identical inputs and seed give bitwise
// identical tables, for any worker count.
TrainResult train(const LabeledGraph& graph, std::vector<EmbeddingTable>& tables,
                  std::vector<RelationTable>* relations, const TrainingConfig& config,
                  std::size_t num_workers = 1);

// Total learnable scalars.
std::size_t parameter_count(std::span<const EmbeddingTable> tables,
                            const std::vector<RelationTable>* relations);

} // namespace ep
