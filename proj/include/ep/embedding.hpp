#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ep/graph.hpp"
#include "ep/rng.hpp"

namespace ep {

/*
 * Learnable lookup table: one dense embedding row per label of one type.
 * Rows cover the whole vocabulary of the type, dummy labels included.
 */
class EmbeddingTable {
public:
    EmbeddingTable(std::size_t label_type, std::size_t rows, std::size_t dim)
        : label_type_(label_type), rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

    // Glorot-uniform over [-sqrt(6/(rows+dim)), +sqrt(6/(rows+dim))].
    static EmbeddingTable glorot(std::size_t label_type, std::size_t rows, std::size_t dim,
                                 Rng& rng);

    std::size_t label_type() const { return label_type_; }
    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }

    std::span<double> row(LabelIndex i) { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> row(LabelIndex i) const { return {data_.data() + i * dim_, dim_}; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool all_finite() const;

private:
    std::size_t label_type_;
    std::size_t rows_;
    std::size_t dim_;
    std::vector<double> data_;
};

// One vector per edge type, added to every label embedding sent across an
// edge of that type during reconstruction.
class RelationTable {
public:
    explicit RelationTable(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }

    LabelIndex slot(EdgeTypeId type) const; // throws MissingRelationError
    std::optional<LabelIndex> find_slot(EdgeTypeId type) const;
    LabelIndex add(EdgeTypeId type, std::span<const double> value);

    std::span<const double> at(EdgeTypeId type) const { return row(slot(type)); }
    std::span<double> row(LabelIndex s) { return {data_.data() + s * dim_, dim_}; }
    std::span<const double> row(LabelIndex s) const { return {data_.data() + s * dim_, dim_}; }

    std::span<const EdgeTypeId> edge_types() const { return ids_; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

private:
    std::size_t dim_;
    std::vector<EdgeTypeId> ids_; // slot -> edge type, insertion order
    std::vector<double> data_;
};

struct NodeRepresentation {
    std::vector<double> values;
    // Per label type: (start, length) into values.
    std::vector<std::pair<std::size_t, std::size_t>> offsets;

    std::span<const double> slice(std::size_t type) const {
        const auto [start, len] = offsets.at(type);
        return {values.data() + start, len};
    }
};

// Element-wise mean of the rows for `labels`. Throws EmptyLabelSetError on an
// empty set (unreachable once dummy completion ran).
std::vector<double> label_type_embedding(const EmbeddingTable& table,
                                         std::span<const LabelIndex> labels);

// Reconstruction from the neighborhood:
//   (1 / |l_i(N(v))|) * sum over u in N(v), sum over l in l_i(u) of row(l),
// with labels counted with multiplicity across neighbors. When
// `sampled_neighbors` is given it replaces N(v) and must be sorted ascending
// so the summation order matches the unsampled call exactly.
std::vector<double> reconstruct_label_type_embedding(
    const LabeledGraph& graph, const EmbeddingTable& table, VertexId v, std::size_t type,
    std::optional<std::span<const VertexId>> sampled_neighbors = std::nullopt);

// Edge-type-aware variant: each transmitted label embedding is shifted by the
// relation vector of the edge it travels over.
std::vector<double> reconstruct_with_relations(
    const LabeledGraph& graph, const EmbeddingTable& table, const RelationTable& relations,
    VertexId v, std::size_t type,
    std::optional<std::span<const VertexId>> sampled_neighbors = std::nullopt);

// Concatenation of the per-type embeddings of v, in label-type order.
NodeRepresentation node_representation(const LabeledGraph& graph,
                                       std::span<const EmbeddingTable> tables, VertexId v);

// Representation for a vertex absent during training: concatenation of the
// per-type reconstructions from its (already embedded) neighbors. No
// parameter is touched. Throws NoNeighborsError for an isolated vertex.
NodeRepresentation inductive_node_representation(const LabeledGraph& graph,
                                                 std::span<const EmbeddingTable> tables,
                                                 VertexId v);

} // namespace ep
