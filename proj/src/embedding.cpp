#include "ep/embedding.hpp"

#include <cmath>
#include <string>

#include "ep/errors.hpp"

namespace ep {

EmbeddingTable EmbeddingTable::glorot(std::size_t label_type, std::size_t rows, std::size_t dim,
                                      Rng& rng) {
    EmbeddingTable table(label_type, rows, dim);
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + dim));
    for (double& x : table.data_) x = uniform_real(rng, -limit, limit);
    return table;
}

bool EmbeddingTable::all_finite() const {
    for (double x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

LabelIndex RelationTable::slot(EdgeTypeId type) const {
    if (auto s = find_slot(type)) return *s;
    throw MissingRelationError("no relation vector for edge type " + std::to_string(type));
}

std::optional<LabelIndex> RelationTable::find_slot(EdgeTypeId type) const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i] == type) return static_cast<LabelIndex>(i);
    }
    return std::nullopt;
}

LabelIndex RelationTable::add(EdgeTypeId type, std::span<const double> value) {
    if (value.size() != dim_) throw ShapeError("relation vector dimension mismatch");
    if (find_slot(type)) throw std::logic_error("relation vector already present");
    ids_.push_back(type);
    data_.insert(data_.end(), value.begin(), value.end());
    return static_cast<LabelIndex>(ids_.size() - 1);
}

std::vector<double> label_type_embedding(const EmbeddingTable& table,
                                         std::span<const LabelIndex> labels) {
    if (labels.empty()) {
        throw EmptyLabelSetError("cannot average an empty label set; run dummy completion");
    }
    std::vector<double> acc(table.dim(), 0.0);
    for (LabelIndex l : labels) {
        const auto r = table.row(l);
        for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += r[d];
    }
    const double inv = 1.0 / static_cast<double>(labels.size());
    for (double& x : acc) x *= inv;
    return acc;
}

namespace {

// Shared core of the two reconstruction variants. `relations` may be null.
std::vector<double> reconstruct_impl(const LabeledGraph& graph, const EmbeddingTable& table,
                                     const RelationTable* relations, VertexId v, std::size_t type,
                                     std::optional<std::span<const VertexId>> sampled_neighbors) {
    const std::span<const VertexId> nbrs =
        sampled_neighbors ? *sampled_neighbors : graph.neighbors(v);
    if (nbrs.empty()) {
        throw NoNeighborsError("vertex " + std::to_string(v) + " has no neighbors to reconstruct from");
    }

    const auto full_nbrs = graph.neighbors(v);
    const auto full_types = graph.neighbor_edge_types(v);

    std::vector<double> acc(table.dim(), 0.0);
    std::size_t label_count = 0;
    std::size_t cursor = 0; // position in the full (sorted) adjacency
    for (VertexId u : nbrs) {
        std::span<const double> rel{};
        if (relations) {
            // Sampled sets are sorted subsets of the adjacency, so the edge
            // type lookup advances through it monotonically.
            while (cursor < full_nbrs.size() && full_nbrs[cursor] < u) ++cursor;
            if (cursor >= full_nbrs.size() || full_nbrs[cursor] != u) {
                throw std::invalid_argument("sampled neighbor " + std::to_string(u) +
                                            " is not adjacent to vertex " + std::to_string(v));
            }
            rel = relations->at(full_types[cursor]);
        }
        for (LabelIndex l : graph.labels(u, type)) {
            const auto r = table.row(l);
            if (relations) {
                for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += r[d] + rel[d];
            } else {
                for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += r[d];
            }
            ++label_count;
        }
    }
    if (label_count == 0) {
        throw EmptyLabelSetError("neighbors of vertex " + std::to_string(v) +
                                 " carry no labels of type " + std::to_string(type));
    }
    const double inv = 1.0 / static_cast<double>(label_count);
    for (double& x : acc) x *= inv;
    return acc;
}

} // namespace

std::vector<double> reconstruct_label_type_embedding(
    const LabeledGraph& graph, const EmbeddingTable& table, VertexId v, std::size_t type,
    std::optional<std::span<const VertexId>> sampled_neighbors) {
    return reconstruct_impl(graph, table, nullptr, v, type, sampled_neighbors);
}

std::vector<double> reconstruct_with_relations(
    const LabeledGraph& graph, const EmbeddingTable& table, const RelationTable& relations,
    VertexId v, std::size_t type, std::optional<std::span<const VertexId>> sampled_neighbors) {
    return reconstruct_impl(graph, table, &relations, v, type, sampled_neighbors);
}

NodeRepresentation node_representation(const LabeledGraph& graph,
                                       std::span<const EmbeddingTable> tables, VertexId v) {
    NodeRepresentation rep;
    for (std::size_t type = 0; type < tables.size(); ++type) {
        const auto h = label_type_embedding(tables[type], graph.labels(v, type));
        rep.offsets.emplace_back(rep.values.size(), h.size());
        rep.values.insert(rep.values.end(), h.begin(), h.end());
    }
    return rep;
}

NodeRepresentation inductive_node_representation(const LabeledGraph& graph,
                                                 std::span<const EmbeddingTable> tables,
                                                 VertexId v) {
    NodeRepresentation rep;
    for (std::size_t type = 0; type < tables.size(); ++type) {
        const auto h = reconstruct_label_type_embedding(graph, tables[type], v, type);
        rep.offsets.emplace_back(rep.values.size(), h.size());
        rep.values.insert(rep.values.end(), h.begin(), h.end());
    }
    return rep;
}

} // namespace ep
