#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ep {

using VertexId = std::uint32_t;
using LabelIndex = std::uint32_t;
using EdgeTypeId = std::uint32_t;

inline constexpr EdgeTypeId kNoEdgeType = 0xffffffffu;

struct Edge {
    VertexId src;
    VertexId dst;
    EdgeTypeId type = kNoEdgeType;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Per label type: vertex id -> sorted label indices. Outer index is the type.
using LabelAssignments = std::vector<std::vector<std::vector<LabelIndex>>>;

/*
 * Immutable attributed graph with k label types.
 *
 * Construction canonicalizes the edge list: self-loops are dropped, parallel
 * edges are collapsed (undirected edges compare as unordered pairs), and the
 * result is sorted. Adjacency is stored as sorted arrays so that iteration
 * order is deterministic. For directed graphs the neighbor relation is the
 * in-neighbor set: sources of edges pointing at the queried vertex.
 */
class LabeledGraph {
public:
    LabeledGraph(std::size_t num_vertices, std::vector<Edge> edges, bool directed,
                 LabelAssignments labels);

    std::size_t num_vertices() const { return num_vertices_; }
    std::size_t num_edges() const { return edges_.size(); }
    bool directed() const { return directed_; }
    std::size_t num_label_types() const { return labels_.size(); }

    std::size_t dropped_self_loops() const { return dropped_self_loops_; }
    std::size_t dropped_duplicate_edges() const { return dropped_duplicates_; }
    bool has_edge_types() const { return has_edge_types_; }

    // Canonicalized edge list, sorted by (src, dst).
    const std::vector<Edge>& edges() const { return edges_; }

    // N(v), ascending vertex id. Throws std::out_of_range on an invalid id.
    std::span<const VertexId> neighbors(VertexId v) const;

    // Edge type of each entry of neighbors(v), aligned index-by-index.
    std::span<const EdgeTypeId> neighbor_edge_types(VertexId v) const;

    std::size_t degree(VertexId v) const { return neighbors(v).size(); }
    std::size_t max_degree() const;

    // l_i(v), sorted ascending.
    std::span<const LabelIndex> labels(VertexId v, std::size_t type) const;

    // l_i(N(v)) as a multiset: one entry per (neighbor, label) occurrence,
    // neighbors in ascending id order, each neighbor's labels ascending.
    std::vector<LabelIndex> neighbor_labels(VertexId v, std::size_t type) const;

    const LabelAssignments& all_labels() const { return labels_; }

private:
    void check_vertex(VertexId v) const;
    void check_type(std::size_t type) const;

    std::size_t num_vertices_;
    bool directed_;
    bool has_edge_types_ = false;
    std::size_t dropped_self_loops_ = 0;
    std::size_t dropped_duplicates_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<VertexId>> adjacency_;
    std::vector<std::vector<EdgeTypeId>> adjacency_types_;
    LabelAssignments labels_;
};

/*
 * String labels of every type share one vocabulary object. Indices per type
 * are dense from zero; dummy labels are appended after all real labels and
 * therefore occupy the highest indices.
 */
class LabelVocabulary {
public:
    std::size_t add_type(std::string name);

    // Get-or-create. Throws std::logic_error if called after add_dummy for
    // the same type (dummies must stay on top).
    LabelIndex add_label(std::size_t type, std::string_view label);

    std::optional<LabelIndex> find(std::size_t type, std::string_view label) const;

    // Appends a synthetic label unique to `key` (one per (vertex, type) pair).
    LabelIndex add_dummy(std::size_t type, std::string_view key);

    std::size_t num_types() const { return types_.size(); }
    std::size_t size(std::size_t type) const;
    std::size_t num_real(std::size_t type) const;
    std::size_t num_dummy(std::size_t type) const;
    const std::string& label_name(std::size_t type, LabelIndex index) const;
    const std::string& type_name(std::size_t type) const;
    std::optional<std::size_t> find_type(std::string_view name) const;

    friend bool operator==(const LabelVocabulary&, const LabelVocabulary&);

private:
    struct TypeVocab {
        std::string name;
        std::unordered_map<std::string, LabelIndex> index_of;
        std::vector<std::string> names;
        std::size_t num_dummy = 0;

        friend bool operator==(const TypeVocab& a, const TypeVocab& b) {
            return a.name == b.name && a.names == b.names && a.num_dummy == b.num_dummy;
        }
    };
    std::vector<TypeVocab> types_;
};

// Ensures l_i(v) is non-empty for every vertex and type by assigning a fresh
// dummy label to each empty (vertex, type) pair. Idempotent.
std::pair<LabeledGraph, LabelVocabulary>
complete_with_dummy_labels(const LabeledGraph& graph, const LabelVocabulary& vocab);

} // namespace ep
