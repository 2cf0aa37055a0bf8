#include "ep/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace ep {

namespace {

std::string vertex_msg(VertexId v, std::size_t n) {
    return "vertex id " + std::to_string(v) + " out of range (num_vertices = " +
           std::to_string(n) + ")";
}

} // namespace

LabeledGraph::LabeledGraph(std::size_t num_vertices, std::vector<Edge> edges, bool directed,
                           LabelAssignments labels)
    : num_vertices_(num_vertices), directed_(directed), labels_(std::move(labels)) {
    for (const Edge& e : edges) {
        if (e.src >= num_vertices_ || e.dst >= num_vertices_) {
            throw std::out_of_range("edge (" + std::to_string(e.src) + ", " +
                                    std::to_string(e.dst) + ") references " +
                                    vertex_msg(std::max(e.src, e.dst), num_vertices_));
        }
    }
    for (auto& per_vertex : labels_) {
        if (per_vertex.size() != num_vertices_) per_vertex.resize(num_vertices_);
        for (auto& ls : per_vertex) std::sort(ls.begin(), ls.end());
    }

    edges_.reserve(edges.size());
    for (Edge e : edges) {
        if (e.src == e.dst) {
            ++dropped_self_loops_;
            continue;
        }
        if (!directed_ && e.src > e.dst) std::swap(e.src, e.dst);
        edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
    });
    // Duplicates collapse to the first occurrence in sorted order; the stored
    // edge set behaves as a set of vertex pairs.
    auto last = std::unique(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.src == b.src && a.dst == b.dst;
    });
    dropped_duplicates_ = static_cast<std::size_t>(std::distance(last, edges_.end()));
    edges_.erase(last, edges_.end());

    adjacency_.assign(num_vertices_, {});
    adjacency_types_.assign(num_vertices_, {});
    for (const Edge& e : edges_) {
        if (e.type != kNoEdgeType) has_edge_types_ = true;
        if (directed_) {
            adjacency_[e.dst].push_back(e.src);
            adjacency_types_[e.dst].push_back(e.type);
        } else {
            adjacency_[e.src].push_back(e.dst);
            adjacency_types_[e.src].push_back(e.type);
            adjacency_[e.dst].push_back(e.src);
            adjacency_types_[e.dst].push_back(e.type);
        }
    }
    for (std::size_t v = 0; v < num_vertices_; ++v) {
        auto& nbrs = adjacency_[v];
        auto& types = adjacency_types_[v];
        std::vector<std::size_t> order(nbrs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return nbrs[a] < nbrs[b]; });
        std::vector<VertexId> sorted_nbrs(nbrs.size());
        std::vector<EdgeTypeId> sorted_types(nbrs.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted_nbrs[i] = nbrs[order[i]];
            sorted_types[i] = types[order[i]];
        }
        nbrs = std::move(sorted_nbrs);
        types = std::move(sorted_types);
    }
}

void LabeledGraph::check_vertex(VertexId v) const {
    if (v >= num_vertices_) throw std::out_of_range(vertex_msg(v, num_vertices_));
}

void LabeledGraph::check_type(std::size_t type) const {
    if (type >= labels_.size()) {
        throw std::out_of_range("label type " + std::to_string(type) + " out of range (k = " +
                                std::to_string(labels_.size()) + ")");
    }
}

std::span<const VertexId> LabeledGraph::neighbors(VertexId v) const {
    check_vertex(v);
    return adjacency_[v];
}

std::span<const EdgeTypeId> LabeledGraph::neighbor_edge_types(VertexId v) const {
    check_vertex(v);
    return adjacency_types_[v];
}

std::size_t LabeledGraph::max_degree() const {
    std::size_t d = 0;
    for (const auto& nbrs : adjacency_) d = std::max(d, nbrs.size());
    return d;
}

std::span<const LabelIndex> LabeledGraph::labels(VertexId v, std::size_t type) const {
    check_vertex(v);
    check_type(type);
    return labels_[type][v];
}

std::vector<LabelIndex> LabeledGraph::neighbor_labels(VertexId v, std::size_t type) const {
    check_vertex(v);
    check_type(type);
    std::vector<LabelIndex> result;
    for (VertexId u : adjacency_[v]) {
        const auto& ls = labels_[type][u];
        result.insert(result.end(), ls.begin(), ls.end());
    }
    return result;
}

std::size_t LabelVocabulary::add_type(std::string name) {
    for (const auto& t : types_) {
        if (t.name == name) throw std::logic_error("duplicate label type name: " + name);
    }
    types_.push_back(TypeVocab{std::move(name), {}, {}, 0});
    return types_.size() - 1;
}

LabelIndex LabelVocabulary::add_label(std::size_t type, std::string_view label) {
    auto& t = types_.at(type);
    if (auto it = t.index_of.find(std::string(label)); it != t.index_of.end()) return it->second;
    if (t.num_dummy > 0) {
        throw std::logic_error("cannot add real label '" + std::string(label) +
                               "' after dummy labels exist for type " + t.name);
    }
    const LabelIndex index = static_cast<LabelIndex>(t.names.size());
    t.names.emplace_back(label);
    t.index_of.emplace(std::string(label), index);
    return index;
}

std::optional<LabelIndex> LabelVocabulary::find(std::size_t type, std::string_view label) const {
    const auto& t = types_.at(type);
    auto it = t.index_of.find(std::string(label));
    if (it == t.index_of.end()) return std::nullopt;
    return it->second;
}

LabelIndex LabelVocabulary::add_dummy(std::size_t type, std::string_view key) {
    auto& t = types_.at(type);
    std::string name = "__dummy__:" + std::string(key);
    if (t.index_of.count(name)) {
        throw std::logic_error("dummy label already exists: " + name);
    }
    const LabelIndex index = static_cast<LabelIndex>(t.names.size());
    t.names.push_back(name);
    t.index_of.emplace(std::move(name), index);
    ++t.num_dummy;
    return index;
}

std::size_t LabelVocabulary::size(std::size_t type) const { return types_.at(type).names.size(); }

std::size_t LabelVocabulary::num_real(std::size_t type) const {
    const auto& t = types_.at(type);
    return t.names.size() - t.num_dummy;
}

std::size_t LabelVocabulary::num_dummy(std::size_t type) const { return types_.at(type).num_dummy; }

const std::string& LabelVocabulary::label_name(std::size_t type, LabelIndex index) const {
    return types_.at(type).names.at(index);
}

const std::string& LabelVocabulary::type_name(std::size_t type) const {
    return types_.at(type).name;
}

std::optional<std::size_t> LabelVocabulary::find_type(std::string_view name) const {
    for (std::size_t i = 0; i < types_.size(); ++i) {
        if (types_[i].name == name) return i;
    }
    return std::nullopt;
}

bool operator==(const LabelVocabulary& a, const LabelVocabulary& b) {
    return a.types_ == b.types_;
}

std::pair<LabeledGraph, LabelVocabulary>
complete_with_dummy_labels(const LabeledGraph& graph, const LabelVocabulary& vocab) {
    LabelVocabulary new_vocab = vocab;
    LabelAssignments labels = graph.all_labels();
    for (std::size_t type = 0; type < labels.size(); ++type) {
        for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
            if (!labels[type][v].empty()) continue;
            const std::string key = new_vocab.type_name(type) + "/" + std::to_string(v);
            labels[type][v].push_back(new_vocab.add_dummy(type, key));
        }
    }
    LabeledGraph new_graph(graph.num_vertices(), graph.edges(), graph.directed(),
                           std::move(labels));
    return {std::move(new_graph), std::move(new_vocab)};
}

} // namespace ep
