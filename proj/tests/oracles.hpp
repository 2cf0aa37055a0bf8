#pragma once

// Brute-force reference implementations used to pin expected values in the
// unit and acceptance suites. Everything here recomputes results from the raw
// edge list with naive nested loops, independent of the adjacency structures
// and accumulation order of the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ep/embedding.hpp"
#include "ep/graph.hpp"
#include "ep/rng.hpp"
#include "ep/trainer.hpp"

namespace oracles {

struct RandomInstance {
    std::size_t num_vertices = 0;
    bool directed = false;
    std::vector<ep::Edge> raw_edges; // as generated, before canonicalization
    ep::LabelAssignments labels;     // non-empty per (vertex, type)
    std::vector<std::size_t> vocab_sizes;
};

inline RandomInstance make_random_instance(ep::Rng& rng, std::size_t n, double edge_prob,
                                           std::size_t k, std::size_t vocab_size,
                                           std::size_t max_labels_per_vertex,
                                           bool directed = false) {
    RandomInstance inst;
    inst.num_vertices = n;
    inst.directed = directed;
    inst.vocab_sizes.assign(k, vocab_size);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (u == v) continue;
            if (!directed && u > v) continue;
            if (ep::uniform_real(rng, 0.0, 1.0) < edge_prob) {
                inst.raw_edges.push_back(
                    ep::Edge{static_cast<ep::VertexId>(u), static_cast<ep::VertexId>(v)});
            }
        }
    }
    inst.labels.assign(k, std::vector<std::vector<ep::LabelIndex>>(n));
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t count = 1 + ep::bounded(rng, max_labels_per_vertex);
            std::set<ep::LabelIndex> picked;
            while (picked.size() < std::min(count, vocab_size)) {
                picked.insert(static_cast<ep::LabelIndex>(ep::bounded(rng, vocab_size)));
            }
            inst.labels[t][v].assign(picked.begin(), picked.end());
        }
    }
    return inst;
}

inline ep::LabeledGraph to_graph(const RandomInstance& inst) {
    return ep::LabeledGraph(inst.num_vertices, inst.raw_edges, inst.directed, inst.labels);
}

// Neighbor set recomputed by scanning the raw edge list.
inline std::set<ep::VertexId> neighbor_set(const RandomInstance& inst, ep::VertexId v) {
    std::set<ep::VertexId> out;
    for (const ep::Edge& e : inst.raw_edges) {
        if (e.src == e.dst) continue;
        if (e.dst == v) out.insert(e.src);
        if (!inst.directed && e.src == v) out.insert(e.dst);
    }
    return out;
}

// l_i(N(v)) with multiplicity, as a sorted multiset.
inline std::multiset<ep::LabelIndex> neighbor_label_multiset(const RandomInstance& inst,
                                                             ep::VertexId v, std::size_t type) {
    std::multiset<ep::LabelIndex> out;
    for (ep::VertexId u : neighbor_set(inst, v)) {
        for (ep::LabelIndex l : inst.labels[type][u]) out.insert(l);
    }
    return out;
}

// Naive per-coordinate sum / divide.
inline std::vector<double> mean_of_rows(const ep::EmbeddingTable& table,
                                        const std::vector<ep::LabelIndex>& rows) {
    std::vector<double> acc(table.dim(), 0.0);
    for (ep::LabelIndex r : rows) {
        for (std::size_t d = 0; d < table.dim(); ++d) acc[d] += table.row(r)[d];
    }
    for (double& x : acc) x /= static_cast<double>(rows.size());
    return acc;
}

// Reconstruction as a naive double sum recomputed from the raw edges.
// `relation` (optional) maps edge type -> vector added per transmitted label.
inline std::vector<double> reconstruction(const RandomInstance& inst,
                                          const ep::EmbeddingTable& table, ep::VertexId v,
                                          std::size_t type,
                                          const std::map<ep::EdgeTypeId,
                                                         std::vector<double>>* relation = nullptr) {
    std::vector<double> acc(table.dim(), 0.0);
    std::size_t count = 0;
    // Edge-type lookup for the relation variant: first matching raw edge.
    auto edge_type_between = [&](ep::VertexId u) {
        for (const ep::Edge& e : inst.raw_edges) {
            if (e.dst == v && e.src == u) return e.type;
            if (!inst.directed && e.src == v && e.dst == u) return e.type;
        }
        return ep::kNoEdgeType;
    };
    for (ep::VertexId u : neighbor_set(inst, v)) {
        for (ep::LabelIndex l : inst.labels[type][u]) {
            for (std::size_t d = 0; d < table.dim(); ++d) {
                acc[d] += table.row(l)[d];
                if (relation) acc[d] += relation->at(edge_type_between(u))[d];
            }
            ++count;
        }
    }
    for (double& x : acc) x /= static_cast<double>(count);
    return acc;
}

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
}

// Full ranking loss of one vertex and type: the sum over every u != v, with
// h and h-tilde recomputed by the naive routines above.
inline double full_margin_sum(const RandomInstance& inst, const ep::EmbeddingTable& table,
                              ep::VertexId v, std::size_t type, double margin) {
    const std::vector<double> recon = reconstruction(inst, table, v, type);
    const std::vector<double> pos = mean_of_rows(table, inst.labels[type][v]);
    double total = 0.0;
    for (std::size_t u = 0; u < inst.num_vertices; ++u) {
        if (u == static_cast<std::size_t>(v)) continue;
        const std::vector<double> neg =
            mean_of_rows(table, inst.labels[type][static_cast<ep::VertexId>(u)]);
        const double arg = margin + euclidean(recon, pos) - euclidean(recon, neg);
        if (arg > 0.0) total += arg;
    }
    return total;
}

// Embedding values and their means are O(1) here, so 1.0 is a faithful scale
// floor: it keeps coordinates that cancel to ~0 from inflating the ratio.
inline double relative_error(double got, double want) {
    const double denom = std::max({std::abs(got), std::abs(want), 1.0});
    return std::abs(got - want) / denom;
}

inline double max_relative_error(const std::vector<double>& got, const std::vector<double>& want) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        worst = std::max(worst, relative_error(got[i], want[i]));
    }
    return worst;
}

// Central finite differences over every entry of every table (and relation
// table) against the analytic sparse gradients. Instances whose hinge or
// distances sit closer than `active_margin` to a kink report usable = false,
// so both one-sided evaluations of accepted instances stay on one smooth
// branch.
struct GradCheckResult {
    bool usable = false;
    double worst = 0.0;
};

inline GradCheckResult gradient_check(const ep::LabeledGraph& g,
                                      std::vector<ep::EmbeddingTable> tables,
                                      std::vector<ep::RelationTable> relations, bool use_relations,
                                      const ep::TrainingConfig& cfg, ep::VertexId v,
                                      const std::vector<std::vector<ep::VertexId>>& negatives,
                                      double active_margin) {
    using namespace ep;
    const auto nbrs = g.neighbors(v);
    if (nbrs.empty()) return {};

    for (std::size_t t = 0; t < tables.size(); ++t) {
        const auto recon =
            use_relations ? reconstruct_with_relations(g, tables[t], relations[t], v, t)
                          : reconstruct_label_type_embedding(g, tables[t], v, t);
        const auto pos = label_type_embedding(tables[t], g.labels(v, t));
        const double dp = euclidean(recon, pos);
        for (VertexId u : negatives[t]) {
            const auto neg = label_type_embedding(tables[t], g.labels(u, t));
            const double dn = euclidean(recon, neg);
            if (dp < active_margin || dn < active_margin) return {};
            if (cfg.margin + dp - dn < active_margin) return {};
        }
    }

    auto loss_at = [&]() {
        const auto terms = vertex_loss_and_gradients(
            g, tables, use_relations ? &relations : nullptr, cfg, v, negatives, nbrs);
        return terms ? terms->loss : 0.0;
    };
    const auto analytic = vertex_loss_and_gradients(
        g, tables, use_relations ? &relations : nullptr, cfg, v, negatives, nbrs);
    if (!analytic) return {};

    const double h = 1e-5;
    GradCheckResult result;
    result.usable = true;
    auto probe = [&](double& cell, double grad) {
        const double saved = cell;
        cell = saved + h;
        const double up = loss_at();
        cell = saved - h;
        const double down = loss_at();
        cell = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(grad), 1e-4});
        result.worst = std::max(result.worst, std::abs(fd - grad) / denom);
    };
    auto grad_of = [](const SparseGrad& grads, LabelIndex row, std::size_t d) {
        const auto rows = grads.touched_rows();
        if (std::find(rows.begin(), rows.end(), row) == rows.end()) return 0.0;
        return grads.at(row)[d];
    };

    for (std::size_t t = 0; t < tables.size(); ++t) {
        for (std::size_t row = 0; row < tables[t].rows(); ++row) {
            const auto cells = tables[t].row(static_cast<LabelIndex>(row));
            for (std::size_t d = 0; d < tables[t].dim(); ++d) {
                probe(cells[d],
                      grad_of(analytic->table_grads[t], static_cast<LabelIndex>(row), d));
            }
        }
        if (!use_relations) continue;
        for (std::size_t slot = 0; slot < relations[t].size(); ++slot) {
            const auto cells = relations[t].row(static_cast<LabelIndex>(slot));
            for (std::size_t d = 0; d < relations[t].dim(); ++d) {
                probe(cells[d],
                      grad_of(analytic->relation_grads[t], static_cast<LabelIndex>(slot), d));
            }
        }
    }
    return result;
}

} // namespace oracles
