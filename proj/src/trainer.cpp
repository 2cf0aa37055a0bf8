#include "ep/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "ep/errors.hpp"

namespace ep {

void TrainingConfig::validate() const {
    if (!(margin > 0.0)) throw std::invalid_argument("margin must be > 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (neighbor_cap && *neighbor_cap < 1) throw std::invalid_argument("neighbor cap must be >= 1");
    if (negatives_per_vertex < 1) throw std::invalid_argument("negatives_per_vertex must be >= 1");
}

std::span<double> SparseGrad::slot(LabelIndex row) {
    auto [it, inserted] = slot_of_.try_emplace(row, rows_.size());
    if (inserted) {
        rows_.push_back(row);
        data_.resize(data_.size() + dim_, 0.0);
    }
    return {data_.data() + it->second * dim_, dim_};
}

std::span<const double> SparseGrad::at(LabelIndex row) const {
    return {data_.data() + slot_of_.at(row) * dim_, dim_};
}

void SparseGrad::accumulate(const SparseGrad& other) {
    for (std::size_t i = 0; i < other.rows_.size(); ++i) {
        auto dst = slot(other.rows_[i]);
        const double* src = other.data_.data() + i * dim_;
        for (std::size_t d = 0; d < dim_; ++d) dst[d] += src[d];
    }
}

void SparseGrad::scale(double factor) {
    for (double& x : data_) x *= factor;
}

void SparseGrad::clear() {
    rows_.clear();
    data_.clear();
    slot_of_.clear();
}

AdamState::AdamState(std::size_t rows_, std::size_t dim_)
    : rows(rows_), dim(dim_), m(rows_ * dim_, 0.0), v(rows_ * dim_, 0.0), step(rows_, 0) {}

void AdamState::apply(std::span<double> params, const SparseGrad& grads, double learning_rate) {
    for (LabelIndex row : grads.touched_rows()) {
        const auto g = grads.at(row);
        const std::uint64_t t = ++step[row];
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        double* mr = m.data() + static_cast<std::size_t>(row) * dim;
        double* vr = v.data() + static_cast<std::size_t>(row) * dim;
        double* pr = params.data() + static_cast<std::size_t>(row) * dim;
        for (std::size_t d = 0; d < dim; ++d) {
            mr[d] = beta1 * mr[d] + (1.0 - beta1) * g[d];
            vr[d] = beta2 * vr[d] + (1.0 - beta2) * g[d] * g[d];
            const double m_hat = mr[d] / bc1;
            const double v_hat = vr[d] / bc2;
            pr[d] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
        }
    }
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return std::sqrt(s);
}

// (a - b) / |a - b|, or zero at coincident points.
std::vector<double> unit_difference(std::span<const double> a, std::span<const double> b,
                                    double dist) {
    std::vector<double> u(a.size(), 0.0);
    if (dist > 0.0) {
        const double inv = 1.0 / dist;
        for (std::size_t d = 0; d < a.size(); ++d) u[d] = (a[d] - b[d]) * inv;
    }
    return u;
}

void axpy(std::span<double> dst, double alpha, std::span<const double> x) {
    for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += alpha * x[d];
}

} // namespace

double margin_loss_term(std::span<const double> recon, std::span<const double> pos,
                        std::span<const double> neg, double margin) {
    if (recon.size() != pos.size() || recon.size() != neg.size()) {
        throw ShapeError("margin_loss_term: vector dimensions differ");
    }
    const double arg = margin + euclidean(recon, pos) - euclidean(recon, neg);
    return arg > 0.0 ? arg : 0.0;
}

VertexId sample_negative(VertexId v, std::size_t num_vertices, Rng& rng) {
    if (num_vertices < 2) {
        throw CannotSampleError("cannot sample a negative vertex from a single-vertex graph");
    }
    const std::uint64_t draw = bounded(rng, num_vertices - 1);
    return static_cast<VertexId>(draw >= v ? draw + 1 : draw);
}

std::vector<VertexId> sample_neighbors(const LabeledGraph& graph, VertexId v,
                                       std::optional<std::size_t> cap, Rng& rng) {
    const auto nbrs = graph.neighbors(v);
    if (!cap || nbrs.size() <= *cap) {
        return {nbrs.begin(), nbrs.end()};
    }
    std::vector<VertexId> all(nbrs.begin(), nbrs.end());
    std::vector<VertexId> picked = sample_without_replacement(all, *cap, rng);
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::optional<VertexTerms> vertex_loss_and_gradients(
    const LabeledGraph& graph, std::span<const EmbeddingTable> tables,
    const std::vector<RelationTable>* relations, const TrainingConfig& config, VertexId v,
    std::span<const std::vector<VertexId>> negatives, std::span<const VertexId> used_neighbors) {
    if (used_neighbors.empty()) return std::nullopt;

    const std::size_t k = tables.size();
    VertexTerms terms;
    terms.per_type_loss.assign(k, 0.0);
    terms.table_grads.reserve(k);
    terms.relation_grads.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        terms.table_grads.emplace_back(tables[i].dim());
        terms.relation_grads.emplace_back(tables[i].dim());
    }

    const auto full_nbrs = graph.neighbors(v);
    const auto full_types = graph.neighbor_edge_types(v);

    for (std::size_t i = 0; i < k; ++i) {
        const EmbeddingTable& table = tables[i];
        const RelationTable* rel = config.use_relations ? &(*relations)[i] : nullptr;

        const std::vector<double> recon =
            rel ? reconstruct_with_relations(graph, table, *rel, v, i, used_neighbors)
                : reconstruct_label_type_embedding(graph, table, v, i, used_neighbors);
        const auto own_labels = graph.labels(v, i);
        const std::vector<double> pos = label_type_embedding(table, own_labels);
        const double dist_pos = euclidean(recon, pos);

        // Accumulate dL/d(recon) and dL/d(pos) over the negatives first; the
        // scatter into label rows happens once afterwards in a fixed order.
        std::vector<double> d_recon(table.dim(), 0.0);
        std::vector<double> d_pos(table.dim(), 0.0);
        struct NegGrad {
            VertexId u;
            std::vector<double> grad;
        };
        std::vector<NegGrad> neg_grads;

        for (VertexId u : negatives[i]) {
            const std::vector<double> neg = label_type_embedding(table, graph.labels(u, i));
            const double dist_neg = euclidean(recon, neg);
            const double arg = config.margin + dist_pos - dist_neg;
            if (arg <= 0.0) continue; // inactive hinge (kink uses subgradient 0)
            terms.per_type_loss[i] += arg;

            const std::vector<double> unit_pos = unit_difference(recon, pos, dist_pos);
            const std::vector<double> unit_neg = unit_difference(recon, neg, dist_neg);
            for (std::size_t d = 0; d < table.dim(); ++d) {
                d_recon[d] += unit_pos[d] - unit_neg[d];
                d_pos[d] -= unit_pos[d];
            }
            neg_grads.push_back({u, unit_neg}); // dL/d(neg mean) = +unit(recon - neg)
        }
        terms.loss += terms.per_type_loss[i];
        if (neg_grads.empty()) continue; // every hinge inactive for this type

        // Reconstruction scatter: every (neighbor, label) occurrence carries
        // weight 1/M, with M the multiset size of the used neighbor labels.
        std::size_t label_count = 0;
        for (VertexId u : used_neighbors) label_count += graph.labels(u, i).size();
        const double inv_m = 1.0 / static_cast<double>(label_count);
        std::size_t cursor = 0;
        for (VertexId u : used_neighbors) {
            std::size_t rel_slot = 0;
            if (rel) {
                while (cursor < full_nbrs.size() && full_nbrs[cursor] < u) ++cursor;
                rel_slot = rel->slot(full_types[cursor]);
            }
            for (LabelIndex l : graph.labels(u, i)) {
                axpy(terms.table_grads[i].slot(l), inv_m, d_recon);
                if (rel) {
                    axpy(terms.relation_grads[i].slot(static_cast<LabelIndex>(rel_slot)), inv_m,
                         d_recon);
                }
            }
        }
        const double inv_own = 1.0 / static_cast<double>(own_labels.size());
        for (LabelIndex l : own_labels) axpy(terms.table_grads[i].slot(l), inv_own, d_pos);
        for (const NegGrad& ng : neg_grads) {
            const auto neg_labels = graph.labels(ng.u, i);
            const double inv_neg = 1.0 / static_cast<double>(neg_labels.size());
            for (LabelIndex l : neg_labels) axpy(terms.table_grads[i].slot(l), inv_neg, ng.grad);
        }
    }
    return terms;
}

namespace {

struct BatchWork {
    VertexId vertex;
    std::vector<VertexId> neighbors;
    std::vector<std::vector<VertexId>> negatives; // [type][negative]
};

void check_rows_finite(const EmbeddingTable& table, const SparseGrad& grads, std::size_t epoch,
                       std::size_t batch) {
    for (LabelIndex row : grads.touched_rows()) {
        for (double x : table.row(row)) {
            if (!std::isfinite(x)) throw TrainingDivergedError(epoch, batch);
        }
    }
}

void check_relation_rows_finite(const RelationTable& table, const SparseGrad& grads,
                                std::size_t epoch, std::size_t batch) {
    for (LabelIndex row : grads.touched_rows()) {
        for (double x : table.row(row)) {
            if (!std::isfinite(x)) throw TrainingDivergedError(epoch, batch);
        }
    }
}

} // namespace

TrainResult train(const LabeledGraph& graph, std::vector<EmbeddingTable>& tables,
                  std::vector<RelationTable>* relations, const TrainingConfig& config,
                  std::size_t num_workers) {
    config.validate();
    const std::size_t k = graph.num_label_types();
    const std::size_t n = graph.num_vertices();
    if (tables.size() != k) {
        throw std::invalid_argument("expected one embedding table per label type");
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t v = 0; v < n; ++v) {
            const auto ls = graph.labels(static_cast<VertexId>(v), i);
            if (ls.empty()) {
                throw std::invalid_argument(
                    "vertex " + std::to_string(v) + " has no labels of type " + std::to_string(i) +
                    "; run complete_with_dummy_labels before training");
            }
            if (ls.back() >= tables[i].rows()) {
                throw std::out_of_range("label index exceeds embedding table rows for type " +
                                        std::to_string(i));
            }
        }
    }
    if (config.use_relations) {
        if (relations == nullptr || relations->size() != k) {
            throw std::invalid_argument("use_relations requires one relation table per label type");
        }
        for (const Edge& e : graph.edges()) {
            for (const auto& rel : *relations) rel.slot(e.type); // throws if missing
        }
    }

    Rng shuffle_rng = make_substream(config.seed, "shuffle");
    Rng neg_rng = make_substream(config.seed, "negatives");
    Rng samp_rng = make_substream(config.seed, "neighbor-sampling");

    std::vector<AdamState> adam;
    std::vector<AdamState> adam_rel;
    for (const auto& t : tables) adam.emplace_back(t.rows(), t.dim());
    if (config.use_relations) {
        for (const auto& r : *relations) adam_rel.emplace_back(r.size(), r.dim());
    }

    std::vector<VertexId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<VertexId>(i);

    TrainResult result;
    result.reports.reserve(config.epochs);

    std::vector<SparseGrad> batch_grads;
    std::vector<SparseGrad> batch_rel_grads;
    for (std::size_t i = 0; i < k; ++i) {
        batch_grads.emplace_back(tables[i].dim());
        batch_rel_grads.emplace_back(tables[i].dim());
    }

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        shuffle_in_place(order, shuffle_rng);

        double sum_batch_means = 0.0;
        std::size_t counted_batches = 0;
        std::vector<double> type_loss_sums(k, 0.0);
        std::size_t contributing_total = 0;
        std::size_t batch_index = 0;

        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(n, start + config.batch_size);
            std::vector<VertexId> batch(order.begin() + start, order.begin() + end);
            // Gradient reduction happens in ascending vertex id; sampling in
            // the same order keeps the rng stream independent of the shuffle
            // order within a batch.
            std::sort(batch.begin(), batch.end());

            std::vector<BatchWork> work;
            work.reserve(batch.size());
            for (VertexId v : batch) {
                if (graph.neighbors(v).empty()) continue; // skipped, no rng consumed
                BatchWork w;
                w.vertex = v;
                w.neighbors = sample_neighbors(graph, v, config.neighbor_cap, samp_rng);
                w.negatives.resize(k);
                for (std::size_t i = 0; i < k; ++i) {
                    w.negatives[i].reserve(config.negatives_per_vertex);
                    for (std::size_t s = 0; s < config.negatives_per_vertex; ++s) {
                        w.negatives[i].push_back(sample_negative(v, n, neg_rng));
                    }
                }
                work.push_back(std::move(w));
            }

            std::vector<std::optional<VertexTerms>> results(work.size());
            auto compute_range = [&](std::size_t lo, std::size_t hi) {
                for (std::size_t idx = lo; idx < hi; ++idx) {
                    const BatchWork& w = work[idx];
                    results[idx] = vertex_loss_and_gradients(graph, tables, relations, config,
                                                             w.vertex, w.negatives, w.neighbors);
                }
            };
            if (num_workers <= 1 || work.size() < 2) {
                compute_range(0, work.size());
            } else {
                const std::size_t workers = std::min(num_workers, work.size());
                std::vector<std::thread> pool;
                pool.reserve(workers);
                const std::size_t chunk = (work.size() + workers - 1) / workers;
                for (std::size_t w = 0; w < workers; ++w) {
                    const std::size_t lo = w * chunk;
                    const std::size_t hi = std::min(work.size(), lo + chunk);
                    if (lo >= hi) break;
                    pool.emplace_back(compute_range, lo, hi);
                }
                for (auto& t : pool) t.join();
            }

            for (auto& g : batch_grads) g.clear();
            for (auto& g : batch_rel_grads) g.clear();
            double batch_loss = 0.0;
            std::size_t contributing = 0;
            for (const auto& r : results) {
                if (!r) continue;
                ++contributing;
                batch_loss += r->loss;
                for (std::size_t i = 0; i < k; ++i) {
                    type_loss_sums[i] += r->per_type_loss[i];
                    batch_grads[i].accumulate(r->table_grads[i]);
                    if (config.use_relations) {
                        batch_rel_grads[i].accumulate(r->relation_grads[i]);
                    }
                }
            }
            if (contributing == 0) continue;

            // One Adam step on the batch-mean objective.
            const double inv = 1.0 / static_cast<double>(contributing);
            for (std::size_t i = 0; i < k; ++i) {
                batch_grads[i].scale(inv);
                adam[i].apply(tables[i].raw(), batch_grads[i], config.learning_rate);
                check_rows_finite(tables[i], batch_grads[i], epoch, batch_index);
                if (config.use_relations) {
                    batch_rel_grads[i].scale(inv);
                    adam_rel[i].apply((*relations)[i].raw(), batch_rel_grads[i],
                                      config.learning_rate);
                    check_relation_rows_finite((*relations)[i], batch_rel_grads[i], epoch,
                                               batch_index);
                }
            }
            sum_batch_means += batch_loss * inv;
            ++counted_batches;
            contributing_total += contributing;
        }

        LossReport report;
        report.epoch = epoch;
        report.mean_batch_loss =
            counted_batches > 0 ? sum_batch_means / static_cast<double>(counted_batches) : 0.0;
        report.per_type_loss.assign(k, 0.0);
        if (contributing_total > 0) {
            for (std::size_t i = 0; i < k; ++i) {
                report.per_type_loss[i] = type_loss_sums[i] / static_cast<double>(contributing_total);
            }
        }
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.reports.push_back(std::move(report));
    }
    return result;
}

std::size_t parameter_count(std::span<const EmbeddingTable> tables,
                            const std::vector<RelationTable>* relations) {
    std::size_t count = 0;
    for (const auto& t : tables) count += t.rows() * t.dim();
    if (relations) {
        for (const auto& r : *relations) count += r.size() * r.dim();
    }
    return count;
}

} // namespace ep
