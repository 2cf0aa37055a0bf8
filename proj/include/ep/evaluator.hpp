#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ep/graph.hpp"
#include "ep/matrix.hpp"

namespace ep {

// Class labels used only downstream, never during embedding training.
// Per vertex: sorted class ids; empty = unlabeled.
using ClassLabels = std::vector<std::vector<int>>;

struct Split {
    enum class Protocol { Fraction, PerClass };

    Protocol protocol = Protocol::Fraction;
    std::uint64_t seed = 0;
    std::vector<VertexId> train;
    std::vector<VertexId> test;
    std::vector<VertexId> validation;
    ClassLabels train_classes;
    ClassLabels test_classes;
    ClassLabels validation_classes;
};

// Train = floor(fraction * #labeled vertices) sampled uniformly; the rest is
// test. Unlabeled vertices are left out entirely.
Split make_fraction_split(const ClassLabels& labels, double train_fraction, std::uint64_t seed);

// Exactly n_per_class train vertices per class, then n_test test and n_val
// validation vertices from the remainder, all pairwise disjoint.
Split make_per_class_split(const ClassLabels& labels, std::size_t n_per_class, std::size_t n_test,
                           std::size_t n_val, std::uint64_t seed);

struct ClassifierModel {
    std::size_t num_classes = 0;
    std::size_t dim = 0;
    double lambda = 0.0;
    std::vector<std::vector<double>> weights; // per class
    std::vector<double> bias;                 // per class, unregularized
    std::vector<bool> converged;              // per class: gradient norm < tol reached

    double score(std::size_t cls, std::span<const double> x) const;
};

struct BinaryLogisticFit {
    std::vector<double> weights;
    double bias = 0.0;
    bool converged = false;
};

// Binary L2-regularized logistic regression,
//   min_w,b  sum_j log(1 + exp(-y_j (w.x_j + b))) + lambda * ||w||^2,
// solved with deterministic L-BFGS and Armijo backtracking (monotone in the
// objective) to gradient norm < 1e-6 or 1000 iterations. The bias is not
// penalized. `targets` are +-1. When given, `objective_trajectory` receives
// the objective value at every accepted iterate.
BinaryLogisticFit fit_binary_logistic(const Matrix& representations,
                                      std::span<const VertexId> ids,
                                      std::span<const double> targets, double lambda,
                                      std::vector<double>* objective_trajectory = nullptr);

// One-vs-rest wrapper over fit_binary_logistic; `representations` is indexed
// by vertex id.
ClassifierModel fit_logistic(const Matrix& representations, const Split& split, double lambda,
                             std::size_t num_classes, std::size_t num_threads = 1);

// Top-n classes by score, n = the vertex's true label count; ties broken by
// ascending class id. Returns sorted class-id sets.
std::vector<std::vector<int>> predict_multilabel(const ClassifierModel& model,
                                                 const Matrix& representations,
                                                 std::span<const VertexId> vertices,
                                                 std::span<const std::size_t> label_counts);

struct Metrics {
    double accuracy = 0.0; // exact-match rate
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
};

// Micro pools TP/FP/FN over all classes; macro averages per-class F1 with
// classes absent from both prediction and truth scored as 0.
Metrics compute_metrics(const std::vector<std::vector<int>>& predicted, const ClassLabels& truth,
                        std::size_t num_classes);

struct MetricsSummary {
    std::vector<Metrics> runs;
    Metrics mean;
    Metrics stddev; // population standard deviation over runs
};

MetricsSummary summarize(std::vector<Metrics> runs);

// Paper-reported search grids.
inline const std::vector<double> kDefaultMarginGrid{1.0, 5.0, 10.0, 20.0};
inline const std::vector<double> kDefaultLambdaGrid{0.01, 0.1, 0.5, 1.0, 5.0, 10.0};

// Grid search over (margin, lambda) maximizing `score`; ties resolved toward
// the smaller margin, then the smaller lambda.
std::pair<double, double> select_hyperparameters(
    std::span<const double> margin_candidates, std::span<const double> lambda_candidates,
    const std::function<double(double margin, double lambda)>& score);

// Mean micro-F1 of `folds`-fold cross validation over the given train
// vertices at one lambda. Folds are seeded and deterministic.
double cross_validate_micro_f1(const Matrix& representations, std::span<const VertexId> train,
                               const ClassLabels& labels, std::size_t num_classes, double lambda,
                               std::size_t folds, std::uint64_t seed, std::size_t num_threads = 1);

} // namespace ep
