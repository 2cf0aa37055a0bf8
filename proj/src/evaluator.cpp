#include "ep/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ep/errors.hpp"
#include "ep/rng.hpp"

namespace ep {

namespace {

std::vector<VertexId> labeled_vertices(const ClassLabels& labels) {
    std::vector<VertexId> out;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        if (!labels[v].empty()) out.push_back(static_cast<VertexId>(v));
    }
    return out;
}

ClassLabels gather(const ClassLabels& labels, std::span<const VertexId> ids) {
    ClassLabels out;
    out.reserve(ids.size());
    for (VertexId v : ids) out.push_back(labels[v]);
    return out;
}

} // namespace

Split make_fraction_split(const ClassLabels& labels, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw InvalidSplitError("train fraction must lie strictly between 0 and 1");
    }
    std::vector<VertexId> pool = labeled_vertices(labels);
    const std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(pool.size()));
    if (n_train == 0 || n_train >= pool.size()) {
        throw InvalidSplitError("fraction split leaves an empty train or test set");
    }
    Rng rng = make_substream(seed, "splits");
    shuffle_in_place(pool, rng);

    Split split;
    split.protocol = Split::Protocol::Fraction;
    split.seed = seed;
    split.train.assign(pool.begin(), pool.begin() + n_train);
    split.test.assign(pool.begin() + n_train, pool.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    split.train_classes = gather(labels, split.train);
    split.test_classes = gather(labels, split.test);
    return split;
}

Split make_per_class_split(const ClassLabels& labels, std::size_t n_per_class, std::size_t n_test,
                           std::size_t n_val, std::uint64_t seed) {
    int max_class = -1;
    for (const auto& ls : labels) {
        for (int c : ls) max_class = std::max(max_class, c);
    }
    if (max_class < 0) throw InvalidSplitError("no class labels present");
    const std::size_t num_classes = static_cast<std::size_t>(max_class) + 1;

    std::vector<std::vector<VertexId>> members(num_classes);
    for (std::size_t v = 0; v < labels.size(); ++v) {
        for (int c : labels[v]) members[c].push_back(static_cast<VertexId>(v));
    }

    Rng rng = make_substream(seed, "splits");
    Split split;
    split.protocol = Split::Protocol::PerClass;
    split.seed = seed;

    std::vector<bool> taken(labels.size(), false);
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (members[c].size() < n_per_class) {
            throw InsufficientClassError("class " + std::to_string(c) + " has only " +
                                         std::to_string(members[c].size()) + " members, need " +
                                         std::to_string(n_per_class));
        }
        // A multi-label vertex picked for one class is not re-picked; draw
        // until the quota is filled.
        std::vector<VertexId> pool = members[c];
        shuffle_in_place(pool, rng);
        std::size_t picked = 0;
        for (VertexId v : pool) {
            if (picked == n_per_class) break;
            if (taken[v]) continue;
            taken[v] = true;
            split.train.push_back(v);
            ++picked;
        }
        if (picked < n_per_class) {
            throw InsufficientClassError("class " + std::to_string(c) +
                                         " exhausted by earlier classes");
        }
    }

    std::vector<VertexId> rest;
    for (VertexId v : labeled_vertices(labels)) {
        if (!taken[v]) rest.push_back(v);
    }
    if (rest.size() < n_test + n_val) {
        throw InvalidSplitError("not enough vertices left for test + validation sets");
    }
    shuffle_in_place(rest, rng);
    split.test.assign(rest.begin(), rest.begin() + n_test);
    split.validation.assign(rest.begin() + n_test, rest.begin() + n_test + n_val);

    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.validation.begin(), split.validation.end());
    split.train_classes = gather(labels, split.train);
    split.test_classes = gather(labels, split.test);
    split.validation_classes = gather(labels, split.validation);
    return split;
}

double ClassifierModel::score(std::size_t cls, std::span<const double> x) const {
    const auto& w = weights[cls];
    double s = bias[cls];
    for (std::size_t d = 0; d < w.size(); ++d) s += w[d] * x[d];
    return s;
}

namespace {

// log(1 + exp(t)) without overflow.
double log1pexp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

// 1 / (1 + exp(t)).
double sigmoid_neg(double t) {
    if (t > 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

struct BinaryFit {
    std::vector<double> w; // last entry is the bias
    bool converged = false;
};

// Full-batch L-BFGS (memory 10, Armijo backtracking) for the binary
// objective  sum_j log(1 + exp(-y_j (w.x_j + b))) + lambda * ||w||^2.
// The bias is the trailing coordinate and carries no penalty.
class LogisticProblem {
public:
    LogisticProblem(const Matrix& reps, std::span<const VertexId> ids, std::vector<double> y,
                    double lambda)
        : reps_(reps), ids_(ids), y_(std::move(y)), lambda_(lambda), dim_(reps.cols) {}

    std::size_t size() const { return dim_ + 1; }

    double value_and_gradient(const std::vector<double>& theta, std::vector<double>& grad) const {
        grad.assign(size(), 0.0);
        double value = 0.0;
        for (std::size_t j = 0; j < ids_.size(); ++j) {
            const auto x = reps_.row(ids_[j]);
            double z = theta[dim_];
            for (std::size_t d = 0; d < dim_; ++d) z += theta[d] * x[d];
            const double yz = y_[j] * z;
            value += log1pexp(-yz);
            const double coeff = -y_[j] * sigmoid_neg(yz);
            for (std::size_t d = 0; d < dim_; ++d) grad[d] += coeff * x[d];
            grad[dim_] += coeff;
        }
        for (std::size_t d = 0; d < dim_; ++d) {
            value += lambda_ * theta[d] * theta[d];
            grad[d] += 2.0 * lambda_ * theta[d];
        }
        return value;
    }

private:
    const Matrix& reps_;
    std::span<const VertexId> ids_;
    std::vector<double> y_;
    double lambda_;
    std::size_t dim_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

BinaryFit minimize_lbfgs(const LogisticProblem& problem, std::size_t max_iter, double grad_tol,
                         std::vector<double>* trajectory) {
    constexpr std::size_t kMemory = 10;
    const std::size_t n = problem.size();

    BinaryFit fit;
    std::vector<double> theta(n, 0.0);
    std::vector<double> grad;
    double value = problem.value_and_gradient(theta, grad);
    if (trajectory) trajectory->push_back(value);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        if (norm(grad) < grad_tol) {
            fit.converged = true;
            break;
        }

        // Two-loop recursion.
        std::vector<double> direction = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], direction);
            for (std::size_t d = 0; d < n; ++d) direction[d] -= alpha[i] * y_hist[i][d];
        }
        if (!s_hist.empty()) {
            const double gamma =
                dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& d : direction) d *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * dot(y_hist[i], direction);
            for (std::size_t d = 0; d < n; ++d) direction[d] += (alpha[i] - beta) * s_hist[i][d];
        }
        for (double& d : direction) d = -d;

        double descent = dot(grad, direction);
        if (descent >= 0.0) { // fall back to steepest descent
            for (std::size_t d = 0; d < n; ++d) direction[d] = -grad[d];
            descent = -dot(grad, grad);
        }

        // Armijo backtracking keeps the objective monotone.
        double step = 1.0;
        std::vector<double> theta_next(n), grad_next;
        double value_next = value;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t d = 0; d < n; ++d) theta_next[d] = theta[d] + step * direction[d];
            value_next = problem.value_and_gradient(theta_next, grad_next);
            if (value_next <= value + 1e-4 * step * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no progress possible at machine precision

        std::vector<double> s(n), yv(n);
        for (std::size_t d = 0; d < n; ++d) {
            s[d] = theta_next[d] - theta[d];
            yv[d] = grad_next[d] - grad[d];
        }
        const double sy = dot(s, yv);
        if (sy > 1e-12 * norm(s) * norm(yv)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > kMemory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = std::move(theta_next);
        grad = std::move(grad_next);
        value = value_next;
        if (trajectory) trajectory->push_back(value);
    }
    if (norm(grad) < grad_tol) fit.converged = true;
    fit.w = std::move(theta);
    return fit;
}

} // namespace

BinaryLogisticFit fit_binary_logistic(const Matrix& representations,
                                      std::span<const VertexId> ids,
                                      std::span<const double> targets, double lambda,
                                      std::vector<double>* objective_trajectory) {
    if (ids.size() != targets.size()) {
        throw ShapeError("fit_binary_logistic: id/target size mismatch");
    }
    LogisticProblem problem(representations, ids,
                            std::vector<double>(targets.begin(), targets.end()), lambda);
    BinaryFit fit = minimize_lbfgs(problem, 1000, 1e-6, objective_trajectory);
    BinaryLogisticFit out;
    out.bias = fit.w.back();
    fit.w.pop_back();
    out.weights = std::move(fit.w);
    out.converged = fit.converged;
    return out;
}

ClassifierModel fit_logistic(const Matrix& representations, const Split& split, double lambda,
                             std::size_t num_classes, std::size_t num_threads) {
    if (split.train.empty()) throw InvalidSplitError("cannot fit on an empty train set");
    ClassifierModel model;
    model.num_classes = num_classes;
    model.dim = representations.cols;
    model.lambda = lambda;
    model.weights.assign(num_classes, {});
    model.bias.assign(num_classes, 0.0);
    model.converged.assign(num_classes, false);

    auto fit_class = [&](std::size_t c) {
        std::vector<double> y(split.train.size());
        for (std::size_t j = 0; j < split.train.size(); ++j) {
            const auto& cs = split.train_classes[j];
            y[j] = std::binary_search(cs.begin(), cs.end(), static_cast<int>(c)) ? 1.0 : -1.0;
        }
        BinaryLogisticFit fit = fit_binary_logistic(representations, split.train, y, lambda);
        model.bias[c] = fit.bias;
        model.weights[c] = std::move(fit.weights);
        model.converged[c] = fit.converged;
    };

    if (num_threads <= 1 || num_classes < 2) {
        for (std::size_t c = 0; c < num_classes; ++c) fit_class(c);
    } else {
        std::vector<std::thread> pool;
        const std::size_t workers = std::min(num_threads, num_classes);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < num_classes; c += workers) fit_class(c);
            });
        }
        for (auto& t : pool) t.join();
    }
    return model;
}

std::vector<std::vector<int>> predict_multilabel(const ClassifierModel& model,
                                                 const Matrix& representations,
                                                 std::span<const VertexId> vertices,
                                                 std::span<const std::size_t> label_counts) {
    std::vector<std::vector<int>> predictions;
    predictions.reserve(vertices.size());
    std::vector<std::pair<double, int>> scored(model.num_classes);
    for (std::size_t j = 0; j < vertices.size(); ++j) {
        const auto x = representations.row(vertices[j]);
        for (std::size_t c = 0; c < model.num_classes; ++c) {
            scored[c] = {model.score(c, x), static_cast<int>(c)};
        }
        // Descending score; ties by ascending class id.
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            return a.first > b.first;
        });
        const std::size_t n = std::min<std::size_t>(label_counts[j], model.num_classes);
        std::vector<int> picked;
        picked.reserve(n);
        for (std::size_t i = 0; i < n; ++i) picked.push_back(scored[i].second);
        std::sort(picked.begin(), picked.end());
        predictions.push_back(std::move(picked));
    }
    return predictions;
}

Metrics compute_metrics(const std::vector<std::vector<int>>& predicted, const ClassLabels& truth,
                        std::size_t num_classes) {
    if (predicted.size() != truth.size()) {
        throw ShapeError("compute_metrics: prediction/truth size mismatch");
    }
    std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    std::size_t exact = 0;
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        if (predicted[j] == truth[j]) ++exact;
        for (int c : predicted[j]) {
            if (std::binary_search(truth[j].begin(), truth[j].end(), c)) {
                ++tp[c];
            } else {
                ++fp[c];
            }
        }
        for (int c : truth[j]) {
            if (!std::binary_search(predicted[j].begin(), predicted[j].end(), c)) ++fn[c];
        }
    }

    Metrics m;
    m.accuracy = predicted.empty() ? 0.0 : static_cast<double>(exact) / predicted.size();

    std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
    double macro_sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        tp_sum += tp[c];
        fp_sum += fp[c];
        fn_sum += fn[c];
        const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
        macro_sum += denom == 0 ? 0.0 : 2.0 * tp[c] / static_cast<double>(denom);
    }
    const std::size_t micro_denom = 2 * tp_sum + fp_sum + fn_sum;
    m.micro_f1 = micro_denom == 0 ? 0.0 : 2.0 * tp_sum / static_cast<double>(micro_denom);
    m.macro_f1 = num_classes == 0 ? 0.0 : macro_sum / static_cast<double>(num_classes);
    return m;
}

MetricsSummary summarize(std::vector<Metrics> runs) {
    MetricsSummary summary;
    summary.runs = std::move(runs);
    const std::size_t n = summary.runs.size();
    if (n == 0) return summary;
    for (const Metrics& m : summary.runs) {
        summary.mean.accuracy += m.accuracy;
        summary.mean.micro_f1 += m.micro_f1;
        summary.mean.macro_f1 += m.macro_f1;
    }
    summary.mean.accuracy /= n;
    summary.mean.micro_f1 /= n;
    summary.mean.macro_f1 /= n;
    for (const Metrics& m : summary.runs) {
        const double da = m.accuracy - summary.mean.accuracy;
        const double dmi = m.micro_f1 - summary.mean.micro_f1;
        const double dma = m.macro_f1 - summary.mean.macro_f1;
        summary.stddev.accuracy += da * da;
        summary.stddev.micro_f1 += dmi * dmi;
        summary.stddev.macro_f1 += dma * dma;
    }
    summary.stddev.accuracy = std::sqrt(summary.stddev.accuracy / n);
    summary.stddev.micro_f1 = std::sqrt(summary.stddev.micro_f1 / n);
    summary.stddev.macro_f1 = std::sqrt(summary.stddev.macro_f1 / n);
    return summary;
}

std::pair<double, double> select_hyperparameters(
    std::span<const double> margin_candidates, std::span<const double> lambda_candidates,
    const std::function<double(double margin, double lambda)>& score) {
    if (margin_candidates.empty() || lambda_candidates.empty()) {
        throw std::invalid_argument("hyperparameter candidate lists must be non-empty");
    }
    std::vector<double> margins(margin_candidates.begin(), margin_candidates.end());
    std::vector<double> lambdas(lambda_candidates.begin(), lambda_candidates.end());
    std::sort(margins.begin(), margins.end());
    std::sort(lambdas.begin(), lambdas.end());

    double best_margin = margins.front();
    double best_lambda = lambdas.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (double g : margins) {
        for (double l : lambdas) {
            const double s = score(g, l);
            if (s > best_score) { // strict: ties keep the smaller pair
                best_score = s;
                best_margin = g;
                best_lambda = l;
            }
        }
    }
    return {best_margin, best_lambda};
}

double cross_validate_micro_f1(const Matrix& representations, std::span<const VertexId> train,
                               const ClassLabels& labels, std::size_t num_classes, double lambda,
                               std::size_t folds, std::uint64_t seed, std::size_t num_threads) {
    if (folds < 2 || train.size() < folds) {
        throw std::invalid_argument("cross validation needs at least `folds` train vertices");
    }
    std::vector<VertexId> order(train.begin(), train.end());
    Rng rng = make_substream(seed, "cv-folds");
    shuffle_in_place(order, rng);

    double f1_sum = 0.0;
    for (std::size_t fold = 0; fold < folds; ++fold) {
        Split piece;
        piece.protocol = Split::Protocol::Fraction;
        piece.seed = seed;
        for (std::size_t j = 0; j < order.size(); ++j) {
            (j % folds == fold ? piece.test : piece.train).push_back(order[j]);
        }
        std::sort(piece.train.begin(), piece.train.end());
        std::sort(piece.test.begin(), piece.test.end());
        piece.train_classes = gather(labels, piece.train);
        piece.test_classes = gather(labels, piece.test);

        const ClassifierModel model =
            fit_logistic(representations, piece, lambda, num_classes, num_threads);
        std::vector<std::size_t> counts(piece.test.size());
        for (std::size_t j = 0; j < piece.test.size(); ++j) {
            counts[j] = piece.test_classes[j].size();
        }
        const auto predictions = predict_multilabel(model, representations, piece.test, counts);
        f1_sum += compute_metrics(predictions, piece.test_classes, num_classes).micro_f1;
    }
    return f1_sum / static_cast<double>(folds);
}

} // namespace ep
