#include "adr/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adr/errors.hpp"
#include "adr/rng.hpp"

namespace adr {
namespace {

double frobenius_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a.array() * b.array()).sum();
}

}  // namespace

PairSets build_pairs(const std::vector<Label>& labels) {
    std::vector<std::vector<int>> classes;
    for (Label want : {Label::Adr, Label::Indicator, Label::Noise}) {
        std::vector<int> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == want) members.push_back(static_cast<int>(i));
        }
        if (!members.empty()) classes.push_back(std::move(members));
    }
    if (classes.size() < 2) {
        throw PipelineError("metric learning needs at least two labelled classes");
    }
    PairSets pairs;
    for (const auto& members : classes) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                pairs.similar.emplace_back(members[a], members[b]);
            }
        }
    }
    for (std::size_t l = 0; l < classes.size(); ++l) {
        for (std::size_t m = l + 1; m < classes.size(); ++m) {
            for (int a : classes[l]) {
                for (int b : classes[m]) pairs.dissimilar.emplace_back(a, b);
            }
        }
    }
    return pairs;
}

Eigen::MatrixXd scatter_inverse_sqrt(const std::vector<Eigen::VectorXd>& points,
                                     const std::vector<std::pair<int, int>>& similar) {
    if (similar.empty()) throw PipelineError("no similar pairs to normalize against");
    const auto d = points.front().size();
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [i, j] : similar) {
        const Eigen::VectorXd diff =
            points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)];
        scatter.noalias() += diff * diff.transpose();
    }
    const double tr = scatter.trace();
    if (tr == 0.0) {
        throw PipelineError(
            "similar pairs are identical points; the scatter matrix is zero "
            "(review the attribute computation)");
    }
    const double ridge = 1e-8 * tr / static_cast<double>(d);
    scatter += ridge * Eigen::MatrixXd::Identity(d, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(scatter);
    const Eigen::VectorXd inv_sqrt = eigen.eigenvalues().cwiseInverse().cwiseSqrt();
    return eigen.eigenvectors() * inv_sqrt.asDiagonal() * eigen.eigenvectors().transpose();
}

std::vector<Eigen::MatrixXd> normalized_dissimilar(
    const std::vector<Eigen::VectorXd>& points,
    const std::vector<std::pair<int, int>>& dissimilar, const Eigen::MatrixXd& whitener) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(dissimilar.size());
    for (const auto& [i, j] : dissimilar) {
        const Eigen::VectorXd diff =
            whitener * (points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]);
        out.emplace_back(diff * diff.transpose());
    }
    return out;
}

double smoothed_objective(const Eigen::MatrixXd& S,
                          const std::vector<Eigen::MatrixXd>& normalized, double mu) {
    if (normalized.empty()) throw PipelineError("no dissimilar pairs");
    double lowest = std::numeric_limits<double>::infinity();
    std::vector<double> inner(normalized.size());
    for (std::size_t t = 0; t < normalized.size(); ++t) {
        inner[t] = frobenius_inner(normalized[t], S);
        lowest = std::min(lowest, inner[t]);
    }
    double sum = 0.0;
    for (double a : inner) sum += std::exp(-(a - lowest) / mu);
    return lowest - mu * std::log(sum);
}

Eigen::MatrixXd smoothed_gradient(const Eigen::MatrixXd& S,
                                  const std::vector<Eigen::MatrixXd>& normalized, double mu) {
    if (normalized.empty()) throw PipelineError("no dissimilar pairs");
    double lowest = std::numeric_limits<double>::infinity();
    std::vector<double> inner(normalized.size());
    for (std::size_t t = 0; t < normalized.size(); ++t) {
        inner[t] = frobenius_inner(normalized[t], S);
        lowest = std::min(lowest, inner[t]);
    }
    Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(S.rows(), S.cols());
    double total = 0.0;
    for (std::size_t t = 0; t < normalized.size(); ++t) {
        const double w = std::exp(-(inner[t] - lowest) / mu);
        weighted.noalias() += w * normalized[t];
        total += w;
    }
    return weighted / total;
}

Eigen::VectorXd max_eigenvector(const Eigen::MatrixXd& matrix) {
    const auto d = matrix.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(0) = 1.0;
    // Jitter moves the start off any exact eigenspace boundary; the seed is
    // fixed so runs stay bit-identical.
    Rng jitter(0x5851f42d4c957f2dULL);
    for (Eigen::Index i = 0; i < d; ++i) v(i) += 1e-8 * (jitter.next_double() - 0.5);
    v.normalize();
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd next = matrix * v;
        const double norm = next.norm();
        if (norm == 0.0) return v;  // zero matrix: every direction is maximal
        next /= norm;
        const double delta = (next - v).norm();
        v = next;
        if (delta < 1e-10) break;
    }
    return v;
}

LearnResult learn_metric(const std::vector<Eigen::VectorXd>& points,
                         const std::vector<Label>& labels, const LearnConfig& config) {
    if (config.mu <= 0.0 || config.tol <= 0.0 || config.max_iter <= 0) {
        throw InputError("learn_metric: mu, tol and max_iter must be positive");
    }
    if (points.empty()) throw PipelineError("learn_metric: no points");
    const PairSets pairs = build_pairs(labels);
    const Eigen::MatrixXd whitener = scatter_inverse_sqrt(points, pairs.similar);
    const std::vector<Eigen::MatrixXd> normalized =
        normalized_dissimilar(points, pairs.dissimilar, whitener);

    const auto d = points.front().size();
    LearnResult result;
    result.metric = Eigen::MatrixXd::Identity(d, d) / static_cast<double>(d);
    double objective = smoothed_objective(result.metric, normalized, config.mu);
    result.objective_trace.push_back(objective);
    if (config.record_iterates) result.iterates.push_back(result.metric);

    for (int t = 1; t <= config.max_iter; ++t) {
        const Eigen::MatrixXd gradient = smoothed_gradient(result.metric, normalized, config.mu);
        const Eigen::VectorXd v = max_eigenvector(gradient);
        const double alpha = 2.0 / (t + 2);
        result.metric = (1.0 - alpha) * result.metric + alpha * (v * v.transpose());
        const double next = smoothed_objective(result.metric, normalized, config.mu);
        result.objective_trace.push_back(next);
        if (config.record_iterates) result.iterates.push_back(result.metric);
        result.iterations = t;
        if (std::abs(next - objective) < config.tol) break;
        objective = next;
    }
    return result;
}

std::vector<Eigen::VectorXd> transform_points(const std::vector<Eigen::VectorXd>& points,
                                              const Eigen::MatrixXd& metric,
                                              bool literal_row_form) {
    Eigen::MatrixXd map;
    if (literal_row_form) {
        map = metric;
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(metric);
        // Numerical iterates can carry eigenvalues a hair below zero.
        const Eigen::VectorXd roots = eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        map = eigen.eigenvectors() * roots.asDiagonal() * eigen.eigenvectors().transpose();
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(points.size());
    for (const Eigen::VectorXd& x : points) out.emplace_back(map * x);
    return out;
}

ClusterResult constrained_kmeans(const std::vector<Eigen::VectorXd>& points,
                                 const std::vector<std::vector<int>>& seeds, int max_iter) {
    if (points.empty()) throw PipelineError("constrained_kmeans: no points");
    if (max_iter <= 0) throw InputError("constrained_kmeans: max_iter must be positive");
    const std::size_t k = seeds.size();
    for (std::size_t c = 0; c < k; ++c) {
        if (seeds[c].empty()) {
            throw PipelineError("constrained_kmeans: seed set " + std::to_string(c) +
                                " is empty");
        }
    }

    ClusterResult result;
    result.assignment.assign(points.size(), -1);
    for (std::size_t c = 0; c < k; ++c) {
        for (int i : seeds[c]) result.assignment[static_cast<std::size_t>(i)] = static_cast<int>(c);
    }
    std::vector<std::size_t> unlabelled;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (result.assignment[i] == -1) unlabelled.push_back(i);
    }

    const auto d = points.front().size();
    const auto recompute_means = [&] {
        result.means.assign(k, Eigen::VectorXd::Zero(d));
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const int c = result.assignment[i];
            if (c < 0) continue;
            result.means[static_cast<std::size_t>(c)] += points[i];
            ++counts[static_cast<std::size_t>(c)];
        }
        // Every cluster holds its seeds, so counts are always positive.
        for (std::size_t c = 0; c < k; ++c) result.means[c] /= counts[c];
    };
    recompute_means();

    for (int iter = 1; iter <= max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i : unlabelled) {
            int best = 0;
            double best_distance = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double distance = (points[i] - result.means[c]).squaredNorm();
                if (distance < best_distance) {
                    best_distance = distance;
                    best = static_cast<int>(c);
                }
            }
            if (result.assignment[i] != best) {
                result.assignment[i] = best;
                changed = true;
            }
        }
        recompute_means();
        result.iterations = iter;
        if (!changed) break;
    }
    return result;
}

double kmeans_objective(const std::vector<Eigen::VectorXd>& points, const ClusterResult& result) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int c = result.assignment[i];
        if (c < 0) continue;
        total += (points[i] - result.means[static_cast<std::size_t>(c)]).squaredNorm();
    }
    return total;
}

}  // namespace adr
