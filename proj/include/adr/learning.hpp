#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adr/labeling.hpp"

namespace adr {

// Index pairs over labelled points: same-label pairs drive the scatter
// normalization, cross-label pairs drive the separation objective.
struct PairSets {
    std::vector<std::pair<int, int>> similar;
    std::vector<std::pair<int, int>> dissimilar;
};

// Throws PipelineError when fewer than two labelled classes are present.
PairSets build_pairs(const std::vector<Label>& labels);

// (X_S + eps*I)^(-1/2) where X_S sums (xi-xj)(xi-xj)^T over similar pairs and
// eps = 1e-8 * trace(X_S) / d. Throws PipelineError when X_S is exactly zero
// (every similar pair has identical points).
Eigen::MatrixXd scatter_inverse_sqrt(const std::vector<Eigen::VectorXd>& points,
                                     const std::vector<std::pair<int, int>>& similar);

// W * (xi-xj)(xi-xj)^T * W for every dissimilar pair, W symmetric.
std::vector<Eigen::MatrixXd> normalized_dissimilar(
    const std::vector<Eigen::VectorXd>& points,
    const std::vector<std::pair<int, int>>& dissimilar, const Eigen::MatrixXd& whitener);

// Soft minimum of <Xt, S> over the normalized dissimilar matrices:
// -mu * log sum exp(-<Xt,S>/mu), evaluated with the extreme exponent
// factored out so no term overflows.
double smoothed_objective(const Eigen::MatrixXd& S,
                          const std::vector<Eigen::MatrixXd>& normalized, double mu);

// Softmin-weighted average of the normalized matrices; symmetric PSD.
Eigen::MatrixXd smoothed_gradient(const Eigen::MatrixXd& S,
                                  const std::vector<Eigen::MatrixXd>& normalized, double mu);

// Dominant eigenvector of a symmetric PSD matrix by power iteration,
// tolerance 1e-10, deterministic start e1 plus fixed-seed jitter.
Eigen::VectorXd max_eigenvector(const Eigen::MatrixXd& matrix);

struct LearnConfig {
    double mu = 1e-5;
    double tol = 1e-5;
    int max_iter = 500;
    bool record_iterates = false;  // keep every S_t for invariant checks
};

struct LearnResult {
    Eigen::MatrixXd metric;  // symmetric, trace 1, PSD
    std::vector<double> objective_trace;
    std::vector<Eigen::MatrixXd> iterates;  // filled when record_iterates
    int iterations = 0;
};

// Frank-Wolfe ascent over the trace-one PSD cone: S1 = I/d, linear oracle
// = dominant eigenvector of the gradient, step 2/(t+2), stop when the
// objective moves less than tol or at max_iter.
LearnResult learn_metric(const std::vector<Eigen::VectorXd>& points,
                         const std::vector<Label>& labels, const LearnConfig& config);

// x -> S^(1/2) x, so Euclidean distance afterwards equals the Mahalanobis
// distance under S. literal_row_form instead applies x -> S x, the flat
// matrix product form, kept for comparison.
std::vector<Eigen::VectorXd> transform_points(const std::vector<Eigen::VectorXd>& points,
                                              const Eigen::MatrixXd& metric,
                                              bool literal_row_form = false);

struct ClusterResult {
    std::vector<int> assignment;  // cluster index per point
    std::vector<Eigen::VectorXd> means;
    int iterations = 0;
};

// Seeded k-means where seed points are pinned to their cluster: means start
// at seed averages, unlabelled points go to the nearest mean (squared
// Euclidean, ties to the lowest cluster index), means are recomputed over
// seeds plus assigned points, until assignments stop changing or max_iter.
ClusterResult constrained_kmeans(const std::vector<Eigen::VectorXd>& points,
                                 const std::vector<std::vector<int>>& seeds, int max_iter);

// Sum of squared distances to assigned means; the quantity k-means descends.
double kmeans_objective(const std::vector<Eigen::VectorXd>& points, const ClusterResult& result);

}  // namespace adr
