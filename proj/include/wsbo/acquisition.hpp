#pragma once

#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wsbo/gp.hpp"

namespace wsbo {

/// Finite, duplicate-free set of design points.
class CandidateSet {
 public:
  explicit CandidateSet(std::vector<DesignPoint> points);

  const std::vector<DesignPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const DesignPoint& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<DesignPoint> points_;
};

struct AcquisitionResult {
  DesignPoint chosen;
  std::size_t chosen_index = 0;
  double score = 0.0;
  std::vector<std::pair<DesignPoint, double>> all_scores;
};

double sigma_tilde(const PosteriorState& state, const DesignPoint& xprime, const DesignPoint& x,
                   double noise_var);

/// E[max_i (a_i + b_i Z)] for standard normal Z.
double expected_max_affine(std::span<const double> a, std::span<const double> b);

/// E[max_i (a_i + b_i Z)] - max_i a_i, evaluated without cancellation.
/// Lines that cannot reach the upper envelope for |z| <= `z_cutoff` are dropped
/// first when `z_cutoff` is finite.
double expected_max_affine_gain(std::span<const double> a, std::span<const double> b,
                                double z_cutoff = std::numeric_limits<double>::infinity());

double kg_factor(const PosteriorState& state, const DesignPoint& x, const CandidateSet& disc,
                 double noise_var);

using NoiseFn = std::function<double(const DesignPoint&)>;

/// Knowledge-gradient scorer bound to one posterior and one discretization.
/// Precomputes the posterior mean over the discretization and the whitened
/// cross-covariances so each candidate costs O(|disc| * n).
class KnowledgeGradient {
 public:
  /// `disc_prior_cov`, when given, must be base_cross_cov over the
  /// discretization; callers scoring many posteriors on one discretization
  /// can compute it once.
  KnowledgeGradient(const PosteriorState& state, const CandidateSet& disc,
                    const Eigen::MatrixXd* disc_prior_cov = nullptr);

  double factor(const DesignPoint& x, double noise_var) const;

  /// Scores every candidate; the argmax with the lowest index wins ties.
  AcquisitionResult select(const CandidateSet& candidates, const NoiseFn& noise_fn) const;

  /// Scores every point of the discretization itself using the full
  /// posterior covariance matrix over it.
  AcquisitionResult select_from_discretization(const NoiseFn& noise_fn) const;

  const Eigen::VectorXd& disc_means() const { return means_; }

 private:
  double score_column(std::span<const double> cov_col, double var_x, double noise_var) const;

  const PosteriorState& state_;
  const CandidateSet& disc_;
  const Eigen::MatrixXd* disc_prior_cov_;
  Eigen::VectorXd means_;
  Eigen::MatrixXd whitened_;  // L^-1 K(X, disc)
  double max_mean_ = 0.0;
  double degenerate_floor_ = 0.0;
};

AcquisitionResult select_next_kg(const PosteriorState& state, const CandidateSet& candidates,
                                 const CandidateSet& disc, const NoiseFn& noise_fn);

double expected_improvement(double mean, double sd, double best);

AcquisitionResult select_next_ei(const PosteriorState& state, const CandidateSet& candidates,
                                 double best_observed);

double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace wsbo
