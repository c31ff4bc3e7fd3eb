#include "wsbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wsbo/errors.hpp"

namespace wsbo {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

CandidateSet::CandidateSet(std::vector<DesignPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("candidate set must not be empty");
  const auto d = points_.front().size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != d) throw InvalidArgument("candidate set: inconsistent dimensions");
    for (std::size_t j = 0; j < i; ++j) {
      if ((points_[i] - points_[j]).cwiseAbs().maxCoeff() <= 1e-12) {
        throw InvalidArgument("candidate set: duplicate points at indices " + std::to_string(j) +
                              " and " + std::to_string(i));
      }
    }
  }
}

namespace {

constexpr double kSlopeMergeTol = 1e-12;
constexpr double kKgFloor = 1e-14;
constexpr double kKgCutoff = 10.0;

// E[(Z + z)^+] = z Phi(z) + phi(z)
double envelope_term(double z) { return std::max(0.0, z * normal_cdf(z) + normal_pdf(z)); }

struct Line {
  double slope;
  double intercept;
};

double envelope_gain(std::vector<Line>& lines) {
  std::sort(lines.begin(), lines.end(), [](const Line& l, const Line& r) {
    return l.slope < r.slope || (l.slope == r.slope && l.intercept < r.intercept);
  });
  // merge (nearly) parallel lines, keeping the higher one
  std::size_t kept = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (kept > 0 && lines[i].slope - lines[kept - 1].slope < kSlopeMergeTol) {
      if (lines[i].intercept >= lines[kept - 1].intercept) lines[kept - 1] = lines[i];
      continue;
    }
    lines[kept++] = lines[i];
  }
  lines.resize(kept);

  // upper envelope; breaks[k] is where envelope line k takes over from k - 1
  std::vector<Line> hull;
  std::vector<double> breaks;
  hull.reserve(lines.size());
  breaks.reserve(lines.size());
  for (const Line& line : lines) {
    double z = -std::numeric_limits<double>::infinity();
    while (!hull.empty()) {
      const Line& top = hull.back();
      z = (top.intercept - line.intercept) / (line.slope - top.slope);
      if (z <= breaks.back()) {
        hull.pop_back();
        breaks.pop_back();
        z = -std::numeric_limits<double>::infinity();
      } else {
        break;
      }
    }
    hull.push_back(line);
    breaks.push_back(z);
  }

  double gain = 0.0;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    gain += (hull[k].slope - hull[k - 1].slope) * envelope_term(-std::abs(breaks[k]));
  }
  return gain;
}

void check_affine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("expected_max_affine: a and b differ in length");
  if (a.empty()) throw InvalidArgument("expected_max_affine: empty input");
}

}  // namespace

double expected_max_affine_gain(std::span<const double> a, std::span<const double> b, double z_cutoff) {
  check_affine(a, b);
  const auto best = static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
  std::vector<Line> lines;
  lines.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isfinite(z_cutoff) && i != best &&
        (a[i] - a[best]) + std::abs(b[i] - b[best]) * z_cutoff < 0.0) {
      continue;
    }
    lines.push_back({b[i], a[i]});
  }
  return envelope_gain(lines);
}

double expected_max_affine(std::span<const double> a, std::span<const double> b) {
  check_affine(a, b);
  return *std::max_element(a.begin(), a.end()) + expected_max_affine_gain(a, b);
}

namespace {

double degenerate_floor(const PosteriorState& state) {
  return std::max(10.0 * state.jitter(), 1e-12 * state.hyper().base.amplitude);
}

}  // namespace

double sigma_tilde(const PosteriorState& state, const DesignPoint& xprime, const DesignPoint& x,
                   double noise_var) {
  if (!(noise_var >= 0.0)) throw InvalidArgument("sigma_tilde: noise variance must be nonnegative");
  const double denom = posterior_cov(state, x, x) + noise_var;
  if (denom <= degenerate_floor(state)) {
    throw DegenerateMeasurement("sigma_tilde: measurement at a fully determined point");
  }
  return posterior_cov(state, xprime, x) / std::sqrt(denom);
}

KnowledgeGradient::KnowledgeGradient(const PosteriorState& state, const CandidateSet& disc,
                                     const Eigen::MatrixXd* disc_prior_cov)
    : state_(state), disc_(disc), disc_prior_cov_(disc_prior_cov), degenerate_floor_(degenerate_floor(state)) {
  if (disc.points().front().size() != state.dim()) {
    throw InvalidArgument("knowledge gradient: discretization dimension mismatch");
  }
  const auto size = static_cast<Eigen::Index>(disc.size());
  if (disc_prior_cov && (disc_prior_cov->rows() != size || disc_prior_cov->cols() != size)) {
    throw InvalidArgument("knowledge gradient: prior covariance does not match the discretization");
  }
  const auto n = state.size();
  const auto m = static_cast<Eigen::Index>(disc.size());
  means_ = Eigen::VectorXd::Constant(m, state.hyper().mean_const);
  if (n > 0) {
    whitened_ = state.cross_cov(disc.points());
    means_.noalias() += whitened_.transpose() * state.weights();
    state.factor().triangularView<Eigen::Lower>().solveInPlace(whitened_);
  } else {
    whitened_.resize(0, m);
  }
  max_mean_ = means_.maxCoeff();
}

double KnowledgeGradient::score_column(std::span<const double> cov_col, double var_x,
                                       double noise_var) const {
  const double denom = var_x + noise_var;
  if (denom <= degenerate_floor_) return 0.0;  // a fully determined point carries no information
  const double scale = 1.0 / std::sqrt(denom);
  std::vector<double> b(cov_col.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = cov_col[i] * scale;
  const double gain = expected_max_affine_gain(std::span<const double>(means_.data(), b.size()), b, kKgCutoff);
  return gain < kKgFloor ? 0.0 : gain;
}

double KnowledgeGradient::factor(const DesignPoint& x, double noise_var) const {
  if (x.size() != state_.dim()) throw InvalidArgument("kg_factor: dimension mismatch");
  if (!(noise_var >= 0.0)) throw InvalidArgument("kg_factor: noise variance must be nonnegative");
  Eigen::VectorXd col = base_cross_cov(state_.hyper().base, disc_.points(), {x}).col(0);
  double var_x = state_.hyper().base.amplitude;
  if (state_.size() > 0) {
    Eigen::VectorXd v = state_.cross_cov({x}).col(0);
    state_.factor().triangularView<Eigen::Lower>().solveInPlace(v);
    col.noalias() -= whitened_.transpose() * v;
    var_x = std::max(0.0, var_x - v.squaredNorm());
  }
  return score_column(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), var_x,
                      noise_var);
}

namespace {

void record(AcquisitionResult& result, const DesignPoint& x, std::size_t index, double score) {
  if (result.all_scores.empty() || score > result.score) {
    result.chosen = x;
    result.chosen_index = index;
    result.score = score;
  }
  result.all_scores.emplace_back(x, score);
}

bool same_points(const CandidateSet& a, const CandidateSet& b) {
  if (&a == &b) return true;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

AcquisitionResult KnowledgeGradient::select_from_discretization(const NoiseFn& noise_fn) const {
  Eigen::MatrixXd cov = disc_prior_cov_ ? *disc_prior_cov_ : base_cross_cov(state_.hyper().base, disc_.points(), disc_.points());
  if (state_.size() > 0) cov.noalias() -= whitened_.transpose() * whitened_;
  AcquisitionResult result;
  result.all_scores.reserve(disc_.size());
  for (std::size_t j = 0; j < disc_.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double noise = noise_fn(disc_[j]);
    if (!(noise >= 0.0)) throw InvalidArgument("noise function returned a negative variance");
    const double score = score_column(
        std::span<const double>(cov.col(col).data(), disc_.size()), std::max(0.0, cov(col, col)), noise);
    record(result, disc_[j], j, score);
  }
  return result;
}

AcquisitionResult KnowledgeGradient::select(const CandidateSet& candidates, const NoiseFn& noise_fn) const {
  if (same_points(candidates, disc_)) return select_from_discretization(noise_fn);
  AcquisitionResult result;
  result.all_scores.reserve(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    record(result, candidates[j], j, factor(candidates[j], noise_fn(candidates[j])));
  }
  return result;
}

double kg_factor(const PosteriorState& state, const DesignPoint& x, const CandidateSet& disc,
                 double noise_var) {
  return KnowledgeGradient(state, disc).factor(x, noise_var);
}

AcquisitionResult select_next_kg(const PosteriorState& state, const CandidateSet& candidates,
                                 const CandidateSet& disc, const NoiseFn& noise_fn) {
  return KnowledgeGradient(state, disc).select(candidates, noise_fn);
}

double expected_improvement(double mean, double sd, double best) {
  if (!(sd >= 0.0)) throw InvalidArgument("expected_improvement: negative standard deviation");
  const double diff = mean - best;
  if (sd == 0.0) return std::max(diff, 0.0);
  const double z = diff / sd;
  return std::max(0.0, diff * normal_cdf(z) + sd * normal_pdf(z));
}

AcquisitionResult select_next_ei(const PosteriorState& state, const CandidateSet& candidates,
                                 double best_observed) {
  if (candidates.points().front().size() != state.dim()) {
    throw InvalidArgument("select_next_ei: dimension mismatch");
  }
  const auto m = static_cast<Eigen::Index>(candidates.size());
  Eigen::VectorXd means = Eigen::VectorXd::Constant(m, state.hyper().mean_const);
  Eigen::VectorXd vars = Eigen::VectorXd::Constant(m, state.hyper().base.amplitude);
  if (state.size() > 0) {
    Eigen::MatrixXd k = state.cross_cov(candidates.points());
    means.noalias() += k.transpose() * state.weights();
    state.factor().triangularView<Eigen::Lower>().solveInPlace(k);
    vars -= k.colwise().squaredNorm().transpose();
  }
  AcquisitionResult result;
  result.all_scores.reserve(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    record(result, candidates[j], j, expected_improvement(means[i], std::sqrt(std::max(0.0, vars[i])), best_observed));
  }
  return result;
}

}  // namespace wsbo
