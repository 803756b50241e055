#ifndef EDGEPOSE_CONFIDENCE_HPP
#define EDGEPOSE_CONFIDENCE_HPP

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace edgepose {

// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
double beta_cdf(double a, double b, double x);

// Distribution of a confidence score on [0, 1]. Either a parametric beta
// distribution or the empirical distribution of a sorted sample set.
// Immutable after construction; invalid parameters are rejected up front so
// cdf()/sample() never fail.
class ConfidenceModel {
 public:
  enum class Kind { kBeta, kEmpirical };

  static ConfidenceModel beta(double alpha, double beta);
  static ConfidenceModel empirical(std::vector<double> samples);

  // P(C <= x). Exact order-statistic count for empirical models,
  // I_x(alpha, beta) for beta models.
  double cdf(double x) const;

  double sample(std::mt19937_64& rng) const;
  std::vector<double> sample(std::mt19937_64& rng, std::size_t n) const;

  // Mean of the distribution (alpha/(alpha+beta) or the sample mean).
  double mean() const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta_param() const { return beta_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  ConfidenceModel() = default;

  Kind kind_ = Kind::kBeta;
  double alpha_ = 1.0;
  double beta_ = 1.0;
  std::vector<double> samples_;  // sorted ascending, non-empty for empirical
};

// The four label-conditional score distributions driving every formula:
// device/server model evaluated on positive/negative inputs.
struct ConfidenceQuad {
  ConfidenceModel dev_pos;
  ConfidenceModel dev_neg;
  ConfidenceModel srv_pos;
  ConfidenceModel srv_neg;
};

// Builds an empirical model from raw scores; rejects values outside [0, 1]
// naming the offending index.
ConfidenceModel fit_empirical(std::vector<double> samples);

// Method-of-moments beta fit (alpha, beta). Requires non-degenerate variance.
std::pair<double, double> fit_beta_moments(const std::vector<double>& samples);

// Reads one confidence value per line; a single leading "confidence" header
// line is allowed. Parse failures report the 1-based line number.
std::vector<double> load_samples(const std::string& path);

}  // namespace edgepose

#endif
