#include "edgepose/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace edgepose {

namespace {

// Continued-fraction evaluation of the incomplete beta (Lentz's method).
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("beta_cdf: continued fraction did not converge");
}

}  // namespace

double beta_cdf(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta_cdf: shape parameters must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  double result;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = front * beta_cont_frac(a, b, x) / a;
  } else {
    result = 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
  }
  return std::clamp(result, 0.0, 1.0);
}

ConfidenceModel ConfidenceModel::beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("ConfidenceModel: beta parameters must be strictly positive");
  }
  ConfidenceModel m;
  m.kind_ = Kind::kBeta;
  m.alpha_ = alpha;
  m.beta_ = beta;
  return m;
}

ConfidenceModel ConfidenceModel::empirical(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("ConfidenceModel: empirical sample list is empty");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = samples[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("ConfidenceModel: sample " + std::to_string(i) +
                                  " out of range [0,1]: " + std::to_string(s));
    }
  }
  std::sort(samples.begin(), samples.end());
  ConfidenceModel m;
  m.kind_ = Kind::kEmpirical;
  m.samples_ = std::move(samples);
  return m;
}

ConfidenceModel fit_empirical(std::vector<double> samples) {
  return ConfidenceModel::empirical(std::move(samples));
}

double ConfidenceModel::cdf(double x) const {
  if (kind_ == Kind::kBeta) {
    return beta_cdf(alpha_, beta_, x);
  }
  if (x < samples_.front()) return 0.0;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double ConfidenceModel::sample(std::mt19937_64& rng) const {
  if (kind_ == Kind::kBeta) {
    std::gamma_distribution<double> ga(alpha_, 1.0);
    std::gamma_distribution<double> gb(beta_, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    const double s = x + y;
    if (s <= 0.0) return 0.5;  // both underflowed; vanishing probability
    double v = x / s;
    return std::clamp(v, 0.0, 1.0);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = samples_.size();
  std::size_t idx = static_cast<std::size_t>(u(rng) * static_cast<double>(n));
  if (idx >= n) idx = n - 1;
  return samples_[idx];
}

std::vector<double> ConfidenceModel::sample(std::mt19937_64& rng, std::size_t n) const {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

double ConfidenceModel::mean() const {
  if (kind_ == Kind::kBeta) return alpha_ / (alpha_ + beta_);
  double s = 0.0;
  for (double v : samples_) s += v;
  return s / static_cast<double>(samples_.size());
}

std::pair<double, double> fit_beta_moments(const std::vector<double>& samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("fit_beta_moments: need at least two samples");
  }
  double m = 0.0;
  for (double s : samples) m += s;
  m /= static_cast<double>(samples.size());
  double v = 0.0;
  for (double s : samples) v += (s - m) * (s - m);
  v /= static_cast<double>(samples.size());
  if (!(v > 0.0) || !(m > 0.0) || !(m < 1.0)) {
    throw std::invalid_argument("fit_beta_moments: degenerate sample moments");
  }
  const double common = m * (1.0 - m) / v - 1.0;
  if (!(common > 0.0)) {
    throw std::invalid_argument("fit_beta_moments: variance too large for a beta fit");
  }
  return {m * common, (1.0 - m) * common};
}

std::vector<double> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_samples: cannot open " + path);
  }
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "confidence") continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("load_samples: unparsable value at line " +
                                  std::to_string(line_no) + ": '" + line + "'");
    }
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos != line.size()) {
      throw std::invalid_argument("load_samples: trailing junk at line " +
                                  std::to_string(line_no) + ": '" + line + "'");
    }
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("load_samples: value out of [0,1] at line " +
                                  std::to_string(line_no) + ": " + std::to_string(v));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace edgepose
