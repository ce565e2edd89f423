#pragma once

// Distances and divergences: normalized Hamming distance, the bounded
// discrepancy Omega, Hellinger and chi-square in Gaussian closed form,
// mean Hellinger between per-pixel mixtures (by quadrature), and the
// oracle tradeoff / learning-error diagnostics.
//
// All logarithms are natural.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hsseg/core.hpp"
#include "hsseg/errors.hpp"
#include "hsseg/learn.hpp"
#include "hsseg/mixlet.hpp"

namespace hsseg::divergence {

struct MetricReport {
  double hamming = 0.0;
  std::vector<std::vector<std::int64_t>> confusion;  // K x K, truth-major
  std::int64_t n_pixels = 0;
};

inline MetricReport confusion_report(const LabelMap& pred,
                                     const LabelMap& truth) {
  if (pred.geom != truth.geom || pred.K != truth.K)
    throw GeometryMismatch("label maps differ in geometry or K");
  MetricReport r;
  r.n_pixels = pred.geom.N;
  r.confusion.assign(truth.K, std::vector<std::int64_t>(truth.K, 0));
  std::int64_t off = 0;
  for (std::int64_t i = 0; i < pred.geom.N; ++i) {
    ++r.confusion[truth.labels[i]][pred.labels[i]];
    if (truth.labels[i] != pred.labels[i]) ++off;
  }
  r.hamming = static_cast<double>(off) / r.n_pixels;
  return r;
}

// (1/N) sum_i 1{a[i] != b[i]}
inline double hamming(const LabelMap& a, const LabelMap& b) {
  if (a.geom != b.geom || a.K != b.K)
    throw GeometryMismatch("label maps differ in geometry or K");
  std::int64_t off = 0;
  for (std::int64_t i = 0; i < a.geom.N; ++i)
    off += a.labels[i] != b.labels[i] ? 1 : 0;
  return static_cast<double>(off) / a.geom.N;
}

// Omega(x) = |x-1| / (x+1), with Omega(+inf) = 1.
inline double omega(double x) {
  if (std::isnan(x) || x < 0.0) throw NegativeInput("omega needs x >= 0");
  if (std::isinf(x)) return 1.0;
  return std::abs(x - 1.0) / (x + 1.0);
}

namespace detail {

inline void check_gaussian_args(const std::vector<double>& mu_a,
                                const std::vector<double>& mu_b,
                                const std::vector<double>& var) {
  if (mu_a.size() != mu_b.size() || mu_a.size() != var.size())
    throw DimensionMismatch("mean/variance lengths differ");
  for (double v : var)
    if (!(v > 0.0)) throw NonPositiveVariance("variance entries must be > 0");
}

// Squared Mahalanobis distance sum_j (a_j - b_j)^2 / var_j.
inline double mahalanobis_sq(const std::vector<double>& mu_a,
                             const std::vector<double>& mu_b,
                             const std::vector<double>& var) {
  double s = 0.0;
  for (std::size_t j = 0; j < var.size(); ++j) {
    double d = mu_a[j] - mu_b[j];
    s += d * d / var[j];
  }
  return s;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const Quadrature& gauss_legendre_512() {
    static const Quadrature q = make(512);
    return q;
  }

  static Quadrature make(int n) {
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      q.nodes[i] = -x;
      q.nodes[n - 1 - i] = x;
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      q.weights[i] = w;
      q.weights[n - 1 - i] = w;
    }
    return q;
  }
};

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

}  // namespace detail

// Squared Hellinger distance between N(mu_a, diag(var)) and
// N(mu_b, diag(var)): 2 (1 - exp(-Mahalanobis^2 / 8)).
inline double hellinger_sq_gaussian(const std::vector<double>& mu_a,
                                    const std::vector<double>& mu_b,
                                    const std::vector<double>& var) {
  detail::check_gaussian_args(mu_a, mu_b, var);
  return 2.0 * (1.0 - std::exp(-detail::mahalanobis_sq(mu_a, mu_b, var) / 8.0));
}

// chi^2(N(mu_a, C), N(mu_b, C)) = exp(Mahalanobis^2) - 1; exponents past
// 700 overflow and are reported as +infinity.
inline double chi_square_gaussian(const std::vector<double>& mu_a,
                                  const std::vector<double>& mu_b,
                                  const std::vector<double>& var) {
  detail::check_gaussian_args(mu_a, mu_b, var);
  double m2 = detail::mahalanobis_sq(mu_a, mu_b, var);
  if (m2 > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(m2) - 1.0;
}

namespace detail {

// The two whitened class components differ only along one direction;
// their projections onto it are N(s0, 1) and N(s1, 1). Everything
// orthogonal cancels in every mixture-vs-mixture integral.
inline std::pair<double, double> projected_means(
    const hsseg::learn::ClassModel& model) {
  if (model.K != 2) throw UnsupportedK("K=2 only");
  double norm2 = 0.0;
  for (int j : model.support) {
    double d = (model.means[1][j] - model.means[0][j]);
    norm2 += d * d / model.var[j];
  }
  double norm = std::sqrt(norm2);
  if (norm == 0.0) return {0.0, 0.0};
  // With e the unit separation direction, <e, nu_k> differ by exactly
  // norm; center so s0 = -norm/2, s1 = +norm/2.
  return {-norm / 2.0, norm / 2.0};
}

// h^2 between two 2-component mixtures of N(s0,1), N(s1,1) with class-0
// weights pa and pb, by 512-node Gauss-Legendre over +-10 sd.
inline double mixture_hellinger_sq_1d(double s0, double s1, double pa,
                                      double pb) {
  const auto& q = Quadrature::gauss_legendre_512();
  double lo = std::min(s0, s1) - 10.0;
  double hi = std::max(s0, s1) + 10.0;
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double t = mid + half * q.nodes[i];
    double f0 = std_normal_pdf(t - s0);
    double f1 = std_normal_pdf(t - s1);
    double fa = pa * f0 + (1.0 - pa) * f1;
    double fb = pb * f0 + (1.0 - pb) * f1;
    double d = std::sqrt(fa) - std::sqrt(fb);
    acc += q.weights[i] * d * d;
  }
  return acc * half;
}

}  // namespace detail

// Mean Hellinger distance squared between the two per-pixel mixtures
// induced by the weight fields over a shared K=2 class model.
inline double mean_hellinger_sq(const WeightField& wf_a,
                                const WeightField& wf_b,
                                const hsseg::learn::ClassModel& model) {
  if (wf_a.geom != wf_b.geom) throw GeometryMismatch("weight fields");
  if (wf_a.K != 2 || wf_b.K != 2 || model.K != 2)
    throw UnsupportedK("mean_hellinger_sq supports K=2 only");
  auto [s0, s1] = detail::projected_means(model);
  double acc = 0.0;
  for (std::int64_t i = 0; i < wf_a.geom.N; ++i)
    acc += detail::mixture_hellinger_sq_1d(s0, s1, wf_a.at(i, 0), wf_b.at(i, 0));
  return acc / wf_a.geom.N;
}

// h(R, N) = || pi(truth) - pi(R) ||_l1 + pen_N(R).
inline double oracle_tradeoff(const WeightField& truth,
                              const hsseg::mixlet::RdpTree& model_tree) {
  if (truth.geom != model_tree.geom) throw GeometryMismatch("oracle_tradeoff");
  if (truth.K != 2 || model_tree.K != 2) throw UnsupportedK("K=2 only");
  WeightField flat = model_tree.flatten();
  double l1 = 0.0;
  for (std::int64_t i = 0; i < truth.geom.N; ++i)
    l1 += std::abs(truth.at(i, 0) - flat.at(i, 0));
  return l1 + hsseg::mixlet::penalty(model_tree.leaf_count(), truth.geom.N);
}

namespace detail {

// E_{N(a,C)}[ N(.;b,C) / N(.;c,C) ] = exp( sum_j (b-c)(a-c)/var ) for a
// shared diagonal covariance; evaluated on the given band set.
inline double expected_density_ratio(const std::vector<int>& bands,
                                     const std::vector<std::vector<double>>& mus,
                                     int a, int b, int c,
                                     const std::vector<double>& var) {
  double e = 0.0;
  for (int j : bands)
    e += (mus[b][j] - mus[c][j]) * (mus[a][j] - mus[c][j]) / var[j];
  if (e > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(e);
}

}  // namespace detail

// Learning-error diagnostics (D0, D1):
//   D0 = max( chi^2(P0, P~0), E_{P0}[(P1 - P~1)/P~1] )
//   D1 = max( chi^2(P1, P~1), E_{P1}[(P0 - P~0)/P~0] )
// with all four distributions Gaussian under the shared known diagonal
// covariance, evaluated on the union of the two supports.
inline std::pair<double, double> learning_terms(
    const hsseg::learn::ClassModel& true_model,
    const hsseg::learn::ClassModel& est_model) {
  if (true_model.K != 2 || est_model.K != 2) throw UnsupportedK("K=2 only");
  if (true_model.p != est_model.p) throw DimensionMismatch("p differs");
  std::vector<int> bands;
  std::merge(true_model.support.begin(), true_model.support.end(),
             est_model.support.begin(), est_model.support.end(),
             std::back_inserter(bands));
  bands.erase(std::unique(bands.begin(), bands.end()), bands.end());
  for (int j : bands)
    if (true_model.var[j] != est_model.var[j])
      throw CovarianceMismatch("band " + std::to_string(j));

  // Row layout: 0,1 true means; 2,3 estimated means.
  std::vector<std::vector<double>> mus = {true_model.means[0],
                                          true_model.means[1],
                                          est_model.means[0],
                                          est_model.means[1]};
  const auto& var = true_model.var;
  auto ratio = [&](int a, int b, int c) {
    return detail::expected_density_ratio(bands, mus, a, b, c, var);
  };
  double chi0 = ratio(0, 0, 2) - 1.0;  // chi^2(P0, P~0)
  double chi1 = ratio(1, 1, 3) - 1.0;  // chi^2(P1, P~1)
  double e0 = ratio(0, 1, 3) - 1.0;    // E_{P0}[P1/P~1] - 1
  double e1 = ratio(1, 0, 2) - 1.0;    // E_{P1}[P0/P~0] - 1
  return {std::max(chi0, e0), std::max(chi1, e1)};
}

}  // namespace hsseg::divergence
