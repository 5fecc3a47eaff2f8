#include "ab/densities.hpp"

#include <cmath>

namespace ab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

Gaussian Gaussian::isotropic(const Vec& mean, double var) {
  Gaussian g;
  g.mean = mean;
  g.var = Vec::Constant(mean.size(), var);
  return g;
}

Gaussian Gaussian::standard(Index dim) { return isotropic(Vec::Zero(dim), 1.0); }

void GaussianMixture::validate() const {
  if (components() < 1) throw Error("mixture needs >= 1 component");
  if (means.rows() != components() || vars.size() != components())
    throw Error("mixture: inconsistent component counts");
  if ((weights.array() < 0.0).any()) throw Error("mixture: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw Error("mixture: weights not normalized");
  if ((vars.array() <= 0.0).any()) throw Error("mixture: nonpositive variance");
}

GaussianMixture GaussianMixture::grid25(double spacing, double component_var) {
  GaussianMixture m;
  m.weights = Vec::Constant(25, 1.0 / 25.0);
  m.means.resize(25, 2);
  for (int i = 0; i < 25; ++i) {
    m.means(i, 0) = (i % 5 - 2) * spacing;
    m.means(i, 1) = (i / 5 - 2) * spacing;
  }
  m.vars = Vec::Constant(25, component_var);
  return m;
}

double logpdf(const Gaussian& d, const Vec& x) {
  if (x.size() != d.dim()) throw Error("logpdf: dimension mismatch");
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double r = x(i) - d.mean(i);
    acc += -0.5 * (r * r / d.var(i) + std::log(d.var(i)) + kLog2Pi);
  }
  return acc;
}

double logpdf(const GaussianMixture& d, const Vec& x) {
  if (x.size() != d.dim()) throw Error("logpdf: dimension mismatch");
  const Index k = d.components();
  Vec terms(k);
  for (Index c = 0; c < k; ++c) {
    const double sq = (x - d.means.row(c).transpose()).squaredNorm();
    terms(c) = std::log(d.weights(c)) - 0.5 * (sq / d.vars(c) +
               static_cast<double>(d.dim()) * (std::log(d.vars(c)) + kLog2Pi));
  }
  const double m = terms.maxCoeff();
  return m + std::log((terms.array() - m).exp().sum());
}

Vec logpdf_rows(const Gaussian& d, const Mat& x) {
  if (x.cols() != d.dim()) throw Error("logpdf_rows: dimension mismatch");
  Vec out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = logpdf(d, x.row(i).transpose());
  return out;
}

Vec logpdf_rows(const GaussianMixture& d, const Mat& x) {
  if (x.cols() != d.dim()) throw Error("logpdf_rows: dimension mismatch");
  Vec out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = logpdf(d, x.row(i).transpose());
  return out;
}

Mat sample(const Gaussian& d, Index n, Rng& rng) {
  if (n < 1) throw Error("sample: n must be >= 1");
  Mat out(n, d.dim());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d.dim(); ++j)
      out(i, j) = d.mean(j) + std::sqrt(d.var(j)) * rng.normal();
  return out;
}

Mat sample(const GaussianMixture& d, Index n, Rng& rng) {
  if (n < 1) throw Error("sample: n must be >= 1");
  Mat out(n, d.dim());
  for (Index i = 0; i < n; ++i) {
    const int k = rng.categorical(d.weights);
    const double sd = std::sqrt(d.vars(k));
    for (Index j = 0; j < d.dim(); ++j) out(i, j) = d.means(k, j) + sd * rng.normal();
  }
  return out;
}

double kl_gaussian(const Gaussian& p, const Gaussian& q) {
  if (p.dim() != q.dim()) throw Error("kl_gaussian: dimension mismatch");
  double acc = 0.0;
  for (Index i = 0; i < p.dim(); ++i) {
    const double dm = p.mean(i) - q.mean(i);
    acc += 0.5 * (p.var(i) / q.var(i) + dm * dm / q.var(i) - 1.0 +
                  std::log(q.var(i) / p.var(i)));
  }
  return acc;
}

double alpha_div_gaussian(const Gaussian& p, const Gaussian& q, double alpha) {
  if (p.dim() != q.dim()) throw Error("alpha_div_gaussian: dimension mismatch");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha_div_gaussian: alpha outside (0,1)");
  // log integral p^a q^(1-a) factorizes over dimensions
  double log_int = 0.0;
  for (Index i = 0; i < p.dim(); ++i) {
    const double a = alpha / p.var(i);
    const double b = (1.0 - alpha) / q.var(i);
    const double blend = a + b;
    if (!(blend > 0.0)) throw Error("alpha_div_gaussian: non-integrable blend");
    const double dm = p.mean(i) - q.mean(i);
    log_int += -0.5 * (alpha * std::log(p.var(i)) + (1.0 - alpha) * std::log(q.var(i)) +
                       std::log(blend)) -
               a * b * dm * dm / (2.0 * blend);
  }
  return (1.0 - std::exp(log_int)) / (alpha * (1.0 - alpha));
}

QuadGrid grid_for(const Gaussian& p, const Gaussian& q, Index n) {
  if (p.dim() != 1 || q.dim() != 1) throw Error("grid_for: 1-D densities only");
  const double sp = std::sqrt(p.var(0)), sq = std::sqrt(q.var(0));
  QuadGrid g;
  g.lo = std::min(p.mean(0) - 8.0 * sp, q.mean(0) - 8.0 * sq);
  g.hi = std::max(p.mean(0) + 8.0 * sp, q.mean(0) + 8.0 * sq);
  g.n = n;
  return g;
}

namespace {

// trapezoid over every `stride`-th grid point
double trapezoid(const Vec& f, double h, Index stride) {
  double acc = 0.0;
  Index count = 0;
  for (Index i = 0; i < f.size(); i += stride) {
    acc += f(i);
    ++count;
  }
  acc -= 0.5 * (f(0) + f(f.size() - 1));
  (void)count;
  return acc * h * static_cast<double>(stride);
}

}  // namespace

double alpha_div_quadrature(const LogDensity1d& logp, const LogDensity1d& logq, double alpha,
                            const QuadGrid& grid) {
  if (grid.n < 5 || grid.n % 2 == 0) throw Error("alpha_div_quadrature: grid.n must be odd >= 5");
  const double h = grid.step();
  Vec f(grid.n);
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.lo + h * static_cast<double>(i);
    f(i) = std::exp(alpha * logp(x) + (1.0 - alpha) * logq(x));
  }
  const double full = trapezoid(f, h, 1);
  const double half = trapezoid(f, h, 2);
  const double scale = alpha * (1.0 - alpha);
  if (std::abs(full - half) / scale > 1e-8)
    throw Error("alpha_div_quadrature: grid too coarse");
  return (1.0 - full) / scale;
}

double optimal_log_ratio(const Gaussian& q, const Gaussian& p, const Vec& x) {
  return logpdf(q, x) - logpdf(p, x);
}

AlphaGradOracle alpha_div_grad_quadrature(double mu, double sigma, const Gaussian& q,
                                          double alpha, const QuadGrid& grid) {
  // d/dtheta D_alpha = -1/(1-alpha) * integral p^a q^(1-a) dlogp/dtheta
  const double h = grid.step();
  Gaussian p = Gaussian::isotropic(Vec::Constant(1, mu), sigma * sigma);
  Vec fmu(grid.n), fsig(grid.n);
  for (Index i = 0; i < grid.n; ++i) {
    const double x = grid.lo + h * static_cast<double>(i);
    const Vec xv = Vec::Constant(1, x);
    const double w = std::exp(alpha * logpdf(p, xv) + (1.0 - alpha) * logpdf(q, xv));
    const double r = x - mu;
    fmu(i) = w * r / (sigma * sigma);
    fsig(i) = w * (r * r - sigma * sigma) / (sigma * sigma * sigma);
  }
  AlphaGradOracle out;
  out.d_mu = -trapezoid(fmu, h, 1) / (1.0 - alpha);
  out.d_sigma = -trapezoid(fsig, h, 1) / (1.0 - alpha);
  return out;
}

}  // namespace ab
