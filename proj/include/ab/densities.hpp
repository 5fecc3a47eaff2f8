#pragma once

#include <functional>

#include "ab/rng.hpp"
#include "ab/tensor.hpp"

namespace ab {

// Diagonal Gaussian; isotropic when all variances are equal.
struct Gaussian {
  Vec mean;
  Vec var;  // per-dimension, > 0

  static Gaussian isotropic(const Vec& mean, double var);
  static Gaussian standard(Index dim);
  Index dim() const { return mean.size(); }
};

// Mixture of isotropic Gaussians sharing a dimension.
struct GaussianMixture {
  Vec weights;  // sum to 1 within 1e-12, each >= 0
  Mat means;    // K x d
  Vec vars;     // K, isotropic per component

  Index dim() const { return means.cols(); }
  Index components() const { return weights.size(); }
  void validate() const;

  // 5x5 grid with the given spacing, equal weights
  static GaussianMixture grid25(double spacing, double component_var);
};

double logpdf(const Gaussian& d, const Vec& x);
double logpdf(const GaussianMixture& d, const Vec& x);
Vec logpdf_rows(const Gaussian& d, const Mat& x);         // one value per row
Vec logpdf_rows(const GaussianMixture& d, const Mat& x);

Mat sample(const Gaussian& d, Index n, Rng& rng);
Mat sample(const GaussianMixture& d, Index n, Rng& rng);

// closed-form KL(p || q) for diagonal Gaussians
double kl_gaussian(const Gaussian& p, const Gaussian& q);

// closed-form D_alpha[p || q] = (1 - integral p^a q^(1-a)) / (a (1-a))
// via the Gaussian exponential-family integral, alpha in (0,1)
double alpha_div_gaussian(const Gaussian& p, const Gaussian& q, double alpha);

// uniform grid for 1-D trapezoid quadrature
struct QuadGrid {
  double lo = 0.0, hi = 0.0;
  Index n = 0;  // number of points, >= 3 and odd so the grid halves cleanly
  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
};

// grid covering >= 8 sigma of two 1-D Gaussians
QuadGrid grid_for(const Gaussian& p, const Gaussian& q, Index n = (1 << 15) + 1);

using LogDensity1d = std::function<double(double)>;

// trapezoid quadrature of the alpha-divergence between 1-D densities; the
// independent oracle behind every derived divergence value. Throws if the
// estimate moves more than 1e-8 when the grid is halved.
double alpha_div_quadrature(const LogDensity1d& logp, const LogDensity1d& logq, double alpha,
                            const QuadGrid& grid);

// f*(x) = log q(x) - log p(x), the optimal discriminator of the ratio game
double optimal_log_ratio(const Gaussian& q, const Gaussian& p, const Vec& x);

// d/d(mu,sigma) of D_alpha[N(mu,sigma^2) || q] by quadrature of the exact
// integrand; oracle for the twin-gradient estimators
struct AlphaGradOracle {
  double d_mu = 0.0;
  double d_sigma = 0.0;
};
AlphaGradOracle alpha_div_grad_quadrature(double mu, double sigma, const Gaussian& q,
                                          double alpha, const QuadGrid& grid);

}  // namespace ab
