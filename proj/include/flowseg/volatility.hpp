#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "flowseg/error.hpp"

namespace flowseg {

// GARCH(1,1) with a constant mean:
//   x_t = mu + eps_t,   sigma2_t = omega + alpha*eps_{t-1}^2 + beta_g*sigma2_{t-1}
// beta_g is named to avoid clashing with the changepoint penalty beta.
struct GarchParams {
  double omega = 0.0;
  double alpha = 0.0;
  double beta_g = 0.0;
  double mu = 0.0;

  void validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw config_error("omega must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw config_error("alpha must be >= 0");
    if (!(beta_g >= 0.0) || !std::isfinite(beta_g)) throw config_error("beta_g must be >= 0");
    if (!(alpha + beta_g < 1.0)) throw config_error("alpha + beta_g must be < 1");
    if (!std::isfinite(mu)) throw config_error("mu must be finite");
  }

  double unconditional_variance() const { return omega / (1.0 - alpha - beta_g); }
};

namespace detail {

inline double mle_variance(const std::vector<double>& eps) {
  double s = 0.0;
  for (double e : eps) s += e * e;
  return s / static_cast<double>(eps.size());
}

}  // namespace detail

// Conditional variances. sigma2_1 is initialized at the MLE sample variance
// of the demeaned series, so the recursion is exactly reproducible.
inline std::vector<double> garch_filter(const std::vector<double>& x,
                                        const GarchParams& p) {
  p.validate();
  if (x.size() < 2) throw data_error("garch_filter needs at least two observations");
  std::vector<double> eps(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw data_error("garch_filter: non-finite value");
    eps[i] = x[i] - p.mu;
  }
  std::vector<double> sigma2(x.size());
  sigma2[0] = detail::mle_variance(eps);
  if (!(sigma2[0] > 0.0)) throw data_error("garch_filter: zero-variance series");
  for (std::size_t t = 1; t < x.size(); ++t) {
    sigma2[t] = p.omega + p.alpha * eps[t - 1] * eps[t - 1] + p.beta_g * sigma2[t - 1];
  }
  return sigma2;
}

// Gaussian log-likelihood sum_t -1/2 (log 2pi + log sigma2_t + eps_t^2/sigma2_t).
inline double garch_loglik(const std::vector<double>& x, const GarchParams& p) {
  const std::vector<double> sigma2 = garch_filter(x, p);
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  double ll = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double e = x[t] - p.mu;
    ll += -0.5 * (kLog2Pi + std::log(sigma2[t]) + e * e / sigma2[t]);
  }
  return ll;
}

namespace detail {

// Deterministic Nelder-Mead on (alpha, beta_g); omega follows by variance
// targeting inside the objective. Small and self-contained; good enough for
// a 2-parameter likelihood surface.
template <typename F>
std::array<double, 2> nelder_mead_2d(F f, std::array<double, 2> start, double step,
                                     int max_iter = 400) {
  using P = std::array<double, 2>;
  std::array<P, 3> smplx = {start, P{start[0] + step, start[1]}, P{start[0], start[1] + step}};
  std::array<double, 3> val = {f(smplx[0]), f(smplx[1]), f(smplx[2])};
  auto order = [&] {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2 - i; ++j)
        if (val[j + 1] < val[j]) {
          std::swap(val[j], val[j + 1]);
          std::swap(smplx[j], smplx[j + 1]);
        }
  };
  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::abs(val[2] - val[0]) < 1e-12) break;
    const P mid = {(smplx[0][0] + smplx[1][0]) / 2.0, (smplx[0][1] + smplx[1][1]) / 2.0};
    auto blend = [&](double c) {
      return P{mid[0] + c * (mid[0] - smplx[2][0]), mid[1] + c * (mid[1] - smplx[2][1])};
    };
    const P refl = blend(1.0);
    const double fr = f(refl);
    if (fr < val[0]) {
      const P exp_pt = blend(2.0);
      const double fe = f(exp_pt);
      if (fe < fr) {
        smplx[2] = exp_pt;
        val[2] = fe;
      } else {
        smplx[2] = refl;
        val[2] = fr;
      }
    } else if (fr < val[1]) {
      smplx[2] = refl;
      val[2] = fr;
    } else {
      const P con = blend(-0.5);
      const double fc = f(con);
      if (fc < val[2]) {
        smplx[2] = con;
        val[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          smplx[i] = {(smplx[i][0] + smplx[0][0]) / 2.0, (smplx[i][1] + smplx[0][1]) / 2.0};
          val[i] = f(smplx[i]);
        }
      }
    }
  }
  order();
  return smplx[0];
}

}  // namespace detail

// Maximum-likelihood fit. mu is fixed at the sample mean; omega is tied to
// (alpha, beta_g) by variance targeting omega = var * (1 - alpha - beta_g);
// the best point of a coarse grid over (alpha, beta_g) seeds a simplex
// refinement. Fully deterministic for fixed input.
inline GarchParams garch_fit(const std::vector<double>& x) {
  if (x.size() < 50) throw data_error("garch_fit needs at least 50 observations");
  double mean = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw data_error("garch_fit: non-finite value");
    mean += v;
  }
  mean /= static_cast<double>(x.size());
  std::vector<double> eps(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) eps[i] = x[i] - mean;
  const double sample_var = detail::mle_variance(eps);
  if (!(sample_var > 0.0)) throw fit_error("garch_fit: zero-variance series");

  auto objective = [&](std::array<double, 2> ab) {
    const double a = ab[0], b = ab[1];
    if (a < 0.0 || b < 0.0 || a + b > 0.999) {
      return std::numeric_limits<double>::infinity();
    }
    GarchParams p{sample_var * (1.0 - a - b), a, b, mean};
    const double ll = garch_loglik(x, p);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };

  double best = std::numeric_limits<double>::infinity();
  std::array<double, 2> best_ab = {0.05, 0.05};
  bool any = false;
  for (double a = 0.05; a <= 0.901; a += 0.05) {
    for (double b = 0.05; b <= 0.901; b += 0.05) {
      if (a + b > 0.98) continue;
      const double v = objective({a, b});
      if (std::isfinite(v) && v < best) {
        best = v;
        best_ab = {a, b};
        any = true;
      }
    }
  }
  if (!any) throw fit_error("garch_fit: no admissible start point");

  const std::array<double, 2> ab = detail::nelder_mead_2d(objective, best_ab, 0.02);
  const double refined = objective(ab);
  const std::array<double, 2> final_ab = refined <= best ? ab : best_ab;
  GarchParams p{sample_var * (1.0 - final_ab[0] - final_ab[1]), final_ab[0],
                final_ab[1], mean};
  p.validate();
  return p;
}

}  // namespace flowseg
