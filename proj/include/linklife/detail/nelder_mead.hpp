#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace linklife::detail {

struct SimplexResult {
  std::vector<double> x;
  double fmin = 0.0;
  bool converged = false;
  int evaluations = 0;
};

// Derivative-free Nelder-Mead with standard reflection/expansion/contraction
// coefficients. Terminates when the simplex function spread falls below
// ftol_abs + ftol_rel * |f_best|.
inline SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const std::vector<double>& step,
    double ftol_abs = 1e-9, double ftol_rel = 1e-10, int max_iter = 2000) {
  const std::size_t dim = x0.size();
  const std::size_t m = dim + 1;

  std::vector<std::vector<double>> pts(m, x0);
  for (std::size_t j = 0; j < dim; ++j) {
    pts[j + 1][j] += (step[j] != 0.0 ? step[j] : 1e-4);
  }

  SimplexResult res;
  std::vector<double> fv(m);
  for (std::size_t i = 0; i < m; ++i) {
    fv[i] = f(pts[i]);
    ++res.evaluations;
  }

  std::vector<std::size_t> order(m);
  auto resort = [&] {
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
  for (int iter = 0; iter < max_iter; ++iter) {
    resort();
    const std::size_t best = order[0];
    const std::size_t worst = order[m - 1];
    const std::size_t second_worst = order[m - 2];

    const double spread = fv[worst] - fv[best];
    if (spread <= ftol_abs + ftol_rel * std::abs(fv[best])) {
      res.x = pts[best];
      res.fmin = fv[best];
      res.converged = true;
      return res;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
    }
    for (std::size_t j = 0; j < dim; ++j) centroid[j] /= static_cast<double>(dim);

    for (std::size_t j = 0; j < dim; ++j) {
      xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
    }
    const double fr = f(xr);
    ++res.evaluations;

    if (fr < fv[best]) {
      for (std::size_t j = 0; j < dim; ++j) {
        xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
      }
      const double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      const std::vector<double>& base = outside ? xr : pts[worst];
      for (std::size_t j = 0; j < dim; ++j) {
        xc[j] = centroid[j] + 0.5 * (base[j] - centroid[j]);
      }
      const double fc = f(xc);
      ++res.evaluations;
      if (fc < (outside ? fr : fv[worst])) {
        pts[worst] = xc;
        fv[worst] = fc;
      } else {
        // shrink toward best
        for (std::size_t i = 0; i < m; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < dim; ++j) {
            pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
          }
          fv[i] = f(pts[i]);
          ++res.evaluations;
        }
      }
    }
  }

  resort();
  res.x = pts[order[0]];
  res.fmin = fv[order[0]];
  res.converged = false;
  return res;
}

// One tightening restart from the found minimum escapes collapsed simplexes.
inline SimplexResult nelder_mead_restarted(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, std::vector<double> step,
    double ftol_abs = 1e-9, double ftol_rel = 1e-10, int max_iter = 2000) {
  SimplexResult first = nelder_mead(f, x0, step, ftol_abs, ftol_rel, max_iter);
  for (double& s : step) s *= 0.1;
  SimplexResult second =
      nelder_mead(f, first.x, step, ftol_abs, ftol_rel, max_iter);
  second.evaluations += first.evaluations;
  if (second.fmin > first.fmin) {
    second.x = first.x;
    second.fmin = first.fmin;
  }
  second.converged = first.converged && second.converged;
  return second;
}

}  // namespace linklife::detail
