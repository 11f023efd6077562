#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hypwalk {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
};

// Weighted least squares y = a*x + b, weights = 1/sigma^2. Unweighted when
// sigmas is empty. Standard errors come from the weight matrix (known-sigma
// form) for WLS and from the residual variance for OLS.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& sigma = {}) {
  size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
  std::vector<double> w(n, 1.0);
  if (!sigma.empty()) {
    for (size_t i = 0; i < n; ++i) w[i] = 1.0 / (sigma[i] * sigma[i]);
  }
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  double det = sw * swxx - swx * swx;
  if (det == 0) throw std::invalid_argument("fit_line: degenerate design");
  LineFit f;
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swxx * swy - swx * swxy) / det;
  if (!sigma.empty()) {
    f.slope_se = std::sqrt(sw / det);
    f.intercept_se = std::sqrt(swxx / det);
  } else if (n > 2) {
    double rss = 0;
    for (size_t i = 0; i < n; ++i) {
      double r = y[i] - f.slope * x[i] - f.intercept;
      rss += r * r;
    }
    double s2 = rss / static_cast<double>(n - 2);
    f.slope_se = std::sqrt(s2 * sw / det);
    f.intercept_se = std::sqrt(s2 * swxx / det);
  }
  return f;
}

// Least squares for y = c0*x0 + c1*x1 + c2*x2 via 3x3 normal equations.
inline std::vector<double> fit_3param(const std::vector<std::vector<double>>& cols,
                                      const std::vector<double>& y) {
  if (cols.size() != 3) throw std::invalid_argument("fit_3param: need 3 columns");
  size_t n = y.size();
  double A[3][3] = {};
  double b[3] = {};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      for (size_t t = 0; t < n; ++t) A[i][j] += cols[i][t] * cols[j][t];
    for (size_t t = 0; t < n; ++t) b[i] += cols[i][t] * y[t];
  }
  // Gaussian elimination with partial pivoting on the 3x3 system.
  int idx[3] = {0, 1, 2};
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::fabs(A[idx[r]][c]) > std::fabs(A[idx[p]][c])) p = r;
    std::swap(idx[c], idx[p]);
    double piv = A[idx[c]][c];
    if (piv == 0) throw std::invalid_argument("fit_3param: singular normal equations");
    for (int r = c + 1; r < 3; ++r) {
      double f = A[idx[r]][c] / piv;
      for (int cc = c; cc < 3; ++cc) A[idx[r]][cc] -= f * A[idx[c]][cc];
      b[idx[r]] -= f * b[idx[c]];
    }
  }
  std::vector<double> out(3);
  for (int c = 2; c >= 0; --c) {
    double s = b[idx[c]];
    for (int cc = c + 1; cc < 3; ++cc) s -= A[idx[c]][cc] * out[cc];
    out[c] = s / A[idx[c]][c];
  }
  return out;
}

}  // namespace hypwalk
