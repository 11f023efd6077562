#pragma once

#include <vector>

#include "hypwalk/boundary_rep.hpp"
#include "hypwalk/metric_boundary.hpp"
#include "hypwalk/walk_engine.hpp"

namespace hypwalk {

// Monte Carlo estimate of E[phi(X_n xi) psi(X_n^{-1} eta)]. The group action
// on eventually periodic boundary points is exact, so the only error is
// statistical.
McEstimate equidist_estimate(const WalkMeasure& mu, int n, const StepFnD& phi, const StepFnD& psi,
                             const BoundaryPoint& xi, const BoundaryPoint& eta, long long samples,
                             Seed seed);

struct EquidistRow {
  int n = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};
std::vector<EquidistRow> equidist_curve(const WalkMeasure& mu, const std::vector<int>& ns,
                                        const StepFnD& phi, const StepFnD& psi,
                                        const BoundaryPoint& xi, const BoundaryPoint& eta,
                                        long long samples, Seed seed);

struct RetractionInvarianceResult {
  double value_linear = 0.0;   // E phi(retract(X_n))
  double value_alt = 0.0;      // E phi(retract_alt(X_n))
  double gap = 0.0;            // |difference|, paired over the same walks
  double stderr_ = 0.0;        // standard error of the paired difference
  double short_fraction = 0.0; // P(|X_n| < phi.depth), where retractions may differ
};
RetractionInvarianceResult retraction_invariance_check(const WalkMeasure& mu, int n,
                                                       const StepFnD& phi, long long samples,
                                                       Seed seed);

}  // namespace hypwalk
