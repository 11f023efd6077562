#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hypwalk/measures.hpp"
#include "hypwalk/metric_boundary.hpp"
#include "hypwalk/rational.hpp"
#include "hypwalk/walk_engine.hpp"

namespace hypwalk {

// Scalar abstraction for the two computation modes: exact values in the
// quadratic ring Q(sqrt(2k-1)), or plain doubles for Monte Carlo.
template <typename S>
struct RepScalar;

template <>
struct RepScalar<QuadExt> {
  static QuadExt from_rational(const Rational& r) { return QuadExt(r); }
  // (2k-1)^(e2/2)
  static QuadExt q_half_power(int q, long e2) { return half_power(q, e2); }
  static double to_num(const QuadExt& v) { return v.value(); }
};

template <>
struct RepScalar<double> {
  static double from_rational(const Rational& r) { return to_double(r); }
  static double q_half_power(int q, long e2) {
    return std::pow(static_cast<double>(q), static_cast<double>(e2) / 2.0);
  }
  static double to_num(double v) { return v; }
};

template <>
struct RepScalar<Rational> {
  static Rational from_rational(const Rational& r) { return r; }
  static double to_num(const Rational& v) { return to_double(v); }
};

// Boundary function constant on each depth-m cylinder. The exact-arithmetic
// test-function algebra on which the representation acts.
template <typename S>
struct StepFn {
  int rank = 2;
  int depth = 0;
  std::vector<S> values;

  static StepFn constant(int rank, S v) {
    StepFn f;
    f.rank = rank;
    f.values.assign(1, std::move(v));
    return f;
  }
  static StepFn one(int rank) { return constant(rank, RepScalar<S>::from_rational(Rational(1))); }
  // Indicator of the cylinder C(w).
  static StepFn indicator(int rank, const ReducedWord& w) {
    StepFn f;
    f.rank = rank;
    f.depth = w.length();
    f.values.assign(static_cast<size_t>(cylinder_count(rank, f.depth)),
                    RepScalar<S>::from_rational(Rational(0)));
    f.values[static_cast<size_t>(cylinder_index(rank, w))] =
        RepScalar<S>::from_rational(Rational(1));
    return f;
  }

  long long cells() const { return cylinder_count(rank, depth); }

  // Value on C(prefix_depth(w)); w must resolve the cylinder.
  S value_at(const ReducedWord& w) const {
    if (w.length() < depth)
      throw Error(Errc::depth_too_shallow, "word shorter than the step function depth");
    if (depth == 0) return values[0];
    return values[static_cast<size_t>(cylinder_index(rank, w.prefix(depth)))];
  }
  S value_at_point(const BoundaryPoint& xi) const {
    if (depth == 0) return values[0];
    return values[static_cast<size_t>(cylinder_index(rank, xi.prefix(depth)))];
  }
  // Value looked up from a cylinder index living at a refinement depth.
  S at_refined(int big_depth, long long idx) const {
    if (depth == 0) return values[0];
    long long div = 1;
    for (int i = depth; i < big_depth; ++i) div *= 2 * rank - 1;
    return values[static_cast<size_t>(idx / div)];
  }

  StepFn refine(int new_depth) const {
    if (new_depth < depth)
      throw Error(Errc::bad_parameter, "cannot coarsen a step function");
    StepFn f;
    f.rank = rank;
    f.depth = new_depth;
    f.values.resize(static_cast<size_t>(cylinder_count(rank, new_depth)));
    for (long long i = 0; i < static_cast<long long>(f.values.size()); ++i)
      f.values[static_cast<size_t>(i)] = at_refined(new_depth, i);
    return f;
  }

  friend bool operator==(const StepFn& x, const StepFn& y) {
    int m = std::max(x.depth, y.depth);
    return x.refine(m).values == y.refine(m).values;
  }
};

using StepFnX = StepFn<QuadExt>;   // exact mode
using StepFnD = StepFn<double>;    // floating mode
using StepFnQ = StepFn<Rational>;  // rational-only mode (Markov operator)

// Integral against the hitting measure of the uniform walk.
template <typename S>
S integral(const StepFn<S>& phi) {
  MarkovMeasure nu{phi.rank};
  S acc{};
  for (const auto& v : phi.values) acc += v;
  return acc * RepScalar<S>::from_rational(nu.cylinder_mass_at_depth(phi.depth));
}

template <typename S>
S inner(const StepFn<S>& phi, const StepFn<S>& psi) {
  int m = std::max(phi.depth, psi.depth);
  MarkovMeasure nu{phi.rank};
  S mass = RepScalar<S>::from_rational(nu.cylinder_mass_at_depth(m));
  S acc{};
  for (long long i = 0; i < cylinder_count(phi.rank, m); ++i)
    acc += phi.at_refined(m, i) * psi.at_refined(m, i);
  return acc * mass;
}

template <typename S>
double linf_norm(const StepFn<S>& phi) {
  double best = 0;
  for (const auto& v : phi.values) best = std::max(best, std::fabs(RepScalar<S>::to_num(v)));
  return best;
}

// Radon-Nikodym derivative r(g, .) = d(g^{-1})_* nu / d nu, constant on
// cylinders of depth >= |g| + 1: (2k-1)^{beta_xi(g^{-1} o)}, exact.
Rational rn_derivative(int rank, const ReducedWord& g, const Cylinder& c);

// pi(g) phi (xi) = sqrt(r(g^{-1}, xi)) phi(g^{-1} xi); output depth
// phi.depth + |g|.
template <typename S>
StepFn<S> pi_action(const ReducedWord& g, const StepFn<S>& phi) {
  StepFn<S> out;
  out.rank = phi.rank;
  out.depth = phi.depth + g.length();
  out.values.resize(static_cast<size_t>(cylinder_count(phi.rank, out.depth)));
  const ReducedWord gi = invert(g);
  const int q = 2 * phi.rank - 1;
  for_each_cylinder(phi.rank, out.depth, [&](const ReducedWord& w, long long idx) {
    int cp = common_prefix_length(w, g);
    S factor = RepScalar<S>::q_half_power(q, 2 * cp - g.length());
    out.values[static_cast<size_t>(idx)] = factor * phi.value_at(multiply(gi, w));
  });
  return out;
}

// <pi(g) phi, psi>, by exact annulus decomposition adapted to the geodesic
// [o, g]; cost O(|g| (2k-1)^{max depth}).
template <typename S>
S coef_pi(const ReducedWord& g, const StepFn<S>& phi, const StepFn<S>& psi);

// Harish-Chandra function: Xi(g) = <pi(g) 1, 1>, an exact annulus sum. For
// the hitting measure of the uniform walk it depends only on |g|.
QuadExt harish_chandra(int rank, const ReducedWord& g);
QuadExt harish_chandra_length(int rank, int len);

struct HarishChandraBand {
  double c_low = 0.0;
  double c_high = 0.0;
  bool decreasing = true;  // Xi monotone decreasing in |g|
};
// Envelope of Xi(g) / [(1+|g|) q^{-|g|/2}] over |g| <= radius.
HarishChandraBand harish_chandra_asymptotics(int rank, int radius);

// Dirac approximant u_g = sqrt(r(g^{-1}, .)) / Xi(g) as a step function of
// the given depth (>= |g| + 1). Integrates to 1 exactly.
StepFnX u_density(int rank, const ReducedWord& g, int depth);

// int_C(w) u_g dnu, exact, O(|g|) per call.
QuadExt cylinder_u_integral(int rank, const ReducedWord& g, const ReducedWord& w);
double cylinder_u_integral_d(int rank, const ReducedWord& g, const ReducedWord& w);

// Exact Lipschitz constant of a step function for the visual metric
// e^{-eps (.|.)}: max over cylinder pairs of |gap| e^{eps cp}.
template <typename S>
double lipschitz_const(const StepFn<S>& phi, const VisualParams& p);

// Boundary function of two variables, constant on products of depth-m
// cylinders; the l1-product visual distance is used for its Lipschitz norm.
template <typename S>
struct TwoVarStepFn {
  int rank = 2;
  int depth = 0;
  std::vector<S> values;  // row-major over (cyl, cyl)

  long long cells() const { return cylinder_count(rank, depth); }
  S& at(long long i, long long j) { return values[static_cast<size_t>(i * cells() + j)]; }
  const S& at(long long i, long long j) const {
    return values[static_cast<size_t>(i * cells() + j)];
  }
  static TwoVarStepFn product(const StepFn<S>& phi, const StepFn<S>& psi) {
    int m = std::max(phi.depth, psi.depth);
    TwoVarStepFn f;
    f.rank = phi.rank;
    f.depth = m;
    long long n = f.cells();
    f.values.resize(static_cast<size_t>(n * n));
    for (long long i = 0; i < n; ++i)
      for (long long j = 0; j < n; ++j) f.at(i, j) = phi.at_refined(m, i) * psi.at_refined(m, j);
    return f;
  }
  static TwoVarStepFn constant(int rank, S v) {
    TwoVarStepFn f;
    f.rank = rank;
    f.values.assign(1, std::move(v));
    return f;
  }
};

struct L2ProximalResult {
  double gap = 0.0;        // |<Psi, u_g x u_{g^-1}> - Psi(g^, g~)|
  double bound = 0.0;      // 2 lambda(Psi) / (1 + |g|)^{1/D}
  double bound_ratio = 0.0;
  double lipschitz = 0.0;
};
L2ProximalResult l2proximal_gap(const VisualParams& p, const ReducedWord& g,
                                const TwoVarStepFn<QuadExt>& psi);

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long long samples = 0;
};

// <P_n phi, psi> with P_n = E[pi(X_n)/Xi(X_n)]: exact sum over the support of
// mu^{*n}, or a Monte Carlo average over sampled walks.
QuadExt pn_coefficient_exact(const WalkMeasure& mu, int n, const StepFnX& phi, const StepFnX& psi,
                             long long cap = kDefaultEnumerationCap);
McEstimate pn_coefficient_mc(const WalkMeasure& mu, int n, const StepFnD& phi, const StepFnD& psi,
                             long long samples, Seed seed);

// ||P_n 1||_inf over the depth-(n max_step + 1) cylinder partition, exact.
Rational pn_one_sup_exact(const WalkMeasure& mu, int n, long long cap = kDefaultEnumerationCap);
// Monte Carlo lower envelope: max over the depth-`probe_depth` cylinders of
// the estimated nu-average of P_n 1 on the cylinder.
struct PnOneSupMc {
  double value = 0.0;
  double max_stderr = 0.0;
};
PnOneSupMc pn_one_sup_mc(const WalkMeasure& mu, int n, long long samples, int probe_depth,
                         Seed seed);

// E | w(X_n^) ( <pi~(X_n) phi, psi> - phi(X_n^-1^) psi(X_n^) ) | -> 0.
McEstimate coef_reduction_gap(const WalkMeasure& mu, int n, const StepFnD& w, const StepFnD& phi,
                              const StepFnD& psi, long long samples, Seed seed);

struct CyclicityResult {
  double raw_residual = 0.0;    // spectral pseudo-inverse solve
  double ridge_residual = 0.0;  // ridge 1e-12 when cond > 1e12
  double condition = 0.0;
  bool ridge_used = false;
  double target_norm = 0.0;
};
// L2 distance from `target` to span{pi(g) 1 : |g| <= radius}, via least
// squares on the exact Gram matrix G_{gh} = Xi(h^{-1} g).
CyclicityResult cyclicity_residual(const StepFnX& target, int radius,
                                   long long cap = kDefaultEnumerationCap);

// Markov operator P_mu phi (xi) = sum_g mu(g) phi(g xi); exact on rational
// step functions, output depth phi.depth + max_step.
template <typename S>
StepFn<S> markov_operator(const WalkMeasure& mu, const StepFn<S>& phi) {
  StepFn<S> out;
  out.rank = phi.rank;
  out.depth = phi.depth + mu.max_step;
  out.values.resize(static_cast<size_t>(cylinder_count(phi.rank, out.depth)));
  for_each_cylinder(phi.rank, out.depth, [&](const ReducedWord& w, long long idx) {
    S acc{};
    for (size_t i = 0; i < mu.support.size(); ++i)
      acc += RepScalar<S>::from_rational(mu.weight[i]) *
             phi.value_at(multiply(mu.support[i], w));
    out.values[static_cast<size_t>(idx)] = acc;
  });
  return out;
}

}  // namespace hypwalk
