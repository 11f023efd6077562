#pragma once

#include <vector>

#include "hypwalk/metric_boundary.hpp"
#include "hypwalk/rational.hpp"
#include "hypwalk/walk_engine.hpp"

namespace hypwalk {

// Dense assignment of masses to the depth-m cylinders, exact (Rational) or
// empirical (double). Masses of shallower cylinders aggregate by refinement
// consistency.
template <typename T>
struct MeasureTable {
  int rank = 2;
  int depth = 0;
  std::vector<T> mass;  // indexed by cylinder_index at `depth`

  // Empirical metadata; empty/zero for exact tables.
  std::vector<double> stderrs;
  long long samples = 0;
  long long nonconverged = 0;

  T total() const {
    T s{};
    for (const auto& m : mass) s += m;
    return s;
  }

  // nu(C(w)) for |w| <= depth.
  T cylinder_mass(const ReducedWord& w) const {
    if (w.length() > depth)
      throw Error(Errc::depth_too_shallow, "cylinder deeper than the table resolution");
    if (w.length() == 0) return total();
    long long lo = cylinder_index(rank, w);
    long long width = 1;
    for (int i = w.length(); i < depth; ++i) width *= 2 * rank - 1;
    T s{};
    for (long long j = lo * width; j < (lo + 1) * width; ++j) s += mass[static_cast<size_t>(j)];
    return s;
  }

  int max_depth() const { return depth; }
};

using ExactTable = MeasureTable<Rational>;
using EmpiricalTable = MeasureTable<double>;

// The hitting measure of the uniform generator walk, in closed form:
// nu(C(w)) = (1/2k)(1/(2k-1))^{|w|-1}. Lazy, valid at every depth.
struct MarkovMeasure {
  int rank = 2;

  Rational cylinder_mass(const ReducedWord& w) const {
    if (w.length() == 0) return Rational(1);
    return Rational(1, 2 * rank) * pow_rational(2 * rank - 1, -(w.length() - 1));
  }
  int max_depth() const { return 1 << 20; }
  // Mass of the annulus {xi : (xi|g) = j} for any |g| = len >= 1.
  Rational annulus_mass(int len, int j) const {
    if (j == 0) return Rational(2 * rank - 1, 2 * rank);
    if (j >= len) return cylinder_mass_at_depth(len);
    return Rational(rank - 1, rank) * pow_rational(2 * rank - 1, -j);
  }
  Rational cylinder_mass_at_depth(int d) const {
    return d == 0 ? Rational(1) : Rational(1, 2 * rank) * pow_rational(2 * rank - 1, -(d - 1));
  }
};

ExactTable exact_markov_measure(int rank, int depth, long long cap = kDefaultEnumerationCap);

struct HarmonicEstimateOptions {
  int patience = 50;      // steps the depth-m prefix must stay unchanged
  long long max_steps = 100000;
  double max_nonconverged_fraction = 1e-3;
};

// One count per walk, placed on the cylinder of the first depth-m prefix that
// survives `patience` consecutive steps. The returned table carries per-cell
// standard errors and the estimated backtrack bias bound.
struct HarmonicEstimate {
  EmpiricalTable table;
  double backtrack_bias_bound = 0.0;  // mean of (2k-1)^{-(excess+1)} at stopping
};
HarmonicEstimate empirical_harmonic_measure(const WalkMeasure& mu, int depth, long long samples,
                                            Seed seed, HarmonicEstimateOptions opts = {});

template <typename Meas>
int rank_of(const Meas& nu) {
  return nu.rank;
}

// nu(g^{-1} C(w)), resolved exactly through cylinder algebra. Requires the
// measure to resolve cylinders of depth |g| + |w|.
template <typename Meas>
auto translated_cylinder_mass(const Meas& nu, const ReducedWord& g, const ReducedWord& w)
    -> decltype(nu.cylinder_mass(w)) {
  using T = decltype(nu.cylinder_mass(w));
  if (w.length() == 0) return T(1);
  int cp = common_prefix_length(g, w);
  if (cp < w.length()) {
    // generic case: g^{-1} C(w) = C(g^{-1} w)
    return nu.cylinder_mass(multiply(invert(g), w));
  }
  // w is a prefix of g: the image is a co-finite union; integrate the
  // complement, whose pieces are all generic.
  ReducedWord gi = invert(g);
  T total(1);
  for (int i = 0; i < w.length(); ++i) {
    for (LetterCode c = 0; c < 2 * rank_of(nu); ++c) {
      if (c == w.code(i)) continue;
      if (i > 0 && c == letter_inverse(w.code(i - 1))) continue;
      ReducedWord piece = w.prefix(i);
      piece.push_reduce(c);
      total -= nu.cylinder_mass(multiply(gi, piece));
    }
  }
  return total;
}

// Max over depth-(nu.depth - max_step) cylinders C of
// |nu(C) - sum_g mu(g) nu(g^{-1} C)|; exactly 0 for a stationary exact table.
template <typename T>
T stationarity_residual(const MeasureTable<T>& nu, const WalkMeasure& mu) {
  int m = nu.depth - mu.max_step;
  if (m < 1)
    throw Error(Errc::depth_too_shallow,
                "stationarity residual needs table depth >= max support length + 1");
  T worst{};
  for_each_cylinder(nu.rank, m, [&](const ReducedWord& w, long long) {
    T acc{};
    for (size_t i = 0; i < mu.support.size(); ++i) {
      T wgt;
      if constexpr (std::is_same_v<T, Rational>) {
        wgt = mu.weight[i];
      } else {
        wgt = to_double(mu.weight[i]);
      }
      acc += wgt * translated_cylinder_mass(nu, mu.support[i], w);
    }
    T dev = nu.cylinder_mass(w) - acc;
    if (dev < T{}) dev = -dev;
    if (worst < dev) worst = dev;
  });
  return worst;
}

// Max cylinder mass per table; decreasing profile certifies non-atomicity at
// the resolved depths.
template <typename T>
std::vector<T> nonatomicity_profile(const std::vector<MeasureTable<T>>& tables) {
  std::vector<T> out;
  out.reserve(tables.size());
  for (const auto& t : tables) {
    T best{};
    for (const auto& m : t.mass)
      if (best < m) best = m;
    out.push_back(best);
  }
  return out;
}

struct AhlforsReport {
  double alpha = 0.0;   // fitted dimension
  double c_low = 0.0;   // min nu(B) / r^alpha over the sample
  double c_high = 0.0;  // max
  int radii_used = 0;
};

// Balls of the visual metric are cylinders: B(xi, e^{-eps t}) = C(prefix_t(xi)).
// Regresses log nu(B) on log r over sampled (xi, t).
template <typename T>
AhlforsReport ahlfors_check(const MeasureTable<T>& nu, const VisualParams& p, int sample_count,
                            Seed seed);

struct ConcentrationRow {
  ReducedWord element;
  ReducedWord top_cylinder;  // heaviest depth-1 cylinder of (g)_* nu
  Rational top_mass;
  bool contains_retract = false;
};

// Dirac concentration of pushforwards: for |g_n| -> infinity the heaviest
// depth-1 cylinder mass of (g_n)_* nu tends to 1 and the cylinder tracks
// retract(g_n).
template <typename Meas>
std::vector<ConcentrationRow> pushforward_concentration(const Meas& nu,
                                                        const std::vector<ReducedWord>& gs) {
  std::vector<ConcentrationRow> rows;
  rows.reserve(gs.size());
  for (const auto& g : gs) {
    if (g.empty())
      throw Error(Errc::bad_parameter, "pushforward concentration needs |g| >= 1");
    ConcentrationRow row;
    row.element = g;
    for (LetterCode c = 0; c < 2 * rank_of(nu); ++c) {
      ReducedWord w;
      w.push_reduce(c);
      // (g)_* nu (C) = nu(g^{-1} C)
      Rational mass = translated_cylinder_mass(nu, g, w);
      if (row.top_cylinder.empty() || mass > row.top_mass) {
        row.top_mass = mass;
        row.top_cylinder = w;
      }
    }
    row.contains_retract = retract(rank_of(nu), g).letter_at(0) == row.top_cylinder.code(0);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct IntcompResult {
  Rational value;   // integral over {(eta|xi) <= kcut} of d^{-D}(xi, eta) dnu
  double ratio;     // value / (1 + eps D kcut)
};

// The annulus sum sum_{j<=kcut} nu{(eta|xi) = j} q^j; exact because
// d^{-D_eps}(xi, eta) = q^{(xi|eta)} when eps D_eps = log q.
template <typename Meas>
IntcompResult intcomp_integral(const Meas& nu, const BoundaryPoint& xi, int kcut,
                               const VisualParams& p) {
  if (kcut + 1 > nu.max_depth())
    throw Error(Errc::depth_too_shallow, "intcomp needs measure depth >= kcut + 1");
  Rational value(0);
  Rational outer = nu.cylinder_mass(ReducedWord{});  // nu(C(prefix_j)), j = 0
  for (int j = 0; j <= kcut; ++j) {
    Rational inner = nu.cylinder_mass(xi.prefix(j + 1));
    value += (outer - inner) * pow_rational(2 * rank_of(nu) - 1, j);
    outer = inner;
  }
  IntcompResult res;
  res.value = value;
  res.ratio = to_double(value) / (1.0 + p.epsilon * p.hausdorff_dim * kcut);
  return res;
}

}  // namespace hypwalk
