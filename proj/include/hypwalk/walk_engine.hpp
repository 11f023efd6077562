#pragma once

#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypwalk/group_core.hpp"
#include "hypwalk/rational.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

// Finitely supported symmetric probability on F_k. Validation checks
// symmetry, exact normalization, and admissibility (the support generates the
// whole group; decided by Stallings folding).
struct WalkMeasure {
  int rank = 2;
  std::vector<ReducedWord> support;
  std::vector<Rational> weight;
  bool admissible = false;
  int subgroup_rank = 0;  // rank of the subgroup generated by the support
  int max_step = 0;

  bool elementary() const { return subgroup_rank <= 1; }
  bool is_uniform_generator_walk() const;
  Rational mass(const ReducedWord& g) const;

  static WalkMeasure simple_random_walk(int rank);
};

WalkMeasure make_measure(int rank, std::vector<std::pair<ReducedWord, Rational>> weights);
// Skips symmetry/admissibility validation; for negative controls and probes.
WalkMeasure make_measure_unchecked(int rank, std::vector<std::pair<ReducedWord, Rational>> weights);

// Rank of the subgroup of F_k generated by the words (Stallings folding);
// returns (rank, generates_whole_group).
std::pair<int, bool> subgroup_rank_of(int rank, const std::vector<ReducedWord>& words);

struct Trajectory {
  Seed seed;
  std::vector<ReducedWord> positions;  // X_0 = e, ..., X_n
};

// Per-path increment sampler; cumulative thresholds over the support.
class StepSampler {
 public:
  explicit StepSampler(const WalkMeasure& mu);
  const ReducedWord& sample(Rng& rng) const;
  // Appends one increment to x in place.
  void step(ReducedWord& x, Rng& rng) const;

 private:
  const WalkMeasure* mu_;
  std::vector<double> cumulative_;
};

Trajectory sample_path(const WalkMeasure& mu, int n, Seed seed);

// Exact law of X_n as a table of rational masses.
struct ConvolutionTable {
  int n = 0;
  std::unordered_map<ReducedWord, Rational, WordHash> mass;

  Rational total() const;
  Rational at(const ReducedWord& g) const;
};

ConvolutionTable convolve_power(const WalkMeasure& mu, int n,
                                long long cap = kDefaultEnumerationCap);
// All tables mu^{*1}..mu^{*n} in one sweep.
std::vector<ConvolutionTable> convolve_powers(const WalkMeasure& mu, int n,
                                              long long cap = kDefaultEnumerationCap);

// mu^{*n}(g) <= max(mu^{*n-1}(e), mu^{*n}(e)) for all g, checked exactly.
struct MaxLemmaReport {
  bool all_pass = true;
  long long checked = 0;
  int violations = 0;
  Rational worst_slack;  // min over checked g of bound - mu^{*n}(g)
};
MaxLemmaReport convolution_max_check(const WalkMeasure& mu, int n_max,
                                     long long cap = kDefaultEnumerationCap);
MaxLemmaReport check_max_lemma_tables(const std::vector<ConvolutionTable>& tables);

// Exact law of |X_n| for the uniform generator walk: the word length is a
// birth-death chain with up-rate (2k-1)/2k away from 0. Returns rows
// n = 0..n_max; row[n][l] = P(|X_n| = l).
std::vector<std::vector<Rational>> srw_radial_laws(int rank, int n_max);

struct DriftEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long long paths = 0;
};
DriftEstimate drift_estimate(const WalkMeasure& mu, int n, long long paths, Seed seed);

struct SpectralRadiusReport {
  double rho_fit = 1.0;    // n^{-3/2}-corrected log-linear fit (with 1/n term)
  double rho_crude = 1.0;  // mu^{*2N}(e)^{1/2N}
  bool crude_monotone = true;
  bool rejected_elementary = false;
  int fit_lo = 0, fit_hi = 0;            // fit window in n (mu^{*2n})
  std::vector<double> log_return_probs;  // log mu^{*2n}(e), n = 1..N
};
SpectralRadiusReport spectral_radius_estimate(const WalkMeasure& mu, int n_max,
                                              long long cap = kDefaultEnumerationCap);

struct HitProbEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double truncation_bias_bound = 0.0;
  long long hits = 0;
  long long trials = 0;
};
// P(walk from e ever hits g), distance-based early stopping past the horizon.
HitProbEstimate green_hit_prob(const WalkMeasure& mu, const ReducedWord& g, long long trials,
                               int horizon_distance, Seed seed);

struct GreenDistanceEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double truncation_bias_bound = 0.0;
};
GreenDistanceEstimate green_distance(const WalkMeasure& mu, const ReducedWord& g, long long trials,
                                     Seed seed, int horizon_distance = 30);

struct GreenFitReport {
  double slope = 0.0, slope_se = 0.0;
  double intercept = 0.0, intercept_se = 0.0;
  std::vector<double> distances;  // -log F(e, g_l), l = 1..max_len
  std::vector<double> stderrs;
};
// Weighted regression of -log F(e, g) on |g| over geodesic words of length
// 1..max_len; for the SRW the slope calibrates the green_rescaled metric.
GreenFitReport green_metric_fit(const WalkMeasure& mu, int max_len, long long trials_per_point,
                                Seed seed, int horizon_distance = 30);

}  // namespace hypwalk
