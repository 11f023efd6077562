#include "hypwalk/measures.hpp"

#include <algorithm>
#include <cmath>

#include "hypwalk/fit.hpp"
#include "hypwalk/parallel.hpp"

namespace hypwalk {

namespace {
double to_double_generic(const Rational& r) { return to_double(r); }
double to_double_generic(double x) { return x; }
}  // namespace

ExactTable exact_markov_measure(int rank, int depth, long long cap) {
  long long count = cylinder_count(rank, depth);
  if (count > cap)
    throw_cap_exceeded("exact measure table at depth " + std::to_string(depth), count);
  ExactTable t;
  t.rank = rank;
  t.depth = depth;
  MarkovMeasure lazy{rank};
  t.mass.assign(static_cast<size_t>(count), lazy.cylinder_mass_at_depth(depth));
  return t;
}

HarmonicEstimate empirical_harmonic_measure(const WalkMeasure& mu, int depth, long long samples,
                                            Seed seed, HarmonicEstimateOptions opts) {
  long long cells = cylinder_count(mu.rank, depth);
  StepSampler sampler(mu);
  struct Acc {
    std::vector<long long> counts;
    long long nonconverged = 0;
    double bias_sum = 0.0;
  };
  auto acc = chunked_reduce<Acc>(
      static_cast<std::uint64_t>(samples), 1024,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        Acc a;
        a.counts.assign(static_cast<size_t>(cells), 0);
        ReducedWord x;
        for (std::uint64_t s = b; s < e; ++s) {
          Rng rng(seed, s);
          x.clear();
          ReducedWord stable;
          int run = 0;
          long long steps = 0;
          bool ok = false;
          while (steps < opts.max_steps) {
            sampler.step(x, rng);
            ++steps;
            if (x.length() < depth) {
              run = 0;
              stable.clear();
              continue;
            }
            ReducedWord pre = x.prefix(depth);
            if (!stable.empty() && pre == stable) {
              if (++run >= opts.patience) {
                ok = true;
                break;
              }
            } else {
              stable = pre;
              run = 1;
            }
          }
          if (!ok) {
            ++a.nonconverged;
            continue;
          }
          ++a.counts[static_cast<size_t>(cylinder_index(mu.rank, stable))];
          int excess = x.length() - depth;
          a.bias_sum += std::pow(1.0 / (2.0 * mu.rank - 1.0), excess + 1);
        }
        return a;
      },
      [&](Acc& into, const Acc& part) {
        if (into.counts.empty()) into.counts.assign(static_cast<size_t>(cells), 0);
        for (size_t i = 0; i < part.counts.size(); ++i) into.counts[i] += part.counts[i];
        into.nonconverged += part.nonconverged;
        into.bias_sum += part.bias_sum;
      });

  if (static_cast<double>(acc.nonconverged) >
      opts.max_nonconverged_fraction * static_cast<double>(samples))
    throw Error(Errc::non_convergence,
                std::to_string(acc.nonconverged) + " walks failed to stabilize out of " +
                    std::to_string(samples));

  HarmonicEstimate est;
  est.table.rank = mu.rank;
  est.table.depth = depth;
  est.table.samples = samples;
  est.table.nonconverged = acc.nonconverged;
  long long converged = samples - acc.nonconverged;
  est.table.mass.resize(static_cast<size_t>(cells));
  est.table.stderrs.resize(static_cast<size_t>(cells));
  for (size_t i = 0; i < est.table.mass.size(); ++i) {
    double p = static_cast<double>(acc.counts[i]) / static_cast<double>(converged);
    est.table.mass[i] = p;
    est.table.stderrs[i] = std::sqrt(p * (1.0 - p) / static_cast<double>(converged));
  }
  est.backtrack_bias_bound = acc.bias_sum / static_cast<double>(converged);
  return est;
}

template <typename T>
AhlforsReport ahlfors_check(const MeasureTable<T>& nu, const VisualParams& p, int sample_count,
                            Seed seed) {
  Rng rng(seed, 0);
  std::vector<double> log_r, log_mass;
  std::vector<int> radii;
  for (int i = 0; i < sample_count; ++i) {
    // xi sampled through a uniformly random deepest cylinder, t in [1, depth]
    long long cyl = static_cast<long long>(rng.below(static_cast<std::uint64_t>(nu.mass.size())));
    int t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(nu.depth)));
    ReducedWord w = cylinder_word(nu.rank, nu.depth, cyl).prefix(t);
    double m = to_double_generic(nu.cylinder_mass(w));
    if (m <= 0) continue;  // empty empirical cell
    log_r.push_back(-p.epsilon * t);
    log_mass.push_back(std::log(m));
    radii.push_back(t);
  }
  std::sort(radii.begin(), radii.end());
  int distinct = static_cast<int>(std::unique(radii.begin(), radii.end()) - radii.begin());
  if (distinct < 2)
    throw Error(Errc::bad_parameter, "ahlfors regression needs at least two distinct radii");
  auto fit = fit_line(log_r, log_mass);
  AhlforsReport rep;
  rep.alpha = fit.slope;
  rep.radii_used = distinct;
  double lo = 0, hi = 0;
  bool first = true;
  for (size_t i = 0; i < log_r.size(); ++i) {
    double c = std::exp(log_mass[i] - rep.alpha * log_r[i]);
    if (first) {
      lo = hi = c;
      first = false;
    } else {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  rep.c_low = lo;
  rep.c_high = hi;
  return rep;
}

template AhlforsReport ahlfors_check<Rational>(const MeasureTable<Rational>&, const VisualParams&,
                                               int, Seed);
template AhlforsReport ahlfors_check<double>(const MeasureTable<double>&, const VisualParams&, int,
                                             Seed);

}  // namespace hypwalk
