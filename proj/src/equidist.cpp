#include "hypwalk/equidist.hpp"

#include <cmath>

#include "hypwalk/parallel.hpp"

namespace hypwalk {

McEstimate equidist_estimate(const WalkMeasure& mu, int n, const StepFnD& phi, const StepFnD& psi,
                             const BoundaryPoint& xi, const BoundaryPoint& eta, long long samples,
                             Seed seed) {
  StepSampler sampler(mu);
  auto acc = chunked_reduce<MeanAcc>(
      static_cast<std::uint64_t>(samples), 2048,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        MeanAcc a;
        ReducedWord x;
        for (std::uint64_t s = b; s < e; ++s) {
          Rng rng(seed, s);
          x.clear();
          for (int i = 0; i < n; ++i) sampler.step(x, rng);
          double f = phi.value_at_point(act(x, xi));
          double g = psi.value_at_point(act(invert(x), eta));
          a.add(f * g);
        }
        return a;
      },
      [](MeanAcc& into, const MeanAcc& part) { into.merge(part); });
  return {acc.mean(), acc.stderr_(), samples};
}

std::vector<EquidistRow> equidist_curve(const WalkMeasure& mu, const std::vector<int>& ns,
                                        const StepFnD& phi, const StepFnD& psi,
                                        const BoundaryPoint& xi, const BoundaryPoint& eta,
                                        long long samples, Seed seed) {
  std::vector<EquidistRow> rows;
  rows.reserve(ns.size());
  for (size_t i = 0; i < ns.size(); ++i) {
    auto est = equidist_estimate(mu, ns[i], phi, psi, xi, eta, samples,
                                 Seed{seed.value + 0x9E3779B9u * (i + 1)});
    rows.push_back({ns[i], est.value, est.stderr_});
  }
  return rows;
}

RetractionInvarianceResult retraction_invariance_check(const WalkMeasure& mu, int n,
                                                       const StepFnD& phi, long long samples,
                                                       Seed seed) {
  StepSampler sampler(mu);
  struct Acc {
    MeanAcc lin, alt, diff;
    long long short_walks = 0;
  };
  auto acc = chunked_reduce<Acc>(
      static_cast<std::uint64_t>(samples), 2048,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        Acc a;
        ReducedWord x;
        for (std::uint64_t s = b; s < e; ++s) {
          Rng rng(seed, s);
          x.clear();
          for (int i = 0; i < n; ++i) sampler.step(x, rng);
          if (x.length() < phi.depth) ++a.short_walks;
          double f = phi.value_at_point(retract(mu.rank, x));
          double g = phi.value_at_point(retract_alt(mu.rank, x));
          a.lin.add(f);
          a.alt.add(g);
          a.diff.add(f - g);
        }
        return a;
      },
      [](Acc& into, const Acc& part) {
        into.lin.merge(part.lin);
        into.alt.merge(part.alt);
        into.diff.merge(part.diff);
        into.short_walks += part.short_walks;
      });
  RetractionInvarianceResult res;
  res.value_linear = acc.lin.mean();
  res.value_alt = acc.alt.mean();
  res.gap = std::fabs(acc.diff.mean());
  res.stderr_ = acc.diff.stderr_();
  res.short_fraction = static_cast<double>(acc.short_walks) / static_cast<double>(samples);
  return res;
}

}  // namespace hypwalk
