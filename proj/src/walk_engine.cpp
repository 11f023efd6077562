#include "hypwalk/walk_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hypwalk/fit.hpp"
#include "hypwalk/parallel.hpp"

namespace hypwalk {

namespace {

struct UnionFind {
  std::vector<int> parent;
  int make() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

struct LabeledEdge {
  int from, to, label;
};

}  // namespace

std::pair<int, bool> subgroup_rank_of(int rank, const std::vector<ReducedWord>& words) {
  // Stallings graph: trace each word as a loop at the base vertex, then fold
  // until edge labels are deterministic in both directions.
  UnionFind uf;
  int base = uf.make();
  std::vector<LabeledEdge> edges;
  for (const auto& w : words) {
    if (w.empty()) continue;
    int cur = base;
    for (int i = 0; i < w.length(); ++i) {
      int nxt = (i + 1 == w.length()) ? base : uf.make();
      LetterCode c = w.code(i);
      if (c & 1) {
        edges.push_back({nxt, cur, c / 2});  // negative letter: backward edge
      } else {
        edges.push_back({cur, nxt, c / 2});
      }
      cur = nxt;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, int>, int> out, in;
    for (const auto& e : edges) {
      int u = uf.find(e.from), v = uf.find(e.to);
      if (auto [it, fresh] = out.try_emplace({u, e.label}, v); !fresh && uf.find(it->second) != v) {
        uf.unite(uf.find(it->second), v);
        changed = true;
        break;
      }
      if (auto [it, fresh] = in.try_emplace({v, e.label}, u); !fresh && uf.find(it->second) != u) {
        uf.unite(uf.find(it->second), u);
        changed = true;
        break;
      }
    }
  }
  std::map<std::tuple<int, int, int>, bool> folded_edges;
  std::map<int, bool> vertices;
  vertices[uf.find(base)] = true;
  for (const auto& e : edges) {
    folded_edges[{uf.find(e.from), uf.find(e.to), e.label}] = true;
    vertices[uf.find(e.from)] = true;
    vertices[uf.find(e.to)] = true;
  }
  auto nv = static_cast<int>(vertices.size());
  auto ne = static_cast<int>(folded_edges.size());
  int subgroup_rank = ne - nv + 1;
  bool whole = nv == 1 && ne == rank;
  return {subgroup_rank, whole};
}

bool WalkMeasure::is_uniform_generator_walk() const {
  if (static_cast<int>(support.size()) != 2 * rank) return false;
  Rational u(1, 2 * rank);
  u.canonicalize();
  for (size_t i = 0; i < support.size(); ++i) {
    if (support[i].length() != 1 || weight[i] != u) return false;
  }
  return true;
}

Rational WalkMeasure::mass(const ReducedWord& g) const {
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i] == g) return weight[i];
  return Rational(0);
}

WalkMeasure WalkMeasure::simple_random_walk(int rank) {
  std::vector<std::pair<ReducedWord, Rational>> w;
  for (LetterCode c = 0; c < 2 * rank; ++c) {
    ReducedWord g;
    g.push_reduce(c);
    w.emplace_back(std::move(g), Rational(1, 2 * rank));
  }
  return make_measure(rank, std::move(w));
}

namespace {

WalkMeasure build_measure(int rank, std::vector<std::pair<ReducedWord, Rational>> weights,
                          bool validate) {
  if (rank < 2) throw Error(Errc::bad_parameter, "rank must be >= 2");
  // Merge duplicates, sort support for deterministic iteration order.
  std::map<ReducedWord, Rational> merged;
  for (auto& [g, w] : weights) {
    if (sgn(w) <= 0) throw Error(Errc::not_normalized, "weights must be positive");
    merged[g] += w;
  }
  WalkMeasure mu;
  mu.rank = rank;
  Rational total(0);
  for (auto& [g, w] : merged) {
    mu.support.push_back(g);
    mu.weight.push_back(w);
    mu.max_step = std::max(mu.max_step, g.length());
    total += w;
  }
  if (total != 1)
    throw Error(Errc::not_normalized, "weights sum to " + to_string(total) + ", expected 1");
  auto [srank, whole] = subgroup_rank_of(rank, mu.support);
  mu.subgroup_rank = srank;
  mu.admissible = whole;
  if (validate) {
    for (size_t i = 0; i < mu.support.size(); ++i) {
      if (mu.mass(invert(mu.support[i])) != mu.weight[i])
        throw Error(Errc::not_symmetric,
                    "measure not symmetric at " + format_word(mu.support[i]));
    }
    if (!whole)
      throw Error(Errc::not_admissible,
                  "support generates a rank-" + std::to_string(srank) + " subgroup of F_" +
                      std::to_string(rank));
  }
  return mu;
}

}  // namespace

WalkMeasure make_measure(int rank, std::vector<std::pair<ReducedWord, Rational>> weights) {
  return build_measure(rank, std::move(weights), true);
}

WalkMeasure make_measure_unchecked(int rank,
                                   std::vector<std::pair<ReducedWord, Rational>> weights) {
  return build_measure(rank, std::move(weights), false);
}

StepSampler::StepSampler(const WalkMeasure& mu) : mu_(&mu) {
  cumulative_.reserve(mu.support.size());
  double acc = 0.0;
  for (const auto& w : mu.weight) {
    acc += to_double(w);
    cumulative_.push_back(acc);
  }
  if (!cumulative_.empty()) cumulative_.back() = 1.0;
}

const ReducedWord& StepSampler::sample(Rng& rng) const {
  double u = rng.uniform01();
  size_t i = 0;
  while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
  return mu_->support[i];
}

void StepSampler::step(ReducedWord& x, Rng& rng) const {
  const ReducedWord& h = sample(rng);
  for (LetterCode c : h.codes()) x.push_reduce(c);
}

Trajectory sample_path(const WalkMeasure& mu, int n, Seed seed) {
  StepSampler sampler(mu);
  Rng rng(seed, 0);
  Trajectory t;
  t.seed = seed;
  t.positions.reserve(static_cast<size_t>(n) + 1);
  ReducedWord x;
  t.positions.push_back(x);
  for (int i = 0; i < n; ++i) {
    sampler.step(x, rng);
    t.positions.push_back(x);
  }
  return t;
}

Rational ConvolutionTable::total() const {
  Rational s(0);
  for (const auto& [g, m] : mass) s += m;
  return s;
}

Rational ConvolutionTable::at(const ReducedWord& g) const {
  auto it = mass.find(g);
  return it == mass.end() ? Rational(0) : it->second;
}

namespace {
long long ball_size_saturating(int rank, int radius) {
  double est = 1;
  for (int r = 1; r <= radius; ++r) est += 2.0 * rank * std::pow(2.0 * rank - 1.0, r - 1);
  return est > 4e18 ? (1ll << 62) : static_cast<long long>(est);
}
}  // namespace

std::vector<ConvolutionTable> convolve_powers(const WalkMeasure& mu, int n, long long cap) {
  std::vector<ConvolutionTable> out;
  out.reserve(static_cast<size_t>(n));
  ConvolutionTable cur;
  cur.n = 0;
  cur.mass[ReducedWord{}] = 1;
  for (int step = 1; step <= n; ++step) {
    ConvolutionTable next;
    next.n = step;
    next.mass.reserve(cur.mass.size() * mu.support.size());
    for (const auto& [g, m] : cur.mass) {
      for (size_t i = 0; i < mu.support.size(); ++i) {
        next.mass[multiply(g, mu.support[i])] += m * mu.weight[i];
      }
      if (static_cast<long long>(next.mass.size()) > cap)
        throw_cap_exceeded("convolution power " + std::to_string(step),
                           ball_size_saturating(mu.rank, step * mu.max_step));
    }
    out.push_back(std::move(next));
    cur = out.back();
  }
  return out;
}

ConvolutionTable convolve_power(const WalkMeasure& mu, int n, long long cap) {
  if (n == 0) {
    ConvolutionTable t;
    t.n = 0;
    t.mass[ReducedWord{}] = 1;
    return t;
  }
  return convolve_powers(mu, n, cap).back();
}

MaxLemmaReport check_max_lemma_tables(const std::vector<ConvolutionTable>& tables) {
  MaxLemmaReport r;
  r.worst_slack = Rational(2);
  ReducedWord e;
  for (size_t i = 0; i < tables.size(); ++i) {
    Rational prev_return = i == 0 ? Rational(1) : tables[i - 1].at(e);
    Rational bound = std::max(prev_return, tables[i].at(e));
    for (const auto& [g, m] : tables[i].mass) {
      Rational slack = bound - m;
      if (sgn(slack) < 0) {
        r.all_pass = false;
        ++r.violations;
      }
      if (slack < r.worst_slack) r.worst_slack = slack;
      ++r.checked;
    }
  }
  return r;
}

MaxLemmaReport convolution_max_check(const WalkMeasure& mu, int n_max, long long cap) {
  return check_max_lemma_tables(convolve_powers(mu, n_max, cap));
}

std::vector<std::vector<Rational>> srw_radial_laws(int rank, int n_max) {
  Rational up(2 * rank - 1, 2 * rank), down(1, 2 * rank);
  up.canonicalize();
  down.canonicalize();
  std::vector<std::vector<Rational>> rows;
  rows.reserve(static_cast<size_t>(n_max) + 1);
  rows.push_back({Rational(1)});
  for (int n = 1; n <= n_max; ++n) {
    std::vector<Rational> row(static_cast<size_t>(n) + 1, Rational(0));
    const auto& prev = rows.back();
    for (int l = 0; l < static_cast<int>(prev.size()); ++l) {
      const Rational& p = prev[static_cast<size_t>(l)];
      if (p == 0) continue;
      if (l == 0) {
        row[1] += p;
      } else {
        row[static_cast<size_t>(l) + 1] += p * up;
        row[static_cast<size_t>(l) - 1] += p * down;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

DriftEstimate drift_estimate(const WalkMeasure& mu, int n, long long paths, Seed seed) {
  if (n == 0 || paths == 0) return {0.0, 0.0, paths};
  StepSampler sampler(mu);
  auto acc = chunked_reduce<MeanAcc>(
      static_cast<std::uint64_t>(paths), 1024,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        MeanAcc a;
        ReducedWord x;
        for (std::uint64_t p = b; p < e; ++p) {
          Rng rng(seed, p);
          x.clear();
          for (int i = 0; i < n; ++i) sampler.step(x, rng);
          a.add(static_cast<double>(x.length()) / n);
        }
        return a;
      },
      [](MeanAcc& into, const MeanAcc& part) { into.merge(part); });
  return {acc.mean(), acc.stderr_(), paths};
}

SpectralRadiusReport spectral_radius_estimate(const WalkMeasure& mu, int n_max, long long cap) {
  int big_n = n_max / 2;
  if (big_n < 3) throw Error(Errc::bad_parameter, "spectral radius fit needs n_max >= 6");
  SpectralRadiusReport rep;
  ReducedWord e;
  std::vector<double> p2n(static_cast<size_t>(big_n) + 1, 0.0);
  if (mu.is_uniform_generator_walk()) {
    auto radial = srw_radial_laws(mu.rank, n_max);
    for (int n = 1; n <= big_n; ++n) p2n[static_cast<size_t>(n)] = to_double(radial[2 * n][0]);
  } else {
    auto tables = convolve_powers(mu, n_max, cap);
    for (int n = 1; n <= big_n; ++n) p2n[static_cast<size_t>(n)] = to_double(tables[2 * n - 1].at(e));
  }
  rep.log_return_probs.reserve(static_cast<size_t>(big_n));
  for (int n = 1; n <= big_n; ++n)
    rep.log_return_probs.push_back(std::log(p2n[static_cast<size_t>(n)]));

  rep.rho_crude = std::exp(rep.log_return_probs.back() / (2.0 * big_n));
  for (int n = 1; n + 1 <= big_n; ++n) {
    double a = rep.log_return_probs[static_cast<size_t>(n - 1)] / (2.0 * n);
    double b = rep.log_return_probs[static_cast<size_t>(n)] / (2.0 * (n + 1));
    if (b < a - 1e-12) rep.crude_monotone = false;
  }

  // n^{-3/2}-corrected log-linear fit with a 1/n term for the subleading
  // correction: log p_{2n} + 1.5 log n = 2n log(rho) + c + c2/n.
  rep.fit_lo = big_n >= 6 ? 4 : 2;
  rep.fit_hi = big_n;
  std::vector<double> x0, x1, x2, y;
  for (int n = rep.fit_lo; n <= rep.fit_hi; ++n) {
    x0.push_back(2.0 * n);
    x1.push_back(1.0);
    x2.push_back(1.0 / n);
    y.push_back(rep.log_return_probs[static_cast<size_t>(n - 1)] + 1.5 * std::log(n));
  }
  auto coef = fit_3param({x0, x1, x2}, y);
  rep.rho_fit = std::exp(coef[0]);
  rep.rejected_elementary = mu.elementary() || rep.rho_fit >= 1.0 - 1e-9;
  // The corrected fit only models non-amenable decay; an elementary measure
  // has no spectral gap and is reported at the Kesten boundary.
  if (rep.rejected_elementary) rep.rho_fit = 1.0;
  return rep;
}

HitProbEstimate green_hit_prob(const WalkMeasure& mu, const ReducedWord& g, long long trials,
                               int horizon_distance, Seed seed) {
  HitProbEstimate est;
  est.trials = trials;
  if (g.empty()) {
    // tau_e = 0 by convention
    est.value = 1.0;
    est.hits = trials;
    return est;
  }
  est.truncation_bias_bound =
      std::pow(1.0 / (2.0 * mu.rank - 1.0), std::max(1, horizon_distance - g.length()));
  StepSampler sampler(mu);
  const ReducedWord ginv = invert(g);
  constexpr std::uint64_t kStepCap = 10'000'000;
  struct Acc {
    long long hits = 0;
    long long censored = 0;
  };
  auto acc = chunked_reduce<Acc>(
      static_cast<std::uint64_t>(trials), 4096,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        Acc a;
        ReducedWord w;
        for (std::uint64_t t = b; t < e; ++t) {
          Rng rng(seed, t);
          w = ginv;  // g^{-1} X_n, starts at X_0 = e
          std::uint64_t steps = 0;
          for (;;) {
            sampler.step(w, rng);
            if (w.empty()) {
              ++a.hits;
              break;
            }
            if (w.length() > horizon_distance) break;
            if (++steps > kStepCap) {
              ++a.censored;
              break;
            }
          }
        }
        return a;
      },
      [](Acc& into, const Acc& part) {
        into.hits += part.hits;
        into.censored += part.censored;
      });
  est.hits = acc.hits;
  est.value = static_cast<double>(acc.hits) / static_cast<double>(trials);
  est.stderr_ = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(trials));
  return est;
}

GreenDistanceEstimate green_distance(const WalkMeasure& mu, const ReducedWord& g, long long trials,
                                     Seed seed, int horizon_distance) {
  auto hit = green_hit_prob(mu, g, trials, horizon_distance, seed);
  GreenDistanceEstimate est;
  est.value = -std::log(hit.value);
  est.stderr_ = hit.value > 0 ? hit.stderr_ / hit.value : 0.0;
  est.truncation_bias_bound = hit.truncation_bias_bound;
  return est;
}

GreenFitReport green_metric_fit(const WalkMeasure& mu, int max_len, long long trials_per_point,
                                Seed seed, int horizon_distance) {
  GreenFitReport rep;
  std::vector<double> lengths;
  ReducedWord g;
  for (int l = 1; l <= max_len; ++l) {
    g.push_reduce(l % 2 == 1 ? 0 : 2);  // alternating geodesic a b a b ...
    auto d = green_distance(mu, g, trials_per_point, Seed{seed.value + static_cast<std::uint64_t>(l)},
                            horizon_distance);
    rep.distances.push_back(d.value);
    rep.stderrs.push_back(d.stderr_);
    lengths.push_back(static_cast<double>(l));
  }
  auto fit = fit_line(lengths, rep.distances, rep.stderrs);
  rep.slope = fit.slope;
  rep.slope_se = fit.slope_se;
  rep.intercept = fit.intercept;
  rep.intercept_se = fit.intercept_se;
  return rep;
}

}  // namespace hypwalk
