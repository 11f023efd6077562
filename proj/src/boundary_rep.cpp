#include "hypwalk/boundary_rep.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hypwalk/parallel.hpp"

namespace hypwalk {

Rational rn_derivative(int rank, const ReducedWord& g, const Cylinder& c) {
  if (c.depth() < g.length() + 1)
    throw Error(Errc::depth_too_shallow,
                "r(g, .) is only constant on cylinders of depth >= |g| + 1");
  int beta = busemann_int(retract(rank, c.prefix), invert(g));
  return pow_rational(2 * rank - 1, beta);
}

namespace {

// Enumerates reduced continuations v of length `len` after the letter `last`,
// invoking fn(v) with a shared buffer.
template <typename Fn>
void for_each_continuation(int rank, LetterCode last, int len, ReducedWord& buf, Fn&& fn) {
  if (len == 0) {
    fn(const_cast<const ReducedWord&>(buf));
    return;
  }
  for (LetterCode c = 0; c < 2 * rank; ++c) {
    if (c == letter_inverse(buf.empty() ? last : buf.back())) continue;
    buf.push_reduce(c);
    for_each_continuation(rank, last, len - 1, buf, fn);
    buf.pop_back();
  }
}

}  // namespace

template <typename S>
S coef_pi(const ReducedWord& g, const StepFn<S>& phi, const StepFn<S>& psi) {
  const int rank = phi.rank;
  const int q = 2 * rank - 1;
  const int L = g.length();
  const int a = phi.depth, b = psi.depth;
  const ReducedWord gi = invert(g);
  MarkovMeasure nu{rank};
  S total{};
  // Partition the boundary by the annulus j = (xi|g), refined just enough for
  // both step functions to be constant on each piece.
  for (int j = 0; j <= L; ++j) {
    S factor = RepScalar<S>::q_half_power(q, 2 * j - L);
    const int lead = j < L ? L - j : 0;
    const int t = std::max({0, b - (j + 1), a - (lead + 1)});
    const S mass = RepScalar<S>::from_rational(nu.cylinder_mass_at_depth(j + 1 + t));
    const ReducedWord base_psi = g.prefix(j);
    const ReducedWord base_phi = gi.prefix(lead);
    for (LetterCode x = 0; x < 2 * rank; ++x) {
      if (j < L && x == g.code(j)) continue;
      if (j > 0 && x == letter_inverse(g.code(j - 1))) continue;
      if (j == L && L > 0 && x == letter_inverse(g.code(L - 1))) continue;
      ReducedWord vbuf;
      for_each_continuation(rank, x, t, vbuf, [&](const ReducedWord& v) {
        ReducedWord wpsi = base_psi;
        wpsi.push_reduce(x);
        ReducedWord wphi = base_phi;
        wphi.push_reduce(x);
        for (LetterCode vc : v.codes()) {
          wpsi.push_reduce(vc);
          wphi.push_reduce(vc);
        }
        total += factor * phi.value_at(wphi) * psi.value_at(wpsi) * mass;
      });
    }
  }
  return total;
}

template QuadExt coef_pi<QuadExt>(const ReducedWord&, const StepFn<QuadExt>&,
                                  const StepFn<QuadExt>&);
template double coef_pi<double>(const ReducedWord&, const StepFn<double>&, const StepFn<double>&);

QuadExt harish_chandra_length(int rank, int len) {
  if (len == 0) return QuadExt::one();
  MarkovMeasure nu{rank};
  QuadExt acc;
  for (int j = 0; j <= len; ++j)
    acc += QuadExt(nu.annulus_mass(len, j)) * half_power(2 * rank - 1, 2 * j - len);
  return acc;
}

QuadExt harish_chandra(int rank, const ReducedWord& g) {
  return harish_chandra_length(rank, g.length());
}

HarishChandraBand harish_chandra_asymptotics(int rank, int radius) {
  HarishChandraBand band;
  double q = 2.0 * rank - 1.0;
  double prev = 1.0;
  bool first = true;
  for (int l = 0; l <= radius; ++l) {
    double xi = harish_chandra_length(rank, l).value();
    if (l > 0 && xi >= prev) band.decreasing = false;
    prev = xi;
    double ratio = xi / ((1.0 + l) * std::pow(q, -l / 2.0));
    if (first) {
      band.c_low = band.c_high = ratio;
      first = false;
    } else {
      band.c_low = std::min(band.c_low, ratio);
      band.c_high = std::max(band.c_high, ratio);
    }
  }
  return band;
}

StepFnX u_density(int rank, const ReducedWord& g, int depth) {
  if (depth < g.length() + 1)
    throw Error(Errc::depth_too_shallow, "u_g needs depth >= |g| + 1");
  QuadExt xi_inv = inverse(harish_chandra(rank, g));
  StepFnX out;
  out.rank = rank;
  out.depth = depth;
  out.values.resize(static_cast<size_t>(cylinder_count(rank, depth)));
  const int q = 2 * rank - 1;
  for_each_cylinder(rank, depth, [&](const ReducedWord& w, long long idx) {
    int cp = common_prefix_length(w, g);
    out.values[static_cast<size_t>(idx)] = half_power(q, 2 * cp - g.length()) * xi_inv;
  });
  return out;
}

QuadExt cylinder_u_integral(int rank, const ReducedWord& g, const ReducedWord& w) {
  const int q = 2 * rank - 1;
  const int L = g.length();
  MarkovMeasure nu{rank};
  if (w.length() == 0) return QuadExt::one();
  QuadExt acc;
  int c = common_prefix_length(w, g);
  if (c < w.length()) {
    // single annulus j = c over the whole cylinder
    acc = QuadExt(nu.cylinder_mass(w)) * half_power(q, 2 * c - L);
  } else {
    // w is a prefix of g: annuli j = |w| .. L partition C(w)
    for (int j = w.length(); j <= L; ++j)
      acc += QuadExt(nu.annulus_mass(L, j)) * half_power(q, 2 * j - L);
  }
  return acc * inverse(harish_chandra_length(rank, L));
}

double cylinder_u_integral_d(int rank, const ReducedWord& g, const ReducedWord& w) {
  const double q = 2.0 * rank - 1.0;
  const int L = g.length();
  MarkovMeasure nu{rank};
  if (w.length() == 0) return 1.0;
  double acc = 0;
  int c = common_prefix_length(w, g);
  if (c < w.length()) {
    acc = to_double(nu.cylinder_mass(w)) * std::pow(q, (2.0 * c - L) / 2.0);
  } else {
    for (int j = w.length(); j <= L; ++j)
      acc += to_double(nu.annulus_mass(L, j)) * std::pow(q, (2.0 * j - L) / 2.0);
  }
  return acc / harish_chandra_length(rank, L).value();
}

template <typename S>
double lipschitz_const(const StepFn<S>& phi, const VisualParams& p) {
  if (phi.depth == 0) return 0.0;
  std::vector<ReducedWord> words(static_cast<size_t>(phi.cells()));
  for_each_cylinder(phi.rank, phi.depth, [&](const ReducedWord& w, long long idx) {
    words[static_cast<size_t>(idx)] = w;
  });
  double best = 0.0;
  for (size_t i = 0; i < words.size(); ++i) {
    for (size_t j = i + 1; j < words.size(); ++j) {
      double gap =
          std::fabs(RepScalar<S>::to_num(phi.values[i]) - RepScalar<S>::to_num(phi.values[j]));
      if (gap == 0) continue;
      int cp = common_prefix_length(words[i], words[j]);
      best = std::max(best, gap * std::exp(p.epsilon * cp));
    }
  }
  return best;
}

template double lipschitz_const<QuadExt>(const StepFn<QuadExt>&, const VisualParams&);
template double lipschitz_const<double>(const StepFn<double>&, const VisualParams&);

L2ProximalResult l2proximal_gap(const VisualParams& p, const ReducedWord& g,
                                const TwoVarStepFn<QuadExt>& psi) {
  if (p.hausdorff_dim <= 1.0)
    throw Error(Errc::dimension_hypothesis, "l2 proximality needs D_eps > 1");
  const int rank = psi.rank;
  const int m = psi.depth;
  const long long n = psi.cells();
  const ReducedWord gi = invert(g);

  std::vector<ReducedWord> words(static_cast<size_t>(n));
  for_each_cylinder(rank, m, [&](const ReducedWord& w, long long idx) {
    words[static_cast<size_t>(idx)] = w;
  });
  std::vector<QuadExt> ug(static_cast<size_t>(n)), ugi(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    ug[static_cast<size_t>(i)] = cylinder_u_integral(rank, g, words[static_cast<size_t>(i)]);
    ugi[static_cast<size_t>(i)] = cylinder_u_integral(rank, gi, words[static_cast<size_t>(i)]);
  }
  QuadExt pairing;
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j)
      pairing += psi.at(i, j) * ug[static_cast<size_t>(i)] * ugi[static_cast<size_t>(j)];

  long long ih = m == 0 ? 0 : cylinder_index(rank, retract(rank, g).prefix(m));
  long long jh = m == 0 ? 0 : cylinder_index(rank, retract(rank, gi).prefix(m));
  QuadExt at_limit = psi.at(ih, jh);

  // Lipschitz constant for the l1-product distance: max over the
  // one-variable sections in either coordinate.
  double lam = 0.0;
  for (long long j = 0; j < n; ++j) {
    StepFn<QuadExt> row, col;
    row.rank = col.rank = rank;
    row.depth = col.depth = m;
    row.values.resize(static_cast<size_t>(n));
    col.values.resize(static_cast<size_t>(n));
    for (long long i = 0; i < n; ++i) {
      row.values[static_cast<size_t>(i)] = psi.at(i, j);
      col.values[static_cast<size_t>(i)] = psi.at(j, i);
    }
    lam = std::max({lam, lipschitz_const(row, p), lipschitz_const(col, p)});
  }

  L2ProximalResult res;
  res.lipschitz = lam;
  res.gap = std::fabs((pairing - at_limit).value());
  res.bound = 2.0 * lam / std::pow(1.0 + g.length(), 1.0 / p.hausdorff_dim);
  res.bound_ratio = res.bound > 0 ? res.gap / res.bound : 0.0;
  return res;
}

namespace {
std::vector<double> xi_doubles(int rank, int max_len) {
  std::vector<double> out(static_cast<size_t>(max_len) + 1);
  for (int l = 0; l <= max_len; ++l)
    out[static_cast<size_t>(l)] = harish_chandra_length(rank, l).value();
  return out;
}
}  // namespace

QuadExt pn_coefficient_exact(const WalkMeasure& mu, int n, const StepFnX& phi, const StepFnX& psi,
                             long long cap) {
  auto table = convolve_power(mu, n, cap);
  int max_len = n * mu.max_step;
  std::vector<QuadExt> by_len(static_cast<size_t>(max_len) + 1);
  for (const auto& [g, m] : table.mass)
    by_len[static_cast<size_t>(g.length())] += QuadExt(m) * coef_pi(g, phi, psi);
  QuadExt total;
  for (int l = 0; l <= max_len; ++l) {
    if (by_len[static_cast<size_t>(l)] == QuadExt::zero()) continue;
    total += by_len[static_cast<size_t>(l)] * inverse(harish_chandra_length(mu.rank, l));
  }
  return total;
}

McEstimate pn_coefficient_mc(const WalkMeasure& mu, int n, const StepFnD& phi, const StepFnD& psi,
                             long long samples, Seed seed) {
  StepSampler sampler(mu);
  auto xs = xi_doubles(mu.rank, n * mu.max_step);
  auto acc = chunked_reduce<MeanAcc>(
      static_cast<std::uint64_t>(samples), 512,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        MeanAcc a;
        ReducedWord x;
        for (std::uint64_t s = b; s < e; ++s) {
          Rng rng(seed, s);
          x.clear();
          for (int i = 0; i < n; ++i) sampler.step(x, rng);
          a.add(coef_pi<double>(x, phi, psi) / xs[static_cast<size_t>(x.length())]);
        }
        return a;
      },
      [](MeanAcc& into, const MeanAcc& part) { into.merge(part); });
  return {acc.mean(), acc.stderr_(), samples};
}

Rational pn_one_sup_exact(const WalkMeasure& mu, int n, long long cap) {
  auto table = convolve_power(mu, n, cap);
  const int rank = mu.rank;
  const int q = 2 * rank - 1;
  // One trie node per support-word prefix; B[v] accumulates
  // sum_{g in subtree(v)} mu^{*n}(g) q^{-|g|/2} / Xi(|g|), a rational because
  // the half powers cancel against Xi's.
  struct Node {
    std::vector<int> child;
    Rational b;
  };
  std::vector<Node> trie(
      1, Node{std::vector<int>(static_cast<size_t>(2 * rank), -1), Rational(0)});
  auto h_of_len = [&](int l) -> Rational {
    if (l == 0) return Rational(1);
    Rational den = Rational(2 * q) + Rational(q - 1) * Rational(l - 1);
    return Rational(2 * rank) / den;
  };
  for (const auto& [g, m] : table.mass) {
    Rational contrib = m * h_of_len(g.length());
    int cur = 0;
    trie[0].b += contrib;
    for (int i = 0; i < g.length(); ++i) {
      int& slot = trie[static_cast<size_t>(cur)].child[g.code(i)];
      if (slot < 0) {
        slot = static_cast<int>(trie.size());
        trie.push_back(Node{std::vector<int>(static_cast<size_t>(2 * rank), -1), Rational(0)});
        // vector may have reallocated; re-resolve the slot
        cur = trie[static_cast<size_t>(cur)].child[g.code(i)] = static_cast<int>(trie.size()) - 1;
      } else {
        cur = slot;
      }
      trie[static_cast<size_t>(cur)].b += contrib;
    }
  }
  // P_n 1 along the path (v_0, v_1, ...) of a boundary point equals
  // B[v_0] + sum_{c >= 1} B[v_c] (q^c - q^{c-1}); all increments are
  // nonnegative, so the sup is the max running partial over trie nodes.
  Rational best = trie[0].b;
  std::vector<Rational> qpow(1, Rational(1));
  struct Frame {
    int node;
    int depth;
    Rational partial;
  };
  std::vector<Frame> stack{{0, 0, trie[0].b}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.partial > best) best = f.partial;
    for (int c : trie[static_cast<size_t>(f.node)].child) {
      if (c < 0) continue;
      int d = f.depth + 1;
      while (static_cast<int>(qpow.size()) <= d) qpow.push_back(qpow.back() * q);
      Rational part =
          f.partial + trie[static_cast<size_t>(c)].b *
                          (qpow[static_cast<size_t>(d)] - qpow[static_cast<size_t>(d - 1)]);
      stack.push_back({c, d, std::move(part)});
    }
  }
  return best;
}

PnOneSupMc pn_one_sup_mc(const WalkMeasure& mu, int n, long long samples, int probe_depth,
                         Seed seed) {
  const int rank = mu.rank;
  long long probes = cylinder_count(rank, probe_depth);
  std::vector<ReducedWord> probe_words(static_cast<size_t>(probes));
  for_each_cylinder(rank, probe_depth, [&](const ReducedWord& w, long long idx) {
    probe_words[static_cast<size_t>(idx)] = w;
  });
  MarkovMeasure nu{rank};
  double probe_mass = to_double(nu.cylinder_mass_at_depth(probe_depth));
  StepSampler sampler(mu);
  struct Acc {
    std::vector<MeanAcc> per_probe;
  };
  auto acc = chunked_reduce<Acc>(
      static_cast<std::uint64_t>(samples), 512,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        Acc a;
        a.per_probe.resize(static_cast<size_t>(probes));
        ReducedWord x;
        for (std::uint64_t s = b; s < e; ++s) {
          Rng rng(seed, s);
          x.clear();
          for (int i = 0; i < n; ++i) sampler.step(x, rng);
          for (long long pidx = 0; pidx < probes; ++pidx) {
            double v = cylinder_u_integral_d(rank, x, probe_words[static_cast<size_t>(pidx)]);
            a.per_probe[static_cast<size_t>(pidx)].add(v / probe_mass);
          }
        }
        return a;
      },
      [&](Acc& into, const Acc& part) {
        if (into.per_probe.empty()) into.per_probe.resize(static_cast<size_t>(probes));
        for (size_t i = 0; i < part.per_probe.size(); ++i)
          into.per_probe[i].merge(part.per_probe[i]);
      });
  PnOneSupMc out;
  for (const auto& m : acc.per_probe) {
    if (m.mean() > out.value) {
      out.value = m.mean();
      out.max_stderr = m.stderr_();
    }
  }
  return out;
}

McEstimate coef_reduction_gap(const WalkMeasure& mu, int n, const StepFnD& w, const StepFnD& phi,
                              const StepFnD& psi, long long samples, Seed seed) {
  StepSampler sampler(mu);
  auto xs = xi_doubles(mu.rank, n * mu.max_step);
  auto acc = chunked_reduce<MeanAcc>(
      static_cast<std::uint64_t>(samples), 512,
      [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
        MeanAcc a;
        ReducedWord x;
        for (std::uint64_t s = b; s < e; ++s) {
          Rng rng(seed, s);
          x.clear();
          for (int i = 0; i < n; ++i) sampler.step(x, rng);
          auto fwd = retract(mu.rank, x);
          auto bwd = retract(mu.rank, invert(x));
          double coef = coef_pi<double>(x, phi, psi) / xs[static_cast<size_t>(x.length())];
          double reduced = phi.value_at_point(bwd) * psi.value_at_point(fwd);
          a.add(std::fabs(w.value_at_point(fwd) * (coef - reduced)));
        }
        return a;
      },
      [](MeanAcc& into, const MeanAcc& part) { into.merge(part); });
  return {acc.mean(), acc.stderr_(), samples};
}

CyclicityResult cyclicity_residual(const StepFnX& target, int radius, long long cap) {
  const int rank = target.rank;
  auto words = ball(rank, radius, cap);
  const auto n = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double v =
          harish_chandra_length(rank, multiply(invert(words[static_cast<size_t>(j)]),
                                               words[static_cast<size_t>(i)])
                                          .length())
              .value();
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  Eigen::VectorXd b(n);
  StepFnX one = StepFnX::one(rank);
  for (Eigen::Index i = 0; i < n; ++i)
    b(i) = coef_pi(words[static_cast<size_t>(i)], one, target).value();
  double t2 = inner(target, target).value();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const auto& vals = eig.eigenvalues();
  double lmax = vals(n - 1);
  CyclicityResult res;
  res.condition = vals(0) > 0 ? lmax / vals(0) : std::numeric_limits<double>::infinity();
  res.ridge_used = !(res.condition < 1e12);
  res.target_norm = std::sqrt(std::max(0.0, t2));

  Eigen::VectorXd bt = eig.eigenvectors().transpose() * b;
  auto residual_with = [&](double ridge, bool truncate) {
    Eigen::VectorXd ct(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double lam = vals(i);
      if (truncate && lam <= lmax * 1e-13) {
        ct(i) = 0;
        continue;
      }
      ct(i) = bt(i) / (lam + ridge);
    }
    double r2 = t2;
    for (Eigen::Index i = 0; i < n; ++i) r2 += ct(i) * ct(i) * vals(i) - 2 * bt(i) * ct(i);
    return std::sqrt(std::max(0.0, r2));
  };
  res.raw_residual = residual_with(0.0, true);
  res.ridge_residual = residual_with(res.ridge_used ? 1e-12 : 0.0, !res.ridge_used);
  return res;
}

}  // namespace hypwalk
