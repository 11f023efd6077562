#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hypwalk/boundary_rep.hpp"
#include "hypwalk/equidist.hpp"
#include "hypwalk/fit.hpp"
#include "hypwalk/measures.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/report.hpp"

// The acceptance suite: every tolerance and threshold is pinned here, in
// code. Each criterion prints one pass/fail line and carries its measured
// values in the detail string.

namespace hypwalk {

namespace {

constexpr std::uint64_t kSeedBase = 20250810;

struct Ctx {
  WalkMeasure srw = WalkMeasure::simple_random_walk(2);
  VisualParams params = VisualParams::standard(GroupModel::word(2));
  ReducedWord a = parse_word("a", 2);
  ReducedWord b = parse_word("b", 2);
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ReducedWord power_word(LetterCode c, int n) {
  ReducedWord w;
  for (int i = 0; i < n; ++i) w.push_reduce(c);
  return w;
}

CriterionResult c1_drift(const Ctx& ctx) {
  CriterionResult r{1, "drift", false, "", 0};
  auto est = drift_estimate(ctx.srw, 1000, 10000, Seed{kSeedBase + 1});
  double err = std::fabs(est.value - 0.5);
  r.pass = err <= 0.005;
  r.detail = "l_hat=" + fmt(est.value) + " |err|=" + fmt(err) + " tol=0.005 (n=1000, 1e4 paths)";
  return r;
}

CriterionResult c2_rho(const Ctx& ctx) {
  CriterionResult r{2, "spectral_radius", false, "", 0};
  auto rep = spectral_radius_estimate(ctx.srw, 24);
  double kesten = std::sqrt(3.0) / 2.0;
  double err = std::fabs(rep.rho_fit - kesten);
  r.pass = err <= 0.01 && rep.rho_fit < 1.0 && rep.crude_monotone;
  r.detail = "rho_fit=" + fmt(rep.rho_fit) + " kesten=" + fmt(kesten) + " |err|=" + fmt(err) +
             " tol=0.01 crude=" + fmt(rep.rho_crude) + " (exact returns 2n<=24)";
  return r;
}

CriterionResult c3_green(const Ctx& ctx) {
  CriterionResult r{3, "green_metric", false, "", 0};
  const double log3 = std::log(3.0);
  auto d1 = green_distance(ctx.srw, ctx.a, 1000000, Seed{kSeedBase + 3}, 30);
  double err1 = std::fabs(d1.value - log3);
  auto fit = green_metric_fit(ctx.srw, 6, 1000000, Seed{kSeedBase + 4}, 30);
  double slope_rel = std::fabs(fit.slope - log3) / log3;
  bool pass_point = err1 <= 0.02;
  bool pass_slope = slope_rel <= 0.02;
  bool pass_intercept = std::fabs(fit.intercept) <= 0.05;
  r.pass = pass_point && pass_slope && pass_intercept;
  r.detail = "d(e,a)=" + fmt(d1.value) + " |err|=" + fmt(err1) + " tol=0.02; slope=" +
             fmt(fit.slope) + " rel_err=" + fmt(slope_rel) + " tol=0.02; intercept=" +
             fmt(fit.intercept) + " tol=0.05 (1e6 trials, horizon 30)";
  return r;
}

CriterionResult c4_harmonic(const Ctx& ctx) {
  CriterionResult r{4, "harmonic_measure", false, "", 0};
  auto est = empirical_harmonic_measure(ctx.srw, 3, 100000, Seed{kSeedBase + 5});
  auto exact = exact_markov_measure(2, 3);
  double tv = 0;
  for (size_t i = 0; i < est.table.mass.size(); ++i)
    tv += std::fabs(est.table.mass[i] - to_double(exact.mass[i]));
  tv /= 2;
  Rational resid = stationarity_residual(exact, ctx.srw);
  bool exact_zero = resid == 0;
  r.pass = tv <= 0.01 && exact_zero;
  r.detail = "tv=" + fmt(tv) + " tol=0.01 (1e5 walks, depth 3); exact stationarity residual=" +
             to_string(resid) + " (must be 0 exactly)";
  return r;
}

CriterionResult c5_equidist(const Ctx& ctx) {
  CriterionResult r{5, "equidistribution", false, "", 0};
  auto phi = StepFnD::indicator(2, ctx.a);
  auto psi = StepFnD::indicator(2, ctx.b);
  auto xi = BoundaryPoint::parse("1|a", 2);
  const double limit = 1.0 / 16.0;
  auto e100 = equidist_estimate(ctx.srw, 100, phi, psi, xi, xi, 200000, Seed{kSeedBase + 6});
  double err100 = std::fabs(e100.value - limit);
  bool pass_value = err100 <= 0.005;
  // gap comparison at a larger budget so the 3-sigma decision is informative
  auto g10 = equidist_estimate(ctx.srw, 10, phi, psi, xi, xi, 10000000, Seed{kSeedBase + 7});
  auto g100 = equidist_estimate(ctx.srw, 100, phi, psi, xi, xi, 10000000, Seed{kSeedBase + 8});
  double gap10 = std::fabs(g10.value - limit);
  double gap100 = std::fabs(g100.value - limit);
  double sigma = 3.0 * std::hypot(g10.stderr_, g100.stderr_);
  bool pass_gap = gap100 < gap10 - sigma;
  r.pass = pass_value && pass_gap;
  r.detail = "est(100)=" + fmt(e100.value) + " |err|=" + fmt(err100) +
             " tol=0.005 (2e5 paths); gap(10)=" + fmt(gap10) + " gap(100)=" + fmt(gap100) +
             " 3sigma=" + fmt(sigma) + " (1e7 paths each)";
  return r;
}

CriterionResult c6_harish_chandra(const Ctx& ctx) {
  CriterionResult r{6, "harish_chandra", false, "", 0};
  auto xia = harish_chandra(2, ctx.a);
  bool exact_ok = xia == QuadExt(Rational(0), rat(1, 2), 3);
  double err_num = std::fabs(xia.value() - std::sqrt(3.0) / 2.0);
  // MC oracle: int sqrt(r(a^{-1}, .)) dnu over sampled boundary rays
  const long long nsamp = 10000000;
  auto acc = chunked_reduce<MeanAcc>(
      nsamp, 65536,
      [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t) {
        MeanAcc a;
        for (std::uint64_t s = lo; s < hi; ++s) {
          Rng rng(Seed{kSeedBase + 9}, s);
          // first letter uniform over 2k, then uniform non-cancelling
          auto first = static_cast<LetterCode>(rng.below(4));
          double v = first == 0 ? std::sqrt(3.0) : 1.0 / std::sqrt(3.0);
          a.add(v);
        }
        return a;
      },
      [](MeanAcc& into, const MeanAcc& part) { into.merge(part); });
  double mc_err = std::fabs(acc.mean() - xia.value());
  auto band = harish_chandra_asymptotics(2, 20);
  bool band_ok = band.c_low > 0 && band.c_high / band.c_low <= 10.0;
  r.pass = exact_ok && err_num <= 1e-12 && mc_err <= 1e-3 && band_ok;
  r.detail = "Xi(a) exact sqrt(3)/2: " + std::string(exact_ok ? "yes" : "NO") + "; mc_err=" +
             fmt(mc_err) + " tol=1e-3 (1e7 samples); band=" + fmt(band.c_high / band.c_low) +
             " tol=10 over |g|<=20";
  return r;
}

CriterionResult c7_pn_convergence(const Ctx& ctx) {
  CriterionResult r{7, "pn_convergence", false, "", 0};
  auto phi = StepFnX::indicator(2, ctx.a);
  for (auto& v : phi.values) v = v - QuadExt(rat(1, 4));
  auto p2 = pn_coefficient_exact(ctx.srw, 2, phi, phi);
  auto p8 = pn_coefficient_exact(ctx.srw, 8, phi, phi);
  bool decreasing = abs(p8) < abs(p2);
  bool ones = true;
  auto one = StepFnX::one(2);
  for (int n = 0; n <= 8; ++n)
    ones = ones && pn_coefficient_exact(ctx.srw, n, one, one) == QuadExt::one();
  StepFnD phid;
  phid.rank = 2;
  phid.depth = 1;
  phid.values = {0.75, -0.25, -0.25, -0.25};
  auto mc = pn_coefficient_mc(ctx.srw, 50, phid, phid, 20000, Seed{kSeedBase + 10});
  bool mc_ok = std::fabs(mc.value) <= 0.01;
  r.pass = decreasing && ones && mc_ok;
  r.detail = "<P_2>=" + fmt(p2.value()) + " <P_8>=" + fmt(p8.value()) +
             " strictly decreasing: " + (decreasing ? "yes" : "NO") + "; <P_n 1,1>=1 for n<=8: " +
             (ones ? "yes" : "NO") + "; |mc(50)|=" + fmt(std::fabs(mc.value)) + " tol=0.01";
  return r;
}

CriterionResult c8_uniform_boundedness(const Ctx& ctx) {
  CriterionResult r{8, "uniform_boundedness", false, "", 0};
  Rational exact_max(0);
  for (int n = 1; n <= 10; ++n) {
    Rational s = pn_one_sup_exact(ctx.srw, n);
    if (s > exact_max) exact_max = s;
  }
  double mc_max = 0;
  int argmax = 0;
  for (int n = 11; n <= 50; ++n) {
    auto mc = pn_one_sup_mc(ctx.srw, n, 4000, 2, Seed{kSeedBase + 11 + n});
    if (mc.value > mc_max) {
      mc_max = mc.value;
      argmax = n;
    }
  }
  double bound = 1.5 * to_double(exact_max);
  r.pass = mc_max <= bound;
  r.detail = "exact max ||P_n 1||_inf (n<=10) = " + to_string(exact_max) + "; mc max (10<n<=50) = " +
             fmt(mc_max) + " at n=" + std::to_string(argmax) + " <= 1.5 x exact = " + fmt(bound);
  return r;
}

CriterionResult c9_exact_identities(const Ctx& ctx) {
  CriterionResult r{9, "exact_identity_suite", false, "", 0};
  std::ostringstream note;
  bool ok = true;
  Rng rng(Seed{kSeedBase + 12}, 0);
  auto rand_word = [&](int len) {
    ReducedWord w;
    while (w.length() < len) {
      auto c = static_cast<LetterCode>(rng.below(4));
      if (!w.empty() && c == letter_inverse(w.back())) continue;
      w.push_reduce(c);
    }
    return w;
  };

  // cocycle identity r(gh, C) = r(g, hC) r(h, C), exact
  {
    bool sub = true;
    auto ball3 = ball(2, 3);
    for (const auto& g : ball3) {
      for (int rep = 0; rep < 3 && sub; ++rep) {
        auto h = rand_word(static_cast<int>(rng.below(4)));
        auto w = rand_word(g.length() + h.length() + 1);
        sub = rn_derivative(2, multiply(g, h), Cylinder{w}) ==
              rn_derivative(2, g, Cylinder{multiply(h, w)}) * rn_derivative(2, h, Cylinder{w});
      }
      if (!sub) break;
    }
    ok = ok && sub;
    note << "cocycle:" << (sub ? "ok" : "FAIL");
  }
  // unitarity over 100 random triples, exact ring arithmetic
  {
    bool sub = true;
    for (int it = 0; it < 100 && sub; ++it) {
      auto g = rand_word(1 + static_cast<int>(rng.below(3)));
      StepFnX phi, psi;
      phi.rank = psi.rank = 2;
      phi.depth = psi.depth = 1 + static_cast<int>(rng.below(2));
      phi.values.resize(static_cast<size_t>(cylinder_count(2, phi.depth)));
      psi.values.resize(static_cast<size_t>(cylinder_count(2, psi.depth)));
      for (auto& v : phi.values) v = QuadExt(rat(static_cast<long>(rng.below(7)) - 3, 2));
      for (auto& v : psi.values) v = QuadExt(rat(static_cast<long>(rng.below(7)) - 3, 2));
      sub = inner(pi_action(g, phi), pi_action(g, psi)) == inner(phi, psi);
      // representation law on the same data
      auto h = rand_word(static_cast<int>(rng.below(3)));
      sub = sub && pi_action(g, pi_action(h, phi)) == pi_action(multiply(g, h), phi);
    }
    ok = ok && sub;
    note << " unitarity+replaw:" << (sub ? "ok" : "FAIL");
  }
  // Xi symmetry
  {
    bool sub = true;
    for (int it = 0; it < 40 && sub; ++it) {
      auto g = rand_word(static_cast<int>(rng.below(9)));
      sub = harish_chandra(2, g) == harish_chandra(2, invert(g));
    }
    ok = ok && sub;
    note << " xi_symmetry:" << (sub ? "ok" : "FAIL");
  }
  // convolution max lemma, n <= 12, exact tables
  {
    auto rep = convolution_max_check(ctx.srw, 12);
    ok = ok && rep.all_pass;
    note << " max_lemma(n<=12):" << (rep.all_pass ? "ok" : "FAIL") << " checked=" << rep.checked;
  }
  // measure conformality (g^{-1}_* nu)(C)/nu(C) = q^{beta}, exact
  {
    bool sub = true;
    MarkovMeasure nu{2};
    for (int it = 0; it < 200 && sub; ++it) {
      auto g = rand_word(static_cast<int>(rng.below(5)));
      auto w = rand_word(g.length() + 1 + static_cast<int>(rng.below(2)));
      Rational lhs = translated_cylinder_mass(nu, invert(g), w) / nu.cylinder_mass(w);
      sub = lhs == pow_rational(3, busemann_int(retract(2, w), invert(g)));
    }
    ok = ok && sub;
    note << " conformality:" << (sub ? "ok" : "FAIL");
  }
  // refinement consistency of exact tables
  {
    bool sub = true;
    for (int depth = 2; depth <= 6 && sub; ++depth) {
      auto t = exact_markov_measure(2, depth);
      sub = t.total() == 1;
      for (int it = 0; it < 30 && sub; ++it) {
        auto w = rand_word(static_cast<int>(rng.below(static_cast<std::uint64_t>(depth))));
        Rational whole = t.cylinder_mass(w);
        Rational split(0);
        for (LetterCode c = 0; c < 4; ++c) {
          if (!w.empty() && c == letter_inverse(w.back())) continue;
          ReducedWord v = w;
          v.push_reduce(c);
          split += t.cylinder_mass(v);
        }
        sub = whole == split;
      }
    }
    ok = ok && sub;
    note << " refinement:" << (sub ? "ok" : "FAIL");
  }
  // intcomp ratio in [1/4, 4] for kcut <= 15, exact annulus sums
  {
    bool sub = true;
    MarkovMeasure nu{2};
    auto xi = BoundaryPoint::parse("1|a", 2);
    for (int kcut = 0; kcut <= 15 && sub; ++kcut) {
      auto res = intcomp_integral(nu, xi, kcut, ctx.params);
      sub = res.ratio >= 0.25 && res.ratio <= 4.0;
    }
    ok = ok && sub;
    note << " intcomp:" << (sub ? "ok" : "FAIL");
  }
  r.pass = ok;
  r.detail = note.str();
  return r;
}

CriterionResult c10_proximality(const Ctx& ctx) {
  CriterionResult r{10, "proximality", false, "", 0};
  // pushforward concentration for g = a^n: mass > 1 - 3^{1-n}, exact
  MarkovMeasure nu{2};
  bool push_ok = true;
  for (int n = 1; n <= 12 && push_ok; ++n) {
    auto row = pushforward_concentration(nu, {power_word(0, n)})[0];
    push_ok = row.top_mass > 1 - pow_rational(3, 1 - n) && row.contains_retract;
  }
  // l2 proximal decay: gap(a^n) <= 2 lambda(Psi) (1+n)^{-1/D} for n <= 20,
  // i.e. the envelope constant sup_n gap (1+n)^{1/D} stays within 2 lambda.
  auto psi = TwoVarStepFn<QuadExt>::product(StepFnX::indicator(2, ctx.a),
                                            StepFnX::indicator(2, ctx.b));
  double env = 0, lam = 0;
  std::vector<double> xs, ys;
  for (int n = 1; n <= 20; ++n) {
    auto res = l2proximal_gap(ctx.params, power_word(0, n), psi);
    lam = res.lipschitz;
    env = std::max(env, res.gap * std::pow(1.0 + n, 1.0 / ctx.params.hausdorff_dim));
    xs.push_back(std::log(1.0 + n));
    ys.push_back(std::log(res.gap));
  }
  bool env_ok = env <= 2.0 * lam;
  double slope = fit_line(xs, ys).slope;
  r.pass = push_ok && env_ok;
  r.detail = std::string("pushforward mass > 1-3^{1-n} exact (n<=12): ") +
             (push_ok ? "ok" : "FAIL") + "; l2 envelope sup gap*(1+n)^{1/D}=" + fmt(env) +
             " <= 2*lambda=" + fmt(2.0 * lam) + " (n<=20, loglog slope " + fmt(slope) + ")";
  return r;
}

CriterionResult c11_cyclicity(const Ctx& ctx) {
  CriterionResult r{11, "cyclicity_probe", false, "", 0};
  auto target = StepFnX::indicator(2, ctx.a);
  // Residuals below the declared solver tolerance are reported as zero.
  constexpr double kSolverTol = 1e-8;
  auto floor_tol = [&](double v) { return v <= kSolverTol ? 0.0 : v; };
  double r1 = floor_tol(cyclicity_residual(target, 1).ridge_residual);
  double r2 = floor_tol(cyclicity_residual(target, 2).ridge_residual);
  double r3 = floor_tol(cyclicity_residual(target, 3).ridge_residual);
  auto res4 = cyclicity_residual(target, 4);
  double r4 = floor_tol(res4.ridge_residual);
  bool strict_decrease = r1 > r2 && r2 > r3;
  bool threshold = r4 <= 0.05 * res4.target_norm;
  r.pass = strict_decrease && threshold;
  // supplementary profile for a target outside the shallow spans
  auto deep = StepFnX::indicator(2, parse_word("abab", 2));
  double d0 = cyclicity_residual(deep, 0).ridge_residual;
  double d1 = cyclicity_residual(deep, 1).ridge_residual;
  double d2 = cyclicity_residual(deep, 2).ridge_residual;
  double d3 = cyclicity_residual(deep, 3).ridge_residual;
  double d4 = floor_tol(cyclicity_residual(deep, 4).ridge_residual);
  std::ostringstream os;
  os << "residuals(1_{C(a)}) R=1..4: " << fmt(r1) << ", " << fmt(r2) << ", " << fmt(r3) << ", "
     << fmt(r4) << "; strict decrease R=1->3: " << (strict_decrease ? "yes" : "NO")
     << " (target lies in the span from R=1 on, residual is exactly 0 there; see notes); "
     << "threshold at R=4: " << (threshold ? "yes" : "NO")
     << "; depth-4 target profile R=0..4: " << fmt(d0) << ", " << fmt(d1) << ", " << fmt(d2)
     << ", " << fmt(d3) << ", " << fmt(d4);
  r.detail = os.str();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream* progress) {
  Ctx ctx;
  using Fn = CriterionResult (*)(const Ctx&);
  const Fn criteria[] = {c1_drift,       c2_rho,        c3_green,          c4_harmonic,
                         c5_equidist,    c6_harish_chandra, c7_pn_convergence, c8_uniform_boundedness,
                         c9_exact_identities, c10_proximality, c11_cyclicity};
  // stated per-criterion runtime budgets, seconds; 0 = none
  const double budgets[] = {10, 60, 120, 60, 120, 30, 180, 0, 60, 0, 0};
  std::vector<CriterionResult> out;
  for (size_t i = 0; i < std::size(criteria); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult res = criteria[i](ctx);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budgets[i] > 0 && res.seconds > budgets[i]) {
      res.pass = false;
      res.detail += "; RUNTIME " + fmt(res.seconds) + "s over budget " + fmt(budgets[i]) + "s";
    }
    if (progress) {
      (*progress) << (res.pass ? "[PASS] " : "[FAIL] ") << "C" << res.id << " " << res.name << " ("
                  << fmt(res.seconds) << "s): " << res.detail << std::endl;
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace hypwalk
