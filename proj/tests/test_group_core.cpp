#include "hypwalk/group_core.hpp"

#include <cmath>

#include "doctest.h"
#include "hypwalk/rng.hpp"
#include "oracles.hpp"

using namespace hypwalk;

namespace {
ReducedWord W(const std::string& s, int k = 2) { return parse_word(s, k); }
}  // namespace

TEST_CASE("reduce: cancellation examples") {
  Letter a{1, +1}, ainv{1, -1}, b{2, +1}, binv{2, -1};
  std::vector<Letter> v1{a, ainv};
  CHECK(reduce(v1).empty());
  std::vector<Letter> v2{a, b, binv, a};
  CHECK(format_word(reduce(v2)) == "aa");
}

TEST_CASE("reduce: random inputs match naive fixpoint oracle") {
  Rng rng(Seed{11}, 0);
  for (int it = 0; it < 200; ++it) {
    auto codes = oracle::random_codes(rng, 2, 50);
    auto expect = oracle::naive_reduce(codes);
    auto got = ReducedWord::from_codes(codes);
    CHECK(got.codes() == expect);
  }
}

TEST_CASE("multiply: examples and reduce oracle") {
  CHECK(format_word(multiply(W("ab"), W("Ba"))) == "aa");
  Rng rng(Seed{12}, 0);
  for (int it = 0; it < 200; ++it) {
    auto g = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(12)));
    CHECK(multiply(g, ReducedWord{}) == g);
    CHECK(multiply(ReducedWord{}, g) == g);
    auto h = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(12)));
    std::vector<LetterCode> cat(g.codes());
    cat.insert(cat.end(), h.codes().begin(), h.codes().end());
    CHECK(multiply(g, h) == ReducedWord::from_codes(cat));
  }
}

TEST_CASE("multiply: associativity and inverses") {
  Rng rng(Seed{13}, 0);
  for (int it = 0; it < 100; ++it) {
    auto g = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(10)));
    auto h = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(10)));
    auto f = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(10)));
    CHECK(multiply(multiply(g, h), f) == multiply(g, multiply(h, f)));
    CHECK(multiply(g, invert(g)).empty());
  }
}

TEST_CASE("invert: examples and involution") {
  CHECK(format_word(invert(W("ab"))) == "BA");
  CHECK(invert(ReducedWord{}).empty());
  Rng rng(Seed{14}, 0);
  for (int it = 0; it < 100; ++it) {
    auto g = oracle::random_reduced_word(rng, 3, static_cast<int>(rng.below(14)));
    CHECK(invert(invert(g)) == g);
    CHECK(invert(g).length() == g.length());
  }
}

TEST_CASE("triangle inequality with cancellation criterion") {
  Rng rng(Seed{15}, 0);
  for (int it = 0; it < 200; ++it) {
    auto g = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(10)));
    auto h = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(10)));
    auto p = multiply(g, h);
    CHECK(p.length() <= g.length() + h.length());
    bool no_cancel = cancellation(g, h) == 0;
    CHECK((p.length() == g.length() + h.length()) == no_cancel);
  }
}

TEST_CASE("ball and sphere enumeration") {
  auto b0 = ball(2, 0);
  CHECK(b0.size() == 1);
  CHECK(b0[0].empty());

  auto b2 = ball(2, 2);
  CHECK(b2.size() == 17);  // 1 + 4 + 12

  for (int r = 0; r <= 6; ++r) {
    CHECK(static_cast<long long>(sphere(2, r).size()) == sphere_size(2, r));
  }
  CHECK(sphere_size(3, 2) == 30);
  CHECK(ball_size(2, 2) == 17);
}

TEST_CASE("sphere growth rate matches critical exponent") {
  // log|S(n)|/n -> log(2k-1); with the exact closed form the increments are
  // exactly log 3 from n = 1 on.
  for (int n = 2; n <= 9; ++n) {
    double incr = std::log(static_cast<double>(sphere_size(2, n))) -
                  std::log(static_cast<double>(sphere_size(2, n - 1)));
    CHECK(incr == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
  CHECK(GroupModel::word(2).critical_exponent() == doctest::Approx(std::log(3.0)));
}

TEST_CASE("ball cap guard reports required cap") {
  try {
    ball(2, 20, 1000);
    FAIL("expected cap_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::cap_exceeded);
    CHECK(e.required() == ball_size(2, 20));
  }
}

TEST_CASE("serialization round trip") {
  CHECK(format_word(ReducedWord{}) == "1");
  CHECK(parse_word("1", 2).empty());
  Rng rng(Seed{16}, 0);
  for (int it = 0; it < 100; ++it) {
    auto g = oracle::random_reduced_word(rng, 2, static_cast<int>(rng.below(16)));
    CHECK(parse_word(format_word(g), 2) == g);
  }
  // parsing reduces
  CHECK(parse_word("aA", 2).empty());
  CHECK_THROWS_AS(parse_word("xyz", 2), Error);
}

TEST_CASE("metric kinds") {
  auto wm = GroupModel::word(2);
  auto gm = GroupModel::green_rescaled(2);
  auto g = W("ab"), h = W("aB");
  CHECK(wm.word_distance(g, h) == 2);
  CHECK(gm.distance(g, h) == doctest::Approx(2.0 * std::log(3.0)));
  CHECK(gm.critical_exponent() == doctest::Approx(1.0));
}
