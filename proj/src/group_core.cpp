#include "hypwalk/group_core.hpp"

#include <cmath>

namespace hypwalk {

ReducedWord reduce(std::span<const Letter> letters) { return ReducedWord::from_letters(letters); }

ReducedWord multiply(const ReducedWord& u, const ReducedWord& v) {
  int t = cancellation(u, v);
  ReducedWord out = u.prefix(u.length() - t);
  for (int i = t; i < v.length(); ++i) out.push_reduce(v.code(i));
  return out;
}

ReducedWord invert(const ReducedWord& g) {
  ReducedWord out;
  for (int i = g.length() - 1; i >= 0; --i) out.push_reduce(letter_inverse(g.code(i)));
  return out;
}

int cancellation(const ReducedWord& u, const ReducedWord& v) {
  int t = 0;
  int max = std::min(u.length(), v.length());
  while (t < max && u.code(u.length() - 1 - t) == letter_inverse(v.code(t))) ++t;
  return t;
}

int common_prefix_length(const ReducedWord& u, const ReducedWord& v) {
  int t = 0;
  int max = std::min(u.length(), v.length());
  while (t < max && u.code(t) == v.code(t)) ++t;
  return t;
}

std::string format_word(const ReducedWord& w) {
  if (w.empty()) return "1";
  std::string s;
  s.reserve(static_cast<size_t>(w.length()));
  for (LetterCode c : w.codes()) {
    int idx = c / 2;
    s.push_back(static_cast<char>(((c & 1) ? 'A' : 'a') + idx));
  }
  return s;
}

ReducedWord parse_word(const std::string& s, int rank) {
  if (rank < 2 || rank > 26) throw Error(Errc::bad_parameter, "rank must be in [2, 26]");
  ReducedWord w;
  if (s == "1" || s.empty()) return w;
  for (char ch : s) {
    LetterCode c;
    if (ch >= 'a' && ch < 'a' + rank) {
      c = static_cast<LetterCode>(2 * (ch - 'a'));
    } else if (ch >= 'A' && ch < 'A' + rank) {
      c = static_cast<LetterCode>(2 * (ch - 'A') + 1);
    } else {
      throw Error(Errc::bad_parameter, std::string("bad letter '") + ch + "' for rank " +
                                           std::to_string(rank));
    }
    w.push_reduce(c);
  }
  return w;
}

long long sphere_size(int rank, int radius) {
  if (radius == 0) return 1;
  long long s = 2 * rank;
  for (int i = 1; i < radius; ++i) s *= 2 * rank - 1;
  return s;
}

long long ball_size(int rank, int radius) {
  long long total = 0;
  for (int r = 0; r <= radius; ++r) total += sphere_size(rank, r);
  return total;
}

namespace {

void extend_sphere(int rank, const std::vector<ReducedWord>& cur, std::vector<ReducedWord>& next) {
  next.clear();
  next.reserve(cur.size() * static_cast<size_t>(2 * rank - 1) + 1);
  for (const ReducedWord& w : cur) {
    for (LetterCode c = 0; c < 2 * rank; ++c) {
      if (!w.empty() && c == letter_inverse(w.back())) continue;
      ReducedWord x = w;
      x.push_reduce(c);
      next.push_back(std::move(x));
    }
  }
}

}  // namespace

std::vector<ReducedWord> sphere(int rank, int radius, long long cap) {
  if (sphere_size(rank, radius) > cap)
    throw_cap_exceeded("sphere enumeration", sphere_size(rank, radius));
  std::vector<ReducedWord> cur{ReducedWord{}};
  std::vector<ReducedWord> next;
  for (int r = 0; r < radius; ++r) {
    extend_sphere(rank, cur, next);
    cur.swap(next);
  }
  return cur;
}

std::vector<ReducedWord> ball(int rank, int radius, long long cap) {
  if (ball_size(rank, radius) > cap) throw_cap_exceeded("ball enumeration", ball_size(rank, radius));
  std::vector<ReducedWord> out{ReducedWord{}};
  std::vector<ReducedWord> cur{ReducedWord{}};
  std::vector<ReducedWord> next;
  for (int r = 0; r < radius; ++r) {
    extend_sphere(rank, cur, next);
    out.insert(out.end(), next.begin(), next.end());
    cur.swap(next);
  }
  return out;
}

GroupModel GroupModel::green_rescaled(int k) {
  return GroupModel{k, MetricKind::green_rescaled, std::log(static_cast<double>(2 * k - 1))};
}

double GroupModel::critical_exponent() const {
  return std::log(static_cast<double>(q())) / scale;
}

int GroupModel::word_distance(const ReducedWord& x, const ReducedWord& y) const {
  // d(x, y) = |x^{-1} y|; on the tree this is |x| + |y| - 2 * common prefix.
  return x.length() + y.length() - 2 * common_prefix_length(x, y);
}

}  // namespace hypwalk
