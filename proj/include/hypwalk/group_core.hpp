#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypwalk/errors.hpp"

namespace hypwalk {

// Letters of F_k are encoded as 2*index + (sign < 0), index in [0, k).
// The inverse letter is obtained by flipping the low bit.
using LetterCode = std::uint8_t;

inline constexpr LetterCode letter_inverse(LetterCode c) { return c ^ 1u; }

struct Letter {
  int index;  // 1..k
  int sign;   // +1 or -1

  LetterCode code() const { return static_cast<LetterCode>(2 * (index - 1) + (sign < 0)); }
  static Letter from_code(LetterCode c) { return Letter{c / 2 + 1, (c & 1) ? -1 : +1}; }
};

// Freely reduced word over the generators of F_k; the empty word is the
// identity. Words double as orbit points of the Cayley tree (o = e).
class ReducedWord {
 public:
  ReducedWord() = default;

  static ReducedWord from_codes(std::span<const LetterCode> codes) {
    ReducedWord w;
    for (LetterCode c : codes) w.push_reduce(c);
    return w;
  }
  static ReducedWord from_letters(std::span<const Letter> letters) {
    ReducedWord w;
    for (const Letter& l : letters) w.push_reduce(l.code());
    return w;
  }

  int length() const { return static_cast<int>(ls_.size()); }
  bool empty() const { return ls_.empty(); }
  LetterCode code(int i) const { return ls_[static_cast<size_t>(i)]; }
  Letter letter(int i) const { return Letter::from_code(code(i)); }
  LetterCode front() const { return ls_.front(); }
  LetterCode back() const { return ls_.back(); }

  // Appends one letter with free cancellation against the current last letter.
  void push_reduce(LetterCode c) {
    if (!ls_.empty() && ls_.back() == letter_inverse(c)) {
      ls_.pop_back();
    } else {
      ls_.push_back(c);
    }
  }
  void pop_back() { ls_.pop_back(); }
  void clear() { ls_.clear(); }

  ReducedWord prefix(int n) const {
    ReducedWord w;
    w.ls_.assign(ls_.begin(), ls_.begin() + n);
    return w;
  }

  const std::vector<LetterCode>& codes() const { return ls_; }

  friend auto operator<=>(const ReducedWord&, const ReducedWord&) = default;

 private:
  std::vector<LetterCode> ls_;
};

struct WordHash {
  size_t operator()(const ReducedWord& w) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (LetterCode c : w.codes()) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return static_cast<size_t>(h ^ (h >> 32));
  }
};

ReducedWord reduce(std::span<const Letter> letters);
ReducedWord multiply(const ReducedWord& u, const ReducedWord& v);
ReducedWord invert(const ReducedWord& g);

// Number of letter pairs cancelled when forming u*v.
int cancellation(const ReducedWord& u, const ReducedWord& v);
int common_prefix_length(const ReducedWord& u, const ReducedWord& v);

// String form: index i with sign + is 'a'+i, sign - is 'A'+i; identity is "1".
std::string format_word(const ReducedWord& w);
ReducedWord parse_word(const std::string& s, int rank);

// Closed-form sphere/ball cardinalities: |S(0)| = 1, |S(n)| = 2k(2k-1)^{n-1}.
long long sphere_size(int rank, int radius);
long long ball_size(int rank, int radius);

inline constexpr long long kDefaultEnumerationCap = 4'000'000;

std::vector<ReducedWord> sphere(int rank, int radius, long long cap = kDefaultEnumerationCap);
std::vector<ReducedWord> ball(int rank, int radius, long long cap = kDefaultEnumerationCap);

enum class MetricKind { word, green_rescaled };

// The metric structure on X = F_k: the word metric, or the word metric scaled
// by a constant s > 0. s = log(2k-1) reproduces the Green metric of the simple
// random walk (calibrated in walk_engine), giving delta_Gamma = 1.
struct GroupModel {
  int rank = 2;
  MetricKind kind = MetricKind::word;
  double scale = 1.0;

  static GroupModel word(int k) { return GroupModel{k, MetricKind::word, 1.0}; }
  static GroupModel green_rescaled(int k);

  int q() const { return 2 * rank - 1; }
  // Exponential growth rate of spheres for the active metric.
  double critical_exponent() const;
  int word_distance(const ReducedWord& x, const ReducedWord& y) const;
  double distance(const ReducedWord& x, const ReducedWord& y) const {
    return scale * word_distance(x, y);
  }
  double length(const ReducedWord& g) const { return scale * g.length(); }
};

}  // namespace hypwalk
