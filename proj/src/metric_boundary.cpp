#include "hypwalk/metric_boundary.hpp"

#include <cmath>

namespace hypwalk {

long long cylinder_count(int rank, int depth) {
  return depth == 0 ? 1 : sphere_size(rank, depth);
}

long long cylinder_index(int rank, const ReducedWord& w) {
  if (w.empty()) return 0;
  long long idx = w.code(0);
  for (int i = 1; i < w.length(); ++i) {
    LetterCode prev_inv = letter_inverse(w.code(i - 1));
    LetterCode c = w.code(i);
    long long r = c - (c > prev_inv ? 1 : 0);
    idx = idx * (2 * rank - 1) + r;
  }
  return idx;
}

ReducedWord cylinder_word(int rank, int depth, long long index) {
  if (depth == 0) return {};
  std::vector<long long> digits(static_cast<size_t>(depth));
  for (int i = depth - 1; i >= 1; --i) {
    digits[static_cast<size_t>(i)] = index % (2 * rank - 1);
    index /= 2 * rank - 1;
  }
  digits[0] = index;
  ReducedWord w;
  w.push_reduce(static_cast<LetterCode>(digits[0]));
  for (int i = 1; i < depth; ++i) {
    LetterCode prev_inv = letter_inverse(w.back());
    auto r = static_cast<LetterCode>(digits[static_cast<size_t>(i)]);
    LetterCode c = r + (r >= prev_inv ? 1 : 0);
    w.push_reduce(c);
  }
  return w;
}

BoundaryPoint BoundaryPoint::periodic(ReducedWord head, ReducedWord tail) {
  if (tail.empty()) throw Error(Errc::bad_parameter, "periodic boundary point needs a tail");
  if (tail.back() == letter_inverse(tail.front()))
    throw Error(Errc::bad_parameter, "tail not cyclically reduced");
  if (!head.empty() && head.back() == letter_inverse(tail.front()))
    throw Error(Errc::bad_parameter, "head*tail junction not reduced");
  BoundaryPoint p;
  p.head_ = std::move(head);
  p.tail_ = std::move(tail);
  return p;
}

BoundaryPoint BoundaryPoint::approximate(ReducedWord w, int depth_limit) {
  BoundaryPoint p;
  p.limit_ = std::max(depth_limit, w.length());
  p.head_ = std::move(w);
  return p;
}

LetterCode BoundaryPoint::letter_at(int i) const {
  if (i < head_.length()) return head_.code(i);
  if (is_approximate())
    throw Error(Errc::insufficient_depth,
                "approximate boundary point queried past depth " + std::to_string(head_.length()));
  return tail_.code((i - head_.length()) % tail_.length());
}

ReducedWord BoundaryPoint::prefix(int n) const {
  ReducedWord w;
  for (int i = 0; i < n; ++i) w.push_reduce(letter_at(i));
  return w;
}

std::string BoundaryPoint::to_string() const {
  return format_word(head_) + "|" + (is_approximate() ? "" : format_word(tail_));
}

BoundaryPoint BoundaryPoint::parse(const std::string& s, int rank) {
  auto bar = s.find('|');
  if (bar == std::string::npos)
    throw Error(Errc::bad_parameter, "boundary point literal needs 'head|tail': " + s);
  ReducedWord head = parse_word(s.substr(0, bar), rank);
  std::string tail = s.substr(bar + 1);
  if (tail.empty()) return approximate(std::move(head));
  return periodic(std::move(head), parse_word(tail, rank));
}

bool BoundaryPoint::operator==(const BoundaryPoint& o) const {
  int depth = std::min(known_depth(), o.known_depth());
  if (depth == std::numeric_limits<int>::max()) {
    // Eventually periodic expansions agree everywhere iff they agree this far.
    depth = head_.length() + o.head_.length() + tail_.length() * o.tail_.length() + 1;
  }
  for (int i = 0; i < depth; ++i)
    if (letter_at(i) != o.letter_at(i)) return false;
  return true;
}

int gromov_product_int(const ReducedWord& x, const ReducedWord& y) {
  return common_prefix_length(x, y);
}

double gromov_product(const GroupModel& model, const ReducedWord& x, const ReducedWord& y) {
  // (|x| + |y| - d(x,y)) / 2 under the active metric.
  return model.scale * (x.length() + y.length() - model.word_distance(x, y)) / 2.0;
}

double gromov_product_at(const GroupModel& model, const ReducedWord& w, const ReducedWord& x,
                         const ReducedWord& y) {
  return model.scale *
         (model.word_distance(x, w) + model.word_distance(y, w) - model.word_distance(x, y)) / 2.0;
}

int gromov_product_int(const BoundaryPoint& xi, const ReducedWord& y) {
  int n = 0;
  int depth = std::min(y.length(), xi.known_depth());
  while (n < depth && xi.letter_at(n) == y.code(n)) ++n;
  if (n == y.length()) return n;
  if (n >= xi.known_depth())
    throw Error(Errc::insufficient_depth, "boundary product undecided at the truncation depth");
  return n;
}

namespace {
// Common prefix of two boundary points; -1 encodes equality.
int boundary_cp(const BoundaryPoint& xi, const BoundaryPoint& eta) {
  int depth = std::min(xi.known_depth(), eta.known_depth());
  bool exact = depth == std::numeric_limits<int>::max();
  if (exact) {
    depth = xi.head().length() + eta.head().length() +
            xi.tail().length() * eta.tail().length() + 1;
  }
  for (int n = 0; n < depth; ++n)
    if (xi.letter_at(n) != eta.letter_at(n)) return n;
  if (exact) return -1;
  throw Error(Errc::insufficient_depth,
              "truncated representatives agree beyond the comparison depth");
}
}  // namespace

double gromov_product_boundary(const GroupModel& model, const BoundaryPoint& xi,
                               const BoundaryPoint& eta) {
  int cp = boundary_cp(xi, eta);
  return cp < 0 ? kBoundaryInfinity : model.scale * cp;
}

double gromov_product_boundary(const GroupModel& model, const BoundaryPoint& xi,
                               const ReducedWord& y) {
  return model.scale * gromov_product_int(xi, y);
}

double gromov_product_boundary(const GroupModel& model, const Cylinder& c, const ReducedWord& y) {
  // Constant over the cylinder iff the divergence happens within its depth.
  int n = common_prefix_length(c.prefix, y);
  if (n == c.prefix.length() && y.length() > n)
    throw Error(Errc::insufficient_depth, "product not constant on the cylinder");
  return model.scale * n;
}

double delta_estimate(const GroupModel& model, int sample_size, int radius, Seed seed,
                      long long cap) {
  auto pts = ball(model.rank, radius, cap);
  Rng rng(seed, 0);
  double worst = 0.0;
  auto pick = [&]() -> const ReducedWord& { return pts[rng.below(pts.size())]; };
  for (int i = 0; i < sample_size; ++i) {
    const ReducedWord &x = pick(), &y = pick(), &z = pick(), &w = pick();
    double lhs = gromov_product_at(model, w, x, y);
    double rhs = std::min(gromov_product_at(model, w, x, z), gromov_product_at(model, w, z, y));
    worst = std::max(worst, rhs - lhs);
  }
  return worst;
}

double visual_kernel(const GroupModel& model, const VisualParams& p, const BoundaryPoint& xi,
                     const BoundaryPoint& eta) {
  double prod = gromov_product_boundary(model, xi, eta);
  return std::isinf(prod) ? 0.0 : std::exp(-p.epsilon * prod);
}

std::pair<double, double> chain_distance_bounds(const GroupModel& model, const VisualParams& p,
                                                const BoundaryPoint& xi, const BoundaryPoint& eta,
                                                double delta) {
  double eps_prime = std::exp(2.0 * delta * p.epsilon) - 1.0;
  if (eps_prime >= std::sqrt(2.0) - 1.0)
    throw Error(Errc::bad_parameter, "chain bounds need e^{2 delta eps} - 1 < sqrt(2) - 1");
  double rho = visual_kernel(model, p, xi, eta);
  return {(1.0 - 2.0 * eps_prime) * rho, rho};
}

int busemann_int(const BoundaryPoint& xi, const ReducedWord& x) {
  return 2 * gromov_product_int(xi, x) - x.length();
}

double busemann(const GroupModel& model, const BoundaryPoint& xi, const ReducedWord& x) {
  return model.scale * busemann_int(xi, x);
}

bool shadow_contains(const GroupModel& model, const ReducedWord& x, double R,
                     const BoundaryPoint& xi) {
  return gromov_product_boundary(model, xi, x) >= model.length(x) - R;
}

namespace {
LetterCode next_noncancelling(int rank, LetterCode after) {
  auto c = static_cast<LetterCode>((after + 1) % (2 * rank));
  if (c == letter_inverse(after)) c = static_cast<LetterCode>((c + 1) % (2 * rank));
  return c;
}
}  // namespace

BoundaryPoint retract(int rank, const ReducedWord& x) {
  (void)rank;
  ReducedWord tail;
  tail.push_reduce(x.empty() ? LetterCode{0} : x.back());  // e -> a^inf
  return BoundaryPoint::periodic(x, tail);
}

BoundaryPoint retract_alt(int rank, const ReducedWord& x) {
  if (x.empty()) {
    ReducedWord tail;
    tail.push_reduce(2);  // e -> b^inf
    return BoundaryPoint::periodic({}, tail);
  }
  LetterCode t1 = next_noncancelling(rank, x.back());
  LetterCode t2 = next_noncancelling(rank, t1);
  ReducedWord tail;
  tail.push_reduce(t1);
  tail.push_reduce(t2);
  return BoundaryPoint::periodic(x, tail);
}

BoundaryPoint act(const ReducedWord& g, const BoundaryPoint& xi) {
  if (g.empty()) return xi;
  if (xi.is_approximate()) {
    return BoundaryPoint::approximate(multiply(g, xi.head()));
  }
  // Expand past the seam (cancellation eats at most |g| letters), then rebuild
  // head plus rotated tail.
  const int period = xi.tail().length();
  const int expand = xi.head().length() + g.length() + period;
  ReducedWord head = multiply(g, xi.prefix(expand));
  const int rot = (expand - xi.head().length()) % period;
  ReducedWord tail;
  for (int i = 0; i < period; ++i) tail.push_reduce(xi.tail().code((rot + i) % period));
  // Strip trailing whole periods to keep representatives short.
  while (head.length() >= period) {
    bool match = true;
    for (int i = 0; i < period && match; ++i)
      if (head.code(head.length() - period + i) != tail.code(i)) match = false;
    if (!match) break;
    for (int i = 0; i < period; ++i) head.pop_back();
  }
  return BoundaryPoint::periodic(std::move(head), std::move(tail));
}

}  // namespace hypwalk
