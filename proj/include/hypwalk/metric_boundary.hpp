#pragma once

#include <limits>
#include <string>
#include <utility>

#include "hypwalk/group_core.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

// C(w): the set of infinite reduced words extending the reduced prefix w.
// An empty prefix denotes all of the boundary.
struct Cylinder {
  ReducedWord prefix;

  int depth() const { return prefix.length(); }
  friend auto operator<=>(const Cylinder&, const Cylinder&) = default;
};

// Number of depth-m cylinders: 2k(2k-1)^{m-1}; m = 0 has the single cylinder
// denoting all of the boundary.
long long cylinder_count(int rank, int depth);
// Canonical index of a depth-|w| cylinder; refinements of a cylinder occupy a
// contiguous index block at each deeper level.
long long cylinder_index(int rank, const ReducedWord& w);
ReducedWord cylinder_word(int rank, int depth, long long index);

// Depth-first enumeration of all depth-m cylinder words in index order.
// Visit: void(const ReducedWord&, long long index)
template <typename Visit>
void for_each_cylinder(int rank, int depth, Visit visit) {
  ReducedWord w;
  long long index = 0;
  auto rec = [&](auto&& self, int d) -> void {
    if (d == depth) {
      visit(const_cast<const ReducedWord&>(w), index++);
      return;
    }
    for (LetterCode c = 0; c < 2 * rank; ++c) {
      if (!w.empty() && c == letter_inverse(w.back())) continue;
      w.push_reduce(c);
      self(self, d + 1);
      w.pop_back();
    }
  };
  rec(rec, 0);
}

inline constexpr int kDefaultExpansionDepth = 64;

// A point of the Gromov boundary: an eventually periodic infinite reduced
// word head * tail^inf, or a depth-limited truncation (approximate) when the
// tail is empty.
class BoundaryPoint {
 public:
  BoundaryPoint() = default;

  static BoundaryPoint periodic(ReducedWord head, ReducedWord tail);
  static BoundaryPoint approximate(ReducedWord w, int depth_limit = kDefaultExpansionDepth);

  bool is_approximate() const { return tail_.empty(); }
  const ReducedWord& head() const { return head_; }
  const ReducedWord& tail() const { return tail_; }
  // Depth to which letters are defined; unbounded for periodic points.
  int known_depth() const {
    return is_approximate() ? head_.length() : std::numeric_limits<int>::max();
  }
  int depth_limit() const { return limit_; }

  LetterCode letter_at(int i) const;
  ReducedWord prefix(int n) const;

  std::string to_string() const;
  static BoundaryPoint parse(const std::string& s, int rank);

  bool operator==(const BoundaryPoint& o) const;

 private:
  ReducedWord head_;
  ReducedWord tail_;   // empty = approximate truncation of head_
  int limit_ = kDefaultExpansionDepth;
};

// Visual kernel parameters: epsilon * hausdorff_dim = critical_exponent holds
// by construction.
struct VisualParams {
  double epsilon = 1.0;
  double hausdorff_dim = 0.0;
  double critical_exponent = 0.0;

  static VisualParams standard(const GroupModel& model, double epsilon = 1.0) {
    VisualParams p;
    p.epsilon = epsilon;
    p.critical_exponent = model.critical_exponent();
    p.hausdorff_dim = p.critical_exponent / epsilon;
    return p;
  }
};

inline constexpr double kBoundaryInfinity = std::numeric_limits<double>::infinity();

// Gromov products for the active metric. On the tree all products are
// (scaled) common-prefix lengths; the integer-valued versions are exact.
int gromov_product_int(const ReducedWord& x, const ReducedWord& y);
double gromov_product(const GroupModel& model, const ReducedWord& x, const ReducedWord& y);
// Product based at w instead of o.
double gromov_product_at(const GroupModel& model, const ReducedWord& w, const ReducedWord& x,
                         const ReducedWord& y);

int gromov_product_int(const BoundaryPoint& xi, const ReducedWord& y);
// +infinity sentinel when the points coincide (to the comparison depth);
// throws insufficient_depth if truncated representatives agree beyond their
// known depth.
double gromov_product_boundary(const GroupModel& model, const BoundaryPoint& xi,
                               const BoundaryPoint& eta);
double gromov_product_boundary(const GroupModel& model, const BoundaryPoint& xi,
                               const ReducedWord& y);
double gromov_product_boundary(const GroupModel& model, const Cylinder& c, const ReducedWord& y);

// Max over sampled quadruples of min{(x|z)_w, (z|y)_w} - (x|y)_w, clamped
// below at 0. Identically 0 on trees.
double delta_estimate(const GroupModel& model, int sample_size, int radius, Seed seed,
                      long long cap = kDefaultEnumerationCap);

double visual_kernel(const GroupModel& model, const VisualParams& p, const BoundaryPoint& xi,
                     const BoundaryPoint& eta);

// ((1 - 2e') rho, rho) with e' = e^{2 delta epsilon} - 1; on the tree
// delta = 0 and the bounds collapse onto rho. Throws bad_parameter when
// e' >= sqrt(2) - 1.
std::pair<double, double> chain_distance_bounds(const GroupModel& model, const VisualParams& p,
                                                const BoundaryPoint& xi, const BoundaryPoint& eta,
                                                double delta = 0.0);

// beta_xi(x) = 2 (xi|x)_o - |x|_o, an exact (scaled) integer on the tree.
int busemann_int(const BoundaryPoint& xi, const ReducedWord& x);
double busemann(const GroupModel& model, const BoundaryPoint& xi, const ReducedWord& x);

// Shadow membership: (xi|x)_o >= |x|_o - R.
bool shadow_contains(const GroupModel& model, const ReducedWord& x, double R,
                     const BoundaryPoint& xi);

// Linear boundary retraction: extend x by repeating its last letter
// (convention: e maps to a^inf). Satisfies (f(x)|x)_o = |x|_o, i.e. R = 0.
BoundaryPoint retract(int rank, const ReducedWord& x);
// Second retraction with the same shadow property: extend by the alternating
// pair of cyclically-next non-cancelling letters (convention: e -> b^inf).
BoundaryPoint retract_alt(int rank, const ReducedWord& x);
// Retractions fix the boundary pointwise.
inline BoundaryPoint retract(int, const BoundaryPoint& xi) { return xi; }
inline BoundaryPoint retract_alt(int, const BoundaryPoint& xi) { return xi; }

// Exact action of g on a boundary point.
BoundaryPoint act(const ReducedWord& g, const BoundaryPoint& xi);

}  // namespace hypwalk
