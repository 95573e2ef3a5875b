#ifndef SIEVELAB_LATTICE_HPP
#define SIEVELAB_LATTICE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sievelab/numeric.hpp"

namespace sievelab::lattice {

using Int = std::int64_t;

// Coordinate magnitude caps keeping every predicate inside __int128.
constexpr Int kMaxCoord3 = Int(1) << 19;
constexpr Int kMaxCoord2 = Int(1) << 30;
constexpr Int kMaxCoord1 = Int(1) << 60;

struct Point {
  int d = 0;
  std::array<Int, 3> x{0, 0, 0};

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point& a, const Point& b) {
    return a.x <=> b.x;
  }
};

struct QPoint {
  int d = 0;
  std::array<Rational, 3> x;
};

// The box [-N_1,N_1] x ... x [-N_d,N_d].
struct Box {
  int d = 0;
  std::array<Int, 3> half{0, 0, 0};

  BigInt lattice_count() const;          // prod (2 N_i + 1)
  BigInt eps_lattice_count(const Rational& eps) const;  // |P_eps|
  bool contains(const Point& p) const;
};

// Inequality n.x <= offset with primitive integer normal.
struct Facet {
  std::array<Int, 3> normal{0, 0, 0};
  Int offset = 0;
  std::vector<int> cycle;  // vertex indices, oriented; d=2: the edge pair
};

struct Hull {
  int d = 0;
  int affine_dim = -1;
  std::vector<Point> points;    // deduplicated generators
  std::vector<Point> vertices;  // extreme points
  std::vector<Facet> facets;    // populated iff affine_dim == d
  Rational volume;

  bool full_dim() const { return affine_dim == d; }
  bool contains(const Point& p) const;
  bool contains(const QPoint& q) const;
  // q in t * hull (dilation about the origin)
  bool contains_dilated(const Rational& t, const QPoint& q) const;

  nlohmann::json to_json() const;
};

// Exact convex hull for d in {1,2,3}: interval, monotone chain, or gift
// wrapping with polygonal facets.  Degenerate inputs are flagged with
// their affine dimension and carry vertices but no facets.
Hull convex_hull(const std::vector<Point>& pts, int d);

struct VolumeBoundReport {
  Rational volume;
  Rational c_measured;        // volume / |P|
  bool precondition_ok = true;  // |A| >= alpha |P|
  bool bound_positive = false;  // volume > 0

  nlohmann::json to_json() const;
};

VolumeBoundReport check_volume_bound(const std::vector<Point>& a,
                                     const Box& box, double alpha);

struct InscribeResult {
  Point x0;
  Rational beta;       // certified scale after lattice rounding
  Rational beta_lp;    // LP optimum before rounding
  QPoint x0_lp;
  bool certified = false;  // all corners of x0 + beta P pass every facet

  nlohmann::json to_json() const;
};

// Maximizes beta with x0 + beta P inside hull(A) by exact LP over the
// facet system, then rounds x0 to the best neighbouring lattice point.
InscribeResult inscribe_box(const std::vector<Point>& a, const Box& box);

// |(C \ C') ∩ Z^d| for C' = (1-gamma) C + gamma x0, by exact enumeration
// over the hull's bounding box.
std::uint64_t boundary_shell_count(const Hull& hull, const Point& x0,
                                   const Rational& gamma,
                                   std::uint64_t budget = 100000000ULL);

struct Regularized {
  std::vector<Point> kept;
  double epsilon = 0.0;
  std::uint64_t removed = 0;
  unsigned passes = 1;

  nlohmann::json to_json() const;
};

// Cover-and-delete regularization: drops the translates of P_{eps/2}
// holding at most eps |P_eps| points, then re-checks the per-point
// regularity predicate directly, iterating if needed.
Regularized epsilon_regularize(const std::vector<Point>& a, const Box& box,
                               double epsilon);

// Literal per-point check: every a in A has >= eps |P_eps| members of A
// inside a + P_eps.
bool is_epsilon_regular(const std::vector<Point>& a, const Box& box,
                        double epsilon);

struct SFDecomposition {
  QPoint residual;
  std::vector<Point> parts;    // k - d elements of B
  bool residual_certified = false;  // residual in d * hull(B)

  nlohmann::json to_json() const;
};

// Writes x in k*hull(B) as residual + (k-d)-part sum with the residual in
// d*hull(B): basic feasible weights from an exact simplex, integer parts
// split off, remainder certified by the d-dilate's facets.
SFDecomposition shapley_folkman_decompose(const std::vector<Point>& b,
                                          unsigned k, const QPoint& x);

struct PopularSFReport {
  std::uint64_t count = 0;  // ways to write x = y + a, y in k C', a in A
  Rational delta;           // count / |P|
  Rational delta_reference; // eps^(d+1) prod N_i / |P|
  Rational beta;
  Point x0;
  bool arity_ok = true;          // k > d
  bool eps_regular_ok = true;
  bool eps_le_beta_gamma = true;
  bool x_in_hypothesis = true;   // x in (k+1) C'

  nlohmann::json to_json() const;
};

PopularSFReport popular_sf_density(const std::vector<Point>& a, const Box& box,
                                   double gamma, double epsilon, unsigned k,
                                   const QPoint& x);

// JSON helpers shared by the CLI: points as arrays of integer arrays.
std::vector<Point> points_from_json(const nlohmann::json& doc);
QPoint qpoint_from_json(const nlohmann::json& doc);

}  // namespace sievelab::lattice

#endif  // SIEVELAB_LATTICE_HPP
