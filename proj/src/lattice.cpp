#include "sievelab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"
#include "sievelab/linprog.hpp"

namespace sievelab::lattice {

namespace {

using I128 = __int128;

I128 dot_n(const std::array<Int, 3>& n, const Point& p, int d) {
  I128 s = 0;
  for (int i = 0; i < d; ++i) s += (I128)n[i] * p.x[i];
  return s;
}

Rational dot_q(const std::array<Int, 3>& n, const QPoint& q, int d) {
  Rational s = 0;
  for (int i = 0; i < d; ++i) s += Rational(n[i]) * q.x[i];
  return s;
}

std::array<I128, 3> cross(const std::array<I128, 3>& a,
                          const std::array<I128, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

std::array<I128, 3> diff(const Point& a, const Point& b) {
  return {(I128)a.x[0] - b.x[0], (I128)a.x[1] - b.x[1],
          (I128)a.x[2] - b.x[2]};
}

I128 det3(const std::array<I128, 3>& a, const std::array<I128, 3>& b,
          const std::array<I128, 3>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) -
         a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

Int gcd_int(Int a, Int b) {
  while (b) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

// Monotone chain over exact coordinates; returns indices in CCW order,
// strict turns only.  Collinear inputs come back as the two endpoints.
template <class T>
std::vector<int> chain2d(const std::vector<std::pair<T, T>>& pts) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a] < pts[b];
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](int a, int b) { return pts[a] == pts[b]; }),
            idx.end());
  const std::size_t n = idx.size();
  if (n <= 2) return idx;
  auto cross2 = [&](int o, int a, int b) {
    // sign of (a-o) x (b-o)
    auto& po = pts[o];
    auto& pa = pts[a];
    auto& pb = pts[b];
    if constexpr (std::is_same_v<T, Int>) {
      I128 v = (I128)(pa.first - po.first) * (pb.second - po.second) -
               (I128)(pa.second - po.second) * (pb.first - po.first);
      return v < 0 ? -1 : (v > 0 ? 1 : 0);
    } else {
      T v = (pa.first - po.first) * (pb.second - po.second) -
            (pa.second - po.second) * (pb.first - po.first);
      return v < 0 ? -1 : (v > 0 ? 1 : 0);
    }
  };
  std::vector<int> h(2 * n);
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (m >= 2 && cross2(h[m - 2], h[m - 1], idx[i]) <= 0) --m;
    h[m++] = idx[i];
  }
  std::size_t lower = m + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (m >= lower && cross2(h[m - 2], h[m - 1], idx[i]) <= 0) --m;
    h[m++] = idx[i];
  }
  h.resize(m - 1);  // last point equals the first
  return h;
}

Int coord_cap(int d) {
  switch (d) {
    case 1: return kMaxCoord1;
    case 2: return kMaxCoord2;
    default: return kMaxCoord3;
  }
}

void validate_points(const std::vector<Point>& pts, int d) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (pts.empty()) throw DomainError("need at least one point");
  Int cap = coord_cap(d);
  for (const auto& p : pts) {
    if (p.d != d) throw DomainError("point dimension mismatch");
    for (int i = 0; i < d; ++i)
      if (p.x[i] > cap || p.x[i] < -cap)
        throw DomainError("coordinate magnitude exceeds the exactness cap");
    for (int i = d; i < 3; ++i)
      if (p.x[i] != 0) throw DomainError("unused coordinates must be zero");
  }
}

// Gift wrapping with polygonal facets; every emitted facet is verified
// to support the whole point set.
class Wrap3 {
 public:
  explicit Wrap3(const std::vector<Point>& pts) : pts_(pts) {}

  std::vector<Facet> run() {
    seed();
    while (!queue_.empty()) {
      auto [p, q, ref] = queue_.front();
      queue_.pop_front();
      if (owned_.count({p, q})) continue;
      wrap_edge(p, q, ref);
    }
    return std::move(facets_);
  }

 private:
  I128 orient(int a, int b, int c, int q) const {
    return det3(diff(pts_[b], pts_[a]), diff(pts_[c], pts_[a]),
                diff(pts_[q], pts_[a]));
  }

  bool collinear(int a, int b, int c) const {
    auto v = cross(diff(pts_[b], pts_[a]), diff(pts_[c], pts_[a]));
    return v[0] == 0 && v[1] == 0 && v[2] == 0;
  }

  void seed() {
    int v0 = 0;
    for (int i = 1; i < (int)pts_.size(); ++i)
      if (pts_[i] < pts_[v0]) v0 = i;
    std::vector<int> s0;
    for (int i = 0; i < (int)pts_.size(); ++i)
      if (pts_[i].x[0] == pts_[v0].x[0]) s0.push_back(i);

    if (s0.size() >= 2) {
      std::vector<std::pair<Int, Int>> proj;
      proj.reserve(s0.size());
      for (int i : s0) proj.emplace_back(pts_[i].x[1], pts_[i].x[2]);
      std::vector<int> h = chain2d(proj);
      if (h.size() >= 3) {
        make_facet({-1, 0, 0}, -pts_[v0].x[0]);
        return;
      }
      // collinear: the segment between the extremes is a hull edge
      int e1 = s0[h[0]], e2 = s0[h[1]];
      wrap_edge(e1, e2, -1);
      return;
    }

    // unique x-minimum: hull edges from v0 are the extreme rays of the
    // central projection onto x = const
    std::vector<std::pair<Rational, Rational>> proj;
    std::vector<int> who;
    for (int i = 0; i < (int)pts_.size(); ++i) {
      if (i == v0) continue;
      I128 dx = (I128)pts_[i].x[0] - pts_[v0].x[0];
      proj.emplace_back(
          Rational(pts_[i].x[1] - pts_[v0].x[1]) / Rational((Int)dx),
          Rational(pts_[i].x[2] - pts_[v0].x[2]) / Rational((Int)dx));
      who.push_back(i);
    }
    std::vector<int> h = chain2d(proj);
    // farthest point on the extreme ray
    int pick = who[h[0]];
    for (int j = 0; j < (int)proj.size(); ++j)
      if (proj[j] == proj[h[0]] && pts_[who[j]].x[0] > pts_[pick].x[0])
        pick = who[j];
    wrap_edge(v0, pick, -1);
  }

  void wrap_edge(int p, int q, int f_ref) {
    int best = -1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < (int)pts_.size(); ++s) {
        if (s == p || s == q || collinear(p, q, s)) continue;
        if (best < 0) {
          best = s;
          changed = true;
          continue;
        }
        I128 o = orient(p, q, best, s);
        if (o == 0) continue;
        bool take;
        if (f_ref < 0) {
          take = o > 0;
        } else {
          I128 oref = orient(p, q, best, f_ref);
          // move away from the known adjacent facet
          take = oref == 0 || ((o > 0) != (oref > 0));
        }
        if (take) {
          best = s;
          changed = true;
        }
      }
    }
    if (best < 0) throw DomainError("wrap called on a rank-deficient set");
    auto n128 = cross(diff(pts_[q], pts_[p]), diff(pts_[best], pts_[p]));
    std::array<Int, 3> n{(Int)n128[0], (Int)n128[1], (Int)n128[2]};
    Int g = gcd_int(gcd_int(n[0], n[1]), n[2]);
    for (auto& c : n) c /= g;
    I128 off = dot_n(n, pts_[p], 3);
    // orient outward
    for (const auto& s : pts_) {
      I128 v = dot_n(n, s, 3);
      if (v > off) {
        for (auto& c : n) c = -c;
        off = -off;
        break;
      }
    }
    make_facet(n, (Int)off);
  }

  void make_facet(std::array<Int, 3> n, Int c) {
    std::array<Int, 4> key{n[0], n[1], n[2], c};
    if (seen_.count(key)) return;
    seen_.insert(key);

    std::vector<int> onplane;
    for (int i = 0; i < (int)pts_.size(); ++i) {
      I128 v = dot_n(n, pts_[i], 3);
      if (v > c) throw DomainError("internal: facet plane does not support");
      if (v == c) onplane.push_back(i);
    }
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(n[i]) > std::abs(n[k])) k = i;
    std::vector<std::pair<Int, Int>> proj;
    proj.reserve(onplane.size());
    for (int i : onplane) {
      switch (k) {
        case 0: proj.emplace_back(pts_[i].x[1], pts_[i].x[2]); break;
        case 1: proj.emplace_back(pts_[i].x[0], pts_[i].x[2]); break;
        default: proj.emplace_back(pts_[i].x[0], pts_[i].x[1]); break;
      }
    }
    std::vector<int> h = chain2d(proj);
    std::vector<int> cycle;
    cycle.reserve(h.size());
    for (int hi : h) cycle.push_back(onplane[hi]);
    // CCW seen from outside: the projected positive area must align with
    // the normal component along the dropped axis (odd axis flips sign)
    Int sigma = (k == 1) ? -1 : 1;
    if (sigma * n[k] < 0) std::reverse(cycle.begin(), cycle.end());

    Facet f;
    f.normal = n;
    f.offset = c;
    f.cycle = cycle;
    facets_.push_back(f);
    const int m = (int)cycle.size();
    for (int t = 0; t < m; ++t) {
      int a = cycle[t], b = cycle[(t + 1) % m];
      owned_.insert({a, b});
      if (!owned_.count({b, a})) {
        // reference vertex off the shared edge
        int ref = cycle[(t + 2) % m];
        if (ref == a || ref == b) ref = cycle[(t + m - 1) % m];
        queue_.push_back({b, a, ref});
      }
    }
  }

  const std::vector<Point>& pts_;
  std::set<std::array<Int, 4>> seen_;
  std::set<std::pair<int, int>> owned_;
  std::deque<std::array<int, 3>> queue_;
  std::vector<Facet> facets_;
};

}  // namespace

BigInt Box::lattice_count() const {
  BigInt c = 1;
  for (int i = 0; i < d; ++i) c *= 2 * BigInt(half[i]) + 1;
  return c;
}

BigInt Box::eps_lattice_count(const Rational& eps) const {
  BigInt c = 1;
  for (int i = 0; i < d; ++i) {
    BigInt r = numerator(eps) * half[i] / denominator(eps);  // floor(eps N_i)
    c *= 2 * r + 1;
  }
  return c;
}

bool Box::contains(const Point& p) const {
  for (int i = 0; i < d; ++i)
    if (p.x[i] > half[i] || p.x[i] < -half[i]) return false;
  return true;
}

bool Hull::contains(const Point& p) const {
  if (!full_dim()) throw DomainError("membership test needs a full-dimensional hull");
  for (const auto& f : facets)
    if (dot_n(f.normal, p, d) > f.offset) return false;
  return true;
}

bool Hull::contains(const QPoint& q) const {
  return contains_dilated(Rational(1), q);
}

bool Hull::contains_dilated(const Rational& t, const QPoint& q) const {
  if (!full_dim()) throw DomainError("membership test needs a full-dimensional hull");
  for (const auto& f : facets)
    if (dot_q(f.normal, q, d) > t * Rational(f.offset)) return false;
  return true;
}

Hull convex_hull(const std::vector<Point>& pts_in, int d) {
  validate_points(pts_in, d);
  Hull hull;
  hull.d = d;
  hull.points = pts_in;
  std::sort(hull.points.begin(), hull.points.end());
  hull.points.erase(std::unique(hull.points.begin(), hull.points.end()),
                    hull.points.end());
  const auto& pts = hull.points;
  hull.volume = 0;

  // affine rank
  int rank = 0;
  std::array<I128, 3> v1{}, v2{};
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t i = 1; i < pts.size() && rank == 0; ++i)
    if (!(pts[i] == pts[0])) {
      v1 = diff(pts[i], pts[0]);
      i1 = i;
      rank = 1;
    }
  for (std::size_t i = i1 + 1; i < pts.size() && rank == 1; ++i) {
    auto cr = cross(v1, diff(pts[i], pts[0]));
    if (cr[0] || cr[1] || cr[2]) {
      v2 = diff(pts[i], pts[0]);
      i2 = i;
      rank = 2;
    }
  }
  for (std::size_t i = i2 + 1; i < pts.size() && rank == 2 && d == 3; ++i)
    if (det3(v1, v2, diff(pts[i], pts[0])) != 0) rank = 3;
  hull.affine_dim = rank;

  if (d == 1) {
    hull.vertices = {pts.front()};
    if (pts.size() > 1) hull.vertices.push_back(pts.back());
    if (rank == 1) {
      Facet hi, lo;
      hi.normal = {1, 0, 0};
      hi.offset = pts.back().x[0];
      hi.cycle = {(int)pts.size() - 1};
      lo.normal = {-1, 0, 0};
      lo.offset = -pts.front().x[0];
      lo.cycle = {0};
      hull.facets = {lo, hi};
      hull.volume = Rational(pts.back().x[0] - pts.front().x[0]);
    }
    return hull;
  }

  if (d == 2) {
    if (rank <= 1) {
      hull.vertices = {pts.front()};
      if (rank == 1) hull.vertices.push_back(pts.back());
      return hull;
    }
    std::vector<std::pair<Int, Int>> xy;
    xy.reserve(pts.size());
    for (const auto& p : pts) xy.emplace_back(p.x[0], p.x[1]);
    std::vector<int> h = chain2d(xy);
    const int m = (int)h.size();
    I128 area2 = 0;
    for (int t = 0; t < m; ++t) {
      const Point& a = pts[h[t]];
      const Point& b = pts[h[(t + 1) % m]];
      area2 += (I128)a.x[0] * b.x[1] - (I128)a.x[1] * b.x[0];
      Facet f;
      std::array<Int, 2> e{b.x[0] - a.x[0], b.x[1] - a.x[1]};
      std::array<Int, 3> n{e[1], -e[0], 0};
      Int g = gcd_int(n[0], n[1]);
      n[0] /= g;
      n[1] /= g;
      f.normal = n;
      f.offset = (Int)dot_n(n, a, 2);
      f.cycle = {h[t], h[(t + 1) % m]};
      hull.facets.push_back(f);
    }
    for (int t : h) hull.vertices.push_back(pts[t]);
    std::sort(hull.vertices.begin(), hull.vertices.end());
    hull.volume = Rational((Int)area2) / 2;
    return hull;
  }

  // d == 3
  if (rank == 0) {
    hull.vertices = {pts.front()};
    return hull;
  }
  if (rank == 1) {
    int ax = 0;
    for (int i = 1; i < 3; ++i)
      if ((v1[i] < 0 ? -v1[i] : v1[i]) > (v1[ax] < 0 ? -v1[ax] : v1[ax]))
        ax = i;
    auto lohi = std::minmax_element(
        pts.begin(), pts.end(),
        [ax](const Point& a, const Point& b) { return a.x[ax] < b.x[ax]; });
    hull.vertices = {*lohi.first, *lohi.second};
    std::sort(hull.vertices.begin(), hull.vertices.end());
    return hull;
  }
  if (rank == 2) {
    auto n128 = cross(v1, v2);
    int k = 0;
    for (int i = 1; i < 3; ++i) {
      auto a = n128[i] < 0 ? -n128[i] : n128[i];
      auto b = n128[k] < 0 ? -n128[k] : n128[k];
      if (a > b) k = i;
    }
    std::vector<std::pair<Int, Int>> proj;
    for (const auto& p : pts) {
      switch (k) {
        case 0: proj.emplace_back(p.x[1], p.x[2]); break;
        case 1: proj.emplace_back(p.x[0], p.x[2]); break;
        default: proj.emplace_back(p.x[0], p.x[1]); break;
      }
    }
    for (int t : chain2d(proj)) hull.vertices.push_back(pts[t]);
    std::sort(hull.vertices.begin(), hull.vertices.end());
    return hull;
  }

  Wrap3 wrap(pts);
  hull.facets = wrap.run();
  std::set<int> vset;
  for (const auto& f : hull.facets)
    for (int i : f.cycle) vset.insert(i);
  for (int i : vset) hull.vertices.push_back(pts[i]);
  std::sort(hull.vertices.begin(), hull.vertices.end());

  const Point& base = hull.vertices.front();
  I128 vol6 = 0;
  for (const auto& f : hull.facets) {
    const auto& cyc = f.cycle;
    for (std::size_t t = 1; t + 1 < cyc.size(); ++t)
      vol6 += det3(diff(pts[cyc[0]], base), diff(pts[cyc[t]], base),
                   diff(pts[cyc[t + 1]], base));
  }
  hull.volume = Rational((Int)vol6) / 6;
  return hull;
}

VolumeBoundReport check_volume_bound(const std::vector<Point>& a,
                                     const Box& box, double alpha) {
  validate_points(a, box.d);
  for (const auto& p : a)
    if (!box.contains(p)) throw DomainError("point outside the box");
  Hull hull = convex_hull(a, box.d);
  VolumeBoundReport rep;
  rep.volume = hull.volume;
  BigInt count = box.lattice_count();
  rep.c_measured = hull.volume / Rational(count);
  rep.precondition_ok =
      Rational(BigInt(hull.points.size())) >= rat(alpha) * Rational(count);
  rep.bound_positive = hull.volume > 0;
  return rep;
}

InscribeResult inscribe_box(const std::vector<Point>& a, const Box& box) {
  Hull hull = convex_hull(a, box.d);
  if (!hull.full_dim())
    throw DomainError("inscribe needs a full-dimensional hull (affine dim " +
                      std::to_string(hull.affine_dim) + ")");
  const int d = box.d;
  // vars: x0 = xp - xm (2d columns), then beta
  std::vector<std::vector<Rational>> lp_a;
  std::vector<Rational> lp_b, lp_c(2 * d + 1, Rational(0));
  lp_c[2 * d] = 1;
  for (const auto& f : hull.facets) {
    std::vector<Rational> row(2 * d + 1, Rational(0));
    Rational h = 0;
    for (int j = 0; j < d; ++j) {
      row[j] = Rational(f.normal[j]);
      row[d + j] = Rational(-f.normal[j]);
      h += Rational(f.normal[j] < 0 ? -f.normal[j] : f.normal[j]) *
           Rational(box.half[j]);
    }
    row[2 * d] = h;
    lp_a.push_back(std::move(row));
    lp_b.push_back(Rational(f.offset));
  }
  LpResult lp = Simplex::maximize(lp_a, lp_b, lp_c);
  if (lp.status != LpResult::Status::optimal)
    throw DomainError("inscribe LP did not reach an optimum");

  InscribeResult out;
  out.x0_lp.d = d;
  for (int j = 0; j < d; ++j)
    out.x0_lp.x[j] = lp.solution[j] - lp.solution[d + j];
  out.beta_lp = lp.objective;

  auto beta_at = [&](const Point& z) {
    Rational best;
    bool first = true;
    for (const auto& f : hull.facets) {
      Rational h = 0;
      for (int j = 0; j < d; ++j)
        h += Rational(f.normal[j] < 0 ? -f.normal[j] : f.normal[j]) *
             Rational(box.half[j]);
      Rational b = (Rational(f.offset) - Rational((Int)dot_n(f.normal, z, d))) / h;
      if (first || b < best) {
        best = b;
        first = false;
      }
    }
    return best;
  };

  bool integral = true;
  for (int j = 0; j < d; ++j)
    if (denominator(out.x0_lp.x[j]) != 1) integral = false;

  Point x0{};
  x0.d = d;
  Rational beta;
  if (integral) {
    for (int j = 0; j < d; ++j)
      x0.x[j] = (Int)numerator(out.x0_lp.x[j]).convert_to<long long>();
    beta = out.beta_lp;
  } else {
    // round each coordinate both ways and keep the best lattice anchor
    std::vector<Point> cands;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Point z{};
      z.d = d;
      for (int j = 0; j < d; ++j) {
        BigInt fl = numerator(out.x0_lp.x[j]) / denominator(out.x0_lp.x[j]);
        if (out.x0_lp.x[j] < 0 && Rational(fl) != out.x0_lp.x[j]) fl -= 1;
        BigInt c = (mask >> j) & 1 ? fl + 1 : fl;
        z.x[j] = c.convert_to<long long>();
      }
      cands.push_back(z);
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    bool first = true;
    for (const auto& z : cands) {
      Rational b = beta_at(z);
      if (first || b > beta) {
        beta = b;
        x0 = z;
        first = false;
      }
    }
    if (beta < 0) beta = 0;
  }
  out.x0 = x0;
  out.beta = beta;

  // recertify every corner of x0 + beta P against every facet
  out.certified = beta > 0;
  for (unsigned mask = 0; mask < (1u << d) && out.certified; ++mask) {
    QPoint corner;
    corner.d = d;
    for (int j = 0; j < d; ++j) {
      Rational off = beta * Rational(box.half[j]);
      corner.x[j] = Rational(x0.x[j]) + ((mask >> j) & 1 ? off : -off);
    }
    if (!hull.contains(corner)) out.certified = false;
  }
  return out;
}

std::uint64_t boundary_shell_count(const Hull& hull, const Point& x0,
                                   const Rational& gamma,
                                   std::uint64_t budget) {
  if (!hull.full_dim())
    throw DomainError("shell count needs a full-dimensional hull");
  if (!(gamma >= 0 && gamma < 1))
    throw DomainError("gamma must be in [0,1)");
  if (!hull.contains(x0)) throw DomainError("x0 must lie inside the hull");
  BigInt num = numerator(gamma), den = denominator(gamma);
  if (den > (BigInt(1) << 60) || num > (BigInt(1) << 60))
    throw DomainError("gamma must have numerator and denominator < 2^60");
  I128 p = num.convert_to<long long>();
  I128 q = den.convert_to<long long>();

  const int d = hull.d;
  std::array<Int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int j = 0; j < d; ++j) {
    lo[j] = hull.vertices.front().x[j];
    hi[j] = lo[j];
  }
  for (const auto& v : hull.vertices)
    for (int j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], v.x[j]);
      hi[j] = std::max(hi[j], v.x[j]);
    }
  double boxpts = 1;
  for (int j = 0; j < d; ++j) boxpts *= (double)(hi[j] - lo[j] + 1);
  if (boxpts > (double)budget)
    throw ResourceError("shell enumeration over ~" + std::to_string(boxpts) +
                        " points exceeds the budget");

  // inner body facet: q (n.x) <= (q-p) c + p (n.x0)
  std::vector<I128> rhs;
  rhs.reserve(hull.facets.size());
  for (const auto& f : hull.facets)
    rhs.push_back((q - p) * (I128)f.offset + p * dot_n(f.normal, x0, d));

  std::uint64_t count = 0;
  Point pt{};
  pt.d = d;
  std::array<Int, 3> cur = lo;
  for (;;) {
    for (int j = 0; j < d; ++j) pt.x[j] = cur[j];
    bool in_outer = true, in_inner = true;
    for (std::size_t fi = 0; fi < hull.facets.size() && in_outer; ++fi) {
      I128 v = dot_n(hull.facets[fi].normal, pt, d);
      if (v > hull.facets[fi].offset) in_outer = false;
      if (q * v > rhs[fi]) in_inner = false;
    }
    if (in_outer && !in_inner) ++count;
    int j = 0;
    for (; j < d; ++j) {
      if (++cur[j] <= hi[j]) break;
      cur[j] = lo[j];
    }
    if (j == d) break;
  }
  return count;
}

bool is_epsilon_regular(const std::vector<Point>& a, const Box& box,
                        double epsilon) {
  Rational eps = rat(epsilon);
  BigInt peps = box.eps_lattice_count(eps);
  std::array<Int, 3> r{0, 0, 0};
  for (int j = 0; j < box.d; ++j)
    r[j] = (numerator(eps) * box.half[j] / denominator(eps))
               .convert_to<long long>();
  BigInt need_num = numerator(eps) * peps;  // cnt >= eps |P_eps|
  for (const auto& p : a) {
    std::int64_t cnt = 0;
    for (const auto& b : a) {
      bool near = true;
      for (int j = 0; j < box.d; ++j)
        if (b.x[j] > p.x[j] + r[j] || b.x[j] < p.x[j] - r[j]) near = false;
      if (near) ++cnt;
    }
    if (BigInt(cnt) * denominator(eps) < need_num) return false;
  }
  return true;
}

Regularized epsilon_regularize(const std::vector<Point>& a_in, const Box& box,
                               double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("epsilon must be in (0,1)");
  std::vector<Point> a = a_in;
  if (!a.empty()) validate_points(a, box.d);
  for (const auto& p : a)
    if (!box.contains(p)) throw DomainError("point outside the box");
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());

  Regularized out;
  out.epsilon = epsilon;
  Rational eps = rat(epsilon);
  BigInt peps = box.eps_lattice_count(eps);
  const std::size_t before = a.size();

  // cover by translates of P_{eps/2}: cells of side 2 floor(eps N_i / 2) + 1
  std::array<Int, 3> side{1, 1, 1};
  for (int j = 0; j < box.d; ++j) {
    BigInt f = numerator(eps) * box.half[j] / (2 * denominator(eps));
    side[j] = 2 * f.convert_to<long long>() + 1;
  }
  std::map<std::array<Int, 3>, std::vector<Point>> cells;
  for (const auto& p : a) {
    std::array<Int, 3> key{0, 0, 0};
    for (int j = 0; j < box.d; ++j) key[j] = (p.x[j] + box.half[j]) / side[j];
    cells[key].push_back(p);
  }
  std::vector<Point> kept;
  BigInt thr_num = numerator(eps) * peps;  // keep cells with cnt > eps |P_eps|
  for (const auto& [key, pts] : cells)
    if (BigInt(pts.size()) * denominator(eps) > thr_num)
      kept.insert(kept.end(), pts.begin(), pts.end());
  std::sort(kept.begin(), kept.end());

  // the cover pass already yields the literal predicate; re-check it and
  // iterate deletion of violators if it ever fails
  out.passes = 1;
  std::array<Int, 3> r{0, 0, 0};
  for (int j = 0; j < box.d; ++j)
    r[j] = (numerator(eps) * box.half[j] / denominator(eps))
               .convert_to<long long>();
  for (;;) {
    std::vector<Point> survivors;
    survivors.reserve(kept.size());
    for (const auto& p : kept) {
      std::int64_t cnt = 0;
      for (const auto& b : kept) {
        bool near = true;
        for (int j = 0; j < box.d; ++j)
          if (b.x[j] > p.x[j] + r[j] || b.x[j] < p.x[j] - r[j]) near = false;
        if (near) ++cnt;
      }
      if (BigInt(cnt) * denominator(eps) >= thr_num) survivors.push_back(p);
    }
    if (survivors.size() == kept.size()) break;
    kept = std::move(survivors);
    ++out.passes;
  }
  out.kept = std::move(kept);
  out.removed = before - out.kept.size();
  return out;
}

namespace {

bool residual_in_dilate(const Hull& hull, const std::vector<Point>& b, int d,
                        const QPoint& w) {
  if (hull.full_dim()) return hull.contains_dilated(Rational(d), w);
  // degenerate hull: exact feasibility of sum mu_i b_i = w, sum mu = d
  std::vector<std::vector<Rational>> a(d + 1,
                                       std::vector<Rational>(b.size()));
  std::vector<Rational> rhs(d + 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (int j = 0; j < d; ++j) a[j][i] = Rational(b[i].x[j]);
    a[d][i] = 1;
  }
  for (int j = 0; j < d; ++j) rhs[j] = w.x[j];
  rhs[d] = d;
  return Simplex::feasible_point(a, rhs).status == LpResult::Status::optimal;
}

}  // namespace

SFDecomposition shapley_folkman_decompose(const std::vector<Point>& b_in,
                                          unsigned k, const QPoint& x) {
  const int d = x.d;
  std::vector<Point> b = b_in;
  validate_points(b, d);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (k <= (unsigned)d) throw DomainError("need k > d");

  Hull hull = convex_hull(b, d);

  // basic feasible weights: sum l_i b_i = x, sum l_i = k, l >= 0
  std::vector<std::vector<Rational>> a(d + 1, std::vector<Rational>(b.size()));
  std::vector<Rational> rhs(d + 1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (int j = 0; j < d; ++j) a[j][i] = Rational(b[i].x[j]);
    a[d][i] = 1;
  }
  for (int j = 0; j < d; ++j) rhs[j] = x.x[j];
  rhs[d] = k;
  LpResult lp = Simplex::feasible_point(a, rhs);
  if (lp.status != LpResult::Status::optimal)
    throw DomainError("x is not in k * hull(B)");

  std::vector<BigInt> m(b.size());
  BigInt total = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    m[i] = numerator(lp.solution[i]) / denominator(lp.solution[i]);
    total += m[i];
  }
  BigInt excess = total - BigInt(k - d);
  for (std::size_t i = b.size(); i-- > 0 && excess > 0;) {
    BigInt cut = std::min(m[i], excess);
    m[i] -= cut;
    excess -= cut;
  }

  SFDecomposition out;
  out.residual.d = d;
  for (int j = 0; j < d; ++j) out.residual.x[j] = x.x[j];
  for (std::size_t i = 0; i < b.size(); ++i) {
    long long reps = m[i].convert_to<long long>();
    for (long long t = 0; t < reps; ++t) out.parts.push_back(b[i]);
    for (int j = 0; j < d; ++j)
      out.residual.x[j] -= Rational(m[i]) * Rational(b[i].x[j]);
  }
  out.residual_certified = residual_in_dilate(hull, b, d, out.residual);

  if (!out.residual_certified) {
    // exhaustive fallback over (k-d)-multisets; never expected
    double combos = std::pow((double)b.size(), (double)(k - d));
    if (combos > 1e6)
      throw ResourceError("SF fallback space " + std::to_string(combos) +
                          " exceeds the budget");
    std::vector<std::size_t> pick(k - d, 0);
    for (;;) {
      QPoint w;
      w.d = d;
      for (int j = 0; j < d; ++j) w.x[j] = x.x[j];
      for (std::size_t i : pick)
        for (int j = 0; j < d; ++j) w.x[j] -= Rational(b[i].x[j]);
      if (residual_in_dilate(hull, b, d, w)) {
        out.parts.clear();
        for (std::size_t i : pick) out.parts.push_back(b[i]);
        out.residual = w;
        out.residual_certified = true;
        break;
      }
      // next nondecreasing index tuple
      std::size_t t = pick.size();
      while (t-- > 0) {
        if (++pick[t] < b.size()) {
          for (std::size_t s = t + 1; s < pick.size(); ++s) pick[s] = pick[t];
          break;
        }
        if (t == 0) throw CounterexampleError(
            "no (k-d)-part split leaves a residual in d * hull(B)");
      }
    }
  }
  std::sort(out.parts.begin(), out.parts.end());
  return out;
}

PopularSFReport popular_sf_density(const std::vector<Point>& a, const Box& box,
                                   double gamma, double epsilon, unsigned k,
                                   const QPoint& x) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must be in (0,1)");
  Hull hull = convex_hull(a, box.d);
  if (!hull.full_dim())
    throw DomainError("popular SF needs a full-dimensional hull");
  InscribeResult ins = inscribe_box(a, box);

  PopularSFReport rep;
  rep.beta = ins.beta;
  rep.x0 = ins.x0;
  rep.arity_ok = k > (unsigned)box.d;
  rep.eps_regular_ok = is_epsilon_regular(hull.points, box, epsilon);
  rep.eps_le_beta_gamma = rat(epsilon) <= ins.beta * rat(gamma);

  Rational g = rat(gamma);
  const int d = box.d;
  // C' = (1-g) C + g x0: facet thresholds
  std::vector<Rational> thr;
  for (const auto& f : hull.facets)
    thr.push_back((1 - g) * Rational(f.offset) +
                  g * Rational((Int)dot_n(f.normal, ins.x0, d)));

  auto in_dilated_inner = [&](const Rational& t, const QPoint& q) {
    for (std::size_t fi = 0; fi < hull.facets.size(); ++fi)
      if (dot_q(hull.facets[fi].normal, q, d) > t * thr[fi]) return false;
    return true;
  };

  rep.x_in_hypothesis = in_dilated_inner(Rational((int)k + 1), x);

  std::uint64_t count = 0;
  for (const auto& p : hull.points) {
    QPoint y;
    y.d = d;
    for (int j = 0; j < d; ++j) y.x[j] = x.x[j] - Rational(p.x[j]);
    if (in_dilated_inner(Rational((int)k), y)) ++count;
  }
  rep.count = count;
  BigInt pc = box.lattice_count();
  rep.delta = Rational(BigInt(count)) / Rational(pc);
  Rational side = 1;
  for (int j = 0; j < d; ++j) side *= Rational(box.half[j]);
  rep.delta_reference = pow_rat(rat(epsilon), (unsigned)d + 1) * side / Rational(pc);
  return rep;
}

std::vector<Point> points_from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.empty())
    throw ParseError("points must be a non-empty array of coordinate arrays");
  std::vector<Point> out;
  int d = -1;
  for (const auto& row : doc) {
    if (!row.is_array() || row.empty() || row.size() > 3)
      throw ParseError("each point must be an array of 1..3 integers");
    if (d < 0) d = (int)row.size();
    if ((int)row.size() != d) throw ParseError("points have mixed dimensions");
    Point p{};
    p.d = d;
    for (int j = 0; j < d; ++j) {
      if (!row[j].is_number_integer())
        throw ParseError("point coordinates must be integers");
      p.x[j] = row[j].get<long long>();
    }
    out.push_back(p);
  }
  return out;
}

QPoint qpoint_from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.empty() || doc.size() > 3)
    throw ParseError("point must be an array of 1..3 entries");
  QPoint q;
  q.d = (int)doc.size();
  for (int j = 0; j < q.d; ++j) {
    const auto& e = doc[j];
    if (e.is_number_integer()) {
      q.x[j] = Rational(e.get<long long>());
    } else if (e.is_string()) {
      std::string s = e.get<std::string>();
      auto slash = s.find('/');
      try {
        if (slash == std::string::npos)
          q.x[j] = Rational(BigInt(s));
        else
          q.x[j] = Rational(BigInt(s.substr(0, slash)),
                            BigInt(s.substr(slash + 1)));
      } catch (...) {
        throw ParseError("cannot parse rational coordinate: " + s);
      }
    } else if (e.is_number_float()) {
      q.x[j] = rat(e.get<double>());
    } else {
      throw ParseError("coordinates must be integers, floats or \"p/q\"");
    }
  }
  return q;
}

nlohmann::json Hull::to_json() const {
  nlohmann::json doc;
  doc["affine_dim"] = affine_dim;
  doc["volume"] = rational_str(volume);
  doc["volume_float"] = to_double(volume);
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : vertices) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < d; ++j) row.push_back(v.x[j]);
    vs.push_back(std::move(row));
  }
  doc["vertices"] = std::move(vs);
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : facets) {
    nlohmann::json fj;
    nlohmann::json n = nlohmann::json::array();
    for (int j = 0; j < d; ++j) n.push_back(f.normal[j]);
    fj["normal"] = std::move(n);
    fj["offset"] = f.offset;
    fs.push_back(std::move(fj));
  }
  doc["facets"] = std::move(fs);
  return doc;
}

nlohmann::json VolumeBoundReport::to_json() const {
  nlohmann::json doc;
  doc["volume"] = rational_str(volume);
  doc["volume_float"] = to_double(volume);
  doc["c_measured"] = rational_str(c_measured);
  doc["c_measured_float"] = to_double(c_measured);
  doc["precondition_ok"] = precondition_ok;
  doc["bound_positive"] = bound_positive;
  return doc;
}

nlohmann::json InscribeResult::to_json() const {
  nlohmann::json doc;
  nlohmann::json xs = nlohmann::json::array();
  for (int j = 0; j < x0.d; ++j) xs.push_back(x0.x[j]);
  doc["x0"] = std::move(xs);
  doc["beta"] = rational_str(beta);
  doc["beta_float"] = to_double(beta);
  doc["beta_lp"] = rational_str(beta_lp);
  doc["certified"] = certified;
  return doc;
}

nlohmann::json Regularized::to_json() const {
  nlohmann::json doc;
  nlohmann::json ks = nlohmann::json::array();
  for (const auto& p : kept) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < p.d; ++j) row.push_back(p.x[j]);
    ks.push_back(std::move(row));
  }
  doc["kept"] = std::move(ks);
  doc["removed"] = removed;
  doc["passes"] = passes;
  doc["epsilon"] = epsilon;
  return doc;
}

nlohmann::json SFDecomposition::to_json() const {
  nlohmann::json doc;
  nlohmann::json res = nlohmann::json::array();
  for (int j = 0; j < residual.d; ++j)
    res.push_back(rational_str(residual.x[j]));
  doc["residual"] = std::move(res);
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : parts) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < p.d; ++j) row.push_back(p.x[j]);
    ps.push_back(std::move(row));
  }
  doc["parts"] = std::move(ps);
  doc["residual_certified"] = residual_certified;
  return doc;
}

nlohmann::json PopularSFReport::to_json() const {
  nlohmann::json doc;
  doc["count"] = count;
  doc["delta"] = rational_str(delta);
  doc["delta_float"] = to_double(delta);
  doc["delta_reference"] = rational_str(delta_reference);
  doc["beta"] = rational_str(beta);
  nlohmann::json xs = nlohmann::json::array();
  for (int j = 0; j < x0.d; ++j) xs.push_back(x0.x[j]);
  doc["x0"] = std::move(xs);
  doc["arity_ok"] = arity_ok;
  doc["eps_regular_ok"] = eps_regular_ok;
  doc["eps_le_beta_gamma"] = eps_le_beta_gamma;
  doc["x_in_hypothesis"] = x_in_hypothesis;
  return doc;
}

}  // namespace sievelab::lattice
