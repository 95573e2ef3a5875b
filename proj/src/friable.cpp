#include "sievelab/friable.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <mutex>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"

namespace sievelab {

namespace {

// Counts nodes of the subtree rooted at (product, first usable prime
// index), iterating with an explicit stack.
std::uint64_t dfs_count(std::uint64_t x,
                        const std::vector<std::uint64_t>& ps,
                        std::uint64_t root_product, std::size_t root_index) {
  std::uint64_t count = 0;
  std::vector<std::pair<std::uint64_t, std::size_t>> stack;
  stack.emplace_back(root_product, root_index);
  while (!stack.empty()) {
    auto [n, i] = stack.back();
    stack.pop_back();
    ++count;
    for (std::size_t j = i; j < ps.size(); ++j) {
      if (ps[j] > x / n) break;  // product would exceed x
      stack.emplace_back(n * ps[j], j);
    }
  }
  return count;
}

}  // namespace

std::uint64_t psi_count(std::uint64_t x, const PrimeSet& set,
                        const PsiOptions& opts) {
  if (x < 1) throw DomainError("psi_count needs x >= 1");
  const auto& mem = set.members();
  std::vector<std::uint64_t> ps(
      mem.begin(), std::upper_bound(mem.begin(), mem.end(), x));

  // Preflight: node count equals the friable count, which is bounded both
  // by x and by the exponent-box product prod (1 + log_p x).
  double log_box = 0.0;
  double lx = std::log((double)x);
  for (std::uint64_t p : ps) {
    log_box += std::log1p(lx / std::log((double)p));
    if (log_box > 700.0) break;
  }
  double box_bound = log_box > 700.0 ? 1e300 : std::exp(log_box);
  bool dense = box_bound >= (double)x;
  std::uint64_t budget = dense ? opts.ceiling_dense : opts.ceiling_sparse;
  double estimate = std::min((double)x, box_bound);
  if (estimate > (double)budget) {
    std::ostringstream msg;
    msg << "psi_count preflight estimate " << estimate << " exceeds the "
        << (dense ? "dense" : "sparse") << " ceiling " << budget;
    throw ResourceError(msg.str());
  }

  if (ps.empty()) return 1;  // only n = 1

  unsigned threads = std::max(1u, opts.threads);
  if (threads == 1 || ps.size() < 2) return dfs_count(x, ps, 1, 0);

  // Partition by first prime factor; n = 1 counted once up front.
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    std::uint64_t local = 0;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= ps.size()) return local;
      if (ps[i] <= x) local += dfs_count(x, ps, ps[i], i);
    }
  };
  std::vector<std::future<std::uint64_t>> futs;
  for (unsigned t = 0; t < threads; ++t)
    futs.push_back(std::async(std::launch::async, worker));
  std::uint64_t total = 1;
  for (auto& f : futs) total += f.get();
  return total;
}

namespace {

constexpr double kRhoStep = 1e-4;
constexpr double kRhoMax = 50.0;
constexpr std::size_t kRhoUnit = 10000;  // grid points per unit interval

const std::vector<double>& rho_table() {
  static const std::vector<double> table = [] {
    // The delay equation u rho'(u) = -rho(u-1) is integrated in the form
    // u rho(u) = integral of rho over [u-1, u], evaluated by composite
    // trapezoid on the grid.  The integral form keeps quadrature error
    // proportional to the local scale of rho; stepping the derivative
    // form instead leaves an absolute error floor around 1e-9 that
    // drowns rho(u) beyond u ~ 7.
    std::size_t n = (std::size_t)(kRhoMax / kRhoStep);
    std::vector<double> r(n + 1);
    for (std::size_t i = 0; i <= std::min(kRhoUnit, n); ++i) r[i] = 1.0;
    const double h = kRhoStep;
    // running sum of the P grid values behind i
    double s = (double)kRhoUnit;
    for (std::size_t i = kRhoUnit + 1; i <= n; ++i) {
      if (i % kRhoUnit == 1) {  // refresh to stop rounding drift
        s = 0.0;
        for (std::size_t t = i - kRhoUnit; t < i; ++t) s += r[t];
      }
      double u = (double)i * h;
      // trapezoid: integral = h (s - r[i-P]/2 + r[i]/2)
      r[i] = h * (s - 0.5 * r[i - kRhoUnit]) / (u - 0.5 * h);
      s += r[i] - r[i - kRhoUnit];
    }
    return r;
  }();
  return table;
}

}  // namespace

double dickman_rho(double u) {
  if (!(u >= 0.0)) throw DomainError("dickman_rho needs u >= 0");
  if (u > kRhoMax) throw DomainError("dickman_rho supports u <= 50");
  if (u <= 1.0) return 1.0;
  const auto& r = rho_table();
  double t = u / kRhoStep;
  std::size_t i = (std::size_t)t;
  if (i + 1 >= r.size()) return r.back();
  double frac = t - (double)i;
  return r[i] * (1.0 - frac) + r[i + 1] * frac;
}

PsiReport theorem_ratio_report(std::uint64_t x, const PrimeSet& set,
                               const PsiOptions& opts) {
  PsiReport rep;
  rep.x = x;
  rep.psi = psi_count(x, set, opts);
  rep.ratio = (double)rep.psi / (double)x;
  rep.mertens = mertens_product(set);
  rep.quotient = rep.ratio / rep.mertens;
  return rep;
}

nlohmann::json PsiReport::to_json() const {
  nlohmann::json doc;
  doc["x"] = x;
  doc["psi"] = psi;
  doc["ratio"] = ratio;
  doc["mertens"] = mertens;
  doc["quotient"] = quotient;
  return doc;
}

const char* PsiReport::csv_header() { return "x,psi,ratio,mertens,quotient"; }

std::string PsiReport::to_csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << x << ',' << psi << ',' << ratio << ',' << mertens << ',' << quotient;
  return os.str();
}

}  // namespace sievelab
