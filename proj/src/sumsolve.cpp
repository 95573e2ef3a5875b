#include "sievelab/sumsolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"

namespace sievelab {

WeightedIntegerSet::WeightedIntegerSet(std::uint64_t n,
                                       std::vector<std::uint64_t> members)
    : n_(n), members_(std::move(members)) {
  if (n_ < 1) throw DomainError("WeightedIntegerSet needs N >= 1");
  std::sort(members_.begin(), members_.end());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 1 || members_[i] > n_)
      throw DomainError("set member " + std::to_string(members_[i]) +
                        " outside [1, N]");
    if (i && members_[i] == members_[i - 1])
      throw DomainError("duplicate set member " + std::to_string(members_[i]));
  }
}

WeightedIntegerSet WeightedIntegerSet::interval(std::uint64_t n,
                                                std::uint64_t lo,
                                                std::uint64_t hi) {
  std::vector<std::uint64_t> m;
  for (std::uint64_t a = lo; a <= hi; ++a) m.push_back(a);
  return WeightedIntegerSet(n, std::move(m));
}

const Rational& WeightedIntegerSet::reciprocal_sum() const {
  if (!recip_) recip_ = sum_reciprocals(members_).normalized();
  return *recip_;
}

WeightedIntegerSet WeightedIntegerSet::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid integer-set JSON: ") + e.what());
  }
  return from_json(doc);
}

WeightedIntegerSet WeightedIntegerSet::from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object())
      throw ParseError("integer-set document must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (it.key() != "N" && it.key() != "members" && it.key() != "interval" &&
          it.key() != "keep")
        throw ParseError("unknown integer-set field: " + it.key());
    if (!doc.contains("N")) throw ParseError("integer-set needs \"N\"");
    std::uint64_t n = doc.at("N").get<std::uint64_t>();
    if (doc.contains("members") == doc.contains("interval"))
      throw ParseError("integer-set needs exactly one of \"members\", \"interval\"");
    if (doc.contains("members")) {
      if (doc.contains("keep"))
        throw ParseError("\"keep\" applies only to interval specs");
      return WeightedIntegerSet(
          n, doc.at("members").get<std::vector<std::uint64_t>>());
    }
    const auto& iv = doc.at("interval");
    if (!iv.is_array() || iv.size() != 2)
      throw ParseError("interval must be [lo, hi]");
    std::uint64_t lo = iv[0].get<std::uint64_t>();
    std::uint64_t hi = iv[1].get<std::uint64_t>();
    std::vector<std::uint64_t> members;
    if (!doc.contains("keep") ||
        (doc.at("keep").is_string() && doc.at("keep") == "all")) {
      for (std::uint64_t a = lo; a <= hi; ++a) members.push_back(a);
    } else {
      const auto& keep = doc.at("keep");
      if (!keep.is_object() || !keep.contains("modulus") ||
          !keep.contains("residues"))
        throw ParseError("keep must be \"all\" or {\"modulus\":m,\"residues\":[...]}");
      std::uint64_t m = keep.at("modulus").get<std::uint64_t>();
      if (m == 0) throw ParseError("modulus must be positive");
      auto residues = keep.at("residues").get<std::vector<std::uint64_t>>();
      for (std::uint64_t a = lo; a <= hi; ++a)
        if (std::find(residues.begin(), residues.end(), a % m) != residues.end())
          members.push_back(a);
    }
    return WeightedIntegerSet(n, std::move(members));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid integer-set JSON: ") + e.what());
  }
}

nlohmann::json WeightedIntegerSet::to_json() const {
  nlohmann::json doc;
  doc["N"] = n_;
  doc["members"] = members_;
  return doc;
}

PreconditionCheck check_bleichenbacher_precondition(const WeightedIntegerSet& a,
                                                    double u) {
  if (a.n() <= 1) throw DomainError("precondition needs N > 1");
  if (!(u >= 1.0)) throw DomainError("precondition needs u >= 1");
  Rational bound_u = rat(u);
  // members must lie in [1, floor(N/u)]
  BigInt nu_floor = (BigInt(a.n()) * denominator(bound_u)) / numerator(bound_u);
  if (!a.empty() && BigInt(a.members().back()) > nu_floor)
    throw DomainError("set member exceeds floor(N/u)");

  PreconditionCheck out;
  out.sum = a.reciprocal_sum();
  Rational lhs = out.sum - 1 / bound_u;  // compare against 1/(sqrt(N)-1)
  BigInt n(a.n());
  unsigned digits = 12;
  for (;;) {
    RatInterval s = sqrt_bracket(n, digits);
    Rational rhs_lo = 1 / (s.hi - 1);
    Rational rhs_hi = 1 / (s.lo - 1);
    if (lhs > rhs_hi) {
      out.holds = true;
      out.margin = to_double(lhs - (rhs_lo + rhs_hi) / 2);
      return out;
    }
    if (lhs <= rhs_lo) {
      out.holds = false;
      out.margin = to_double(lhs - (rhs_lo + rhs_hi) / 2);
      return out;
    }
    if (s.lo == s.hi) {  // N is a perfect square: exact comparison
      out.holds = lhs > rhs_lo;
      out.margin = to_double(lhs - rhs_lo);
      return out;
    }
    digits += 12;
  }
}

namespace {

// Ragged suffix reachability: reach[i][k] holds the sums <= N writable as
// k nondecreasing parts drawn from A[i..].
class SuffixReach {
 public:
  SuffixReach(const std::vector<std::uint64_t>& a, std::uint64_t n,
              unsigned kmax, std::uint64_t byte_budget)
      : a_(a), n_(n), words_((n_ + 64) / 64) {
    std::size_t total_levels = 0;
    levels_.resize(a_.size() + 1);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      levels_[i] = (unsigned)std::min<std::uint64_t>(kmax, n_ / a_[i]);
      total_levels += levels_[i] + 1;
    }
    levels_[a_.size()] = 0;
    total_levels += 1;
    if (total_levels * words_ * 8 > byte_budget)
      throw ResourceError("subset-sum DP needs ~" +
                          std::to_string(total_levels * words_ * 8 / (1 << 20)) +
                          " MiB, over the budget");
    table_.resize(a_.size() + 1);
    // base: empty suffix reaches sum 0 with 0 parts
    table_[a_.size()].assign(words_, 0);
    set_bit(table_[a_.size()], 0);
    for (std::size_t ii = a_.size(); ii-- > 0;) {
      table_[ii].assign((levels_[ii] + 1) * words_, 0);
      // k = 0
      set_bit_at(ii, 0, 0);
      for (unsigned k = 1; k <= levels_[ii]; ++k) {
        // take A[ii] once more, or defer to the next suffix
        or_shift(row(ii, k), row(ii, k - 1), a_[ii]);
        const std::uint64_t* nxt = row_or_null(ii + 1, k);
        if (nxt)
          for (std::size_t w = 0; w < words_; ++w) row(ii, k)[w] |= nxt[w];
      }
    }
  }

  bool test(std::size_t i, unsigned k, std::uint64_t sum) const {
    const std::uint64_t* r = row_or_null(i, k);
    if (!r) return false;
    return (r[sum >> 6] >> (sum & 63)) & 1;
  }

  unsigned levels(std::size_t i) const { return levels_[i]; }

 private:
  std::uint64_t* row(std::size_t i, unsigned k) {
    return table_[i].data() + (std::size_t)k * words_;
  }
  const std::uint64_t* row_or_null(std::size_t i, unsigned k) const {
    if (i > a_.size()) return nullptr;
    if (i == a_.size()) return k == 0 ? table_[i].data() : nullptr;
    if (k > levels_[i]) return k == 0 ? table_[i].data() : nullptr;
    return table_[i].data() + (std::size_t)k * words_;
  }
  void set_bit(std::vector<std::uint64_t>& v, std::uint64_t b) {
    v[b >> 6] |= std::uint64_t(1) << (b & 63);
  }
  void set_bit_at(std::size_t i, unsigned k, std::uint64_t b) {
    row(i, k)[b >> 6] |= std::uint64_t(1) << (b & 63);
  }
  // dst |= src << shift, truncated at bit n_
  void or_shift(std::uint64_t* dst, const std::uint64_t* src,
                std::uint64_t shift) {
    std::uint64_t word_shift = shift >> 6, bit_shift = shift & 63;
    for (std::size_t w = words_; w-- > word_shift;) {
      std::uint64_t v = src[w - word_shift] << bit_shift;
      if (bit_shift && w > word_shift)
        v |= src[w - word_shift - 1] >> (64 - bit_shift);
      dst[w] |= v;
    }
    // clear bits above n_
    std::uint64_t top = n_ + 1;
    if (top & 63) dst[top >> 6] &= (std::uint64_t(1) << (top & 63)) - 1;
  }

  const std::vector<std::uint64_t>& a_;
  std::uint64_t n_;
  std::size_t words_;
  std::vector<unsigned> levels_;
  std::vector<std::vector<std::uint64_t>> table_;
};

void validate_witness(const WeightedIntegerSet& a,
                      const BleichenbacherWitness& w) {
  if (w.parts.size() != w.k)
    throw CounterexampleError("witness arity mismatch");
  std::uint64_t total = 0;
  for (std::uint64_t p : w.parts) {
    if (!std::binary_search(a.members().begin(), a.members().end(), p))
      throw CounterexampleError("witness part not in A");
    total += p;
  }
  if (total != w.total || total > a.n() || a.n() - w.k >= total)
    throw CounterexampleError("witness total outside (N-k, N]");
}

}  // namespace

BleichenbacherWitness solve_bleichenbacher(const WeightedIntegerSet& a,
                                           double u, bool force) {
  if (a.empty()) throw DomainError("cannot solve over an empty set");
  PreconditionCheck pre = check_bleichenbacher_precondition(a, u);
  if (!pre.holds && !force)
    throw DomainError(
        "Bleichenbacher precondition fails (margin " +
        std::to_string(pre.margin) + "); pass force to attempt anyway");

  const std::uint64_t n = a.n();
  const auto& mem = a.members();
  BleichenbacherWitness w;

  std::uint64_t amin = mem.front();
  if (amin * amin < n) {
    // Small-element shortcut: k copies of min(A) with k*amin in (N-k, N].
    BigInt s = isqrt(BigInt(n));
    std::uint64_t sq = s.convert_to<std::uint64_t>();
    std::uint64_t k = (n - sq + amin - 1) / amin;
    while (k * (amin + 1) <= n) ++k;
    while (k * amin > n) --k;
    w.k = k;
    w.parts.assign(k, amin);
    w.total = k * amin;
    validate_witness(a, w);
    return w;
  }

  unsigned kmax = (unsigned)((n + amin - 1) / amin);
  SuffixReach reach(mem, n, kmax, std::uint64_t(256) << 20);

  for (unsigned k = 1; k <= kmax; ++k) {
    std::uint64_t lo = n >= k ? n - k : 0;  // window (lo, n]
    // prefer the largest reachable total, then the lexicographically
    // smallest part multiset
    for (std::uint64_t s = n; s > lo; --s) {
      if (!reach.test(0, k, s)) continue;
      w.k = k;
      w.total = s;
      std::uint64_t rem = s;
      std::size_t i = 0;
      for (unsigned left = k; left > 0; --left) {
        for (std::size_t j = i; j < mem.size(); ++j) {
          if (mem[j] > rem) break;
          if (reach.test(j, left - 1, rem - mem[j])) {
            w.parts.push_back(mem[j]);
            rem -= mem[j];
            i = j;
            break;
          }
        }
      }
      validate_witness(a, w);
      return w;
    }
  }
  throw CounterexampleError(
      "no k-part sum lands in (N-k, N]; precondition " +
      std::string(pre.holds ? "held" : "was violated (forced run)"));
}

nlohmann::json BleichenbacherWitness::to_json() const {
  nlohmann::json doc;
  doc["k"] = k;
  doc["parts"] = parts;
  doc["total"] = total;
  return doc;
}

namespace {

// Convolution ladder with a 128-bit fast path while |A|^k fits.
class RepLadder {
 public:
  RepLadder(const std::vector<std::uint64_t>& a, std::uint64_t ceiling,
            unsigned kmax)
      : a_(a), ceiling_(ceiling) {
    double bits = a.empty() ? 0.0 : (double)kmax * std::log2((double)a.size());
    wide_ = bits >= 126.0;
    if (wide_)
      big_.assign(ceiling_ + 1, BigInt(0));
    else
      fast_.assign(ceiling_ + 1, 0);
    for (std::uint64_t v : a_)
      if (v <= ceiling_) bump(v, 1);
    k_ = 1;
  }

  unsigned k() const { return k_; }

  void step() {  // advance from c_k to c_{k+1}
    if (wide_) {
      std::vector<BigInt> next(ceiling_ + 1, BigInt(0));
      for (std::uint64_t v : a_) {
        if (v > ceiling_) continue;
        for (std::uint64_t t = ceiling_; t >= v; --t)
          if (!big_[t - v].is_zero()) next[t] += big_[t - v];
      }
      big_ = std::move(next);
    } else {
      std::vector<unsigned __int128> next(ceiling_ + 1, 0);
      for (std::uint64_t v : a_) {
        if (v > ceiling_) continue;
        const std::size_t lim = ceiling_ - v;
        for (std::size_t t = 0; t <= lim; ++t)
          if (fast_[t]) next[t + v] += fast_[t];
      }
      fast_ = std::move(next);
    }
    ++k_;
  }

  BigInt at(std::uint64_t t) const {
    if (t > ceiling_) return 0;
    if (wide_) return big_[t];
    unsigned __int128 v = fast_[t];
    BigInt out = (std::uint64_t)(v >> 64);
    out <<= 64;
    out += (std::uint64_t)v;
    return out;
  }

  BigInt window_sum(std::uint64_t lo_excl, std::uint64_t hi) const {
    BigInt s = 0;
    if (hi > ceiling_) hi = ceiling_;
    for (std::uint64_t t = lo_excl + 1; t <= hi; ++t) s += at(t);
    return s;
  }

 private:
  void bump(std::uint64_t t, std::uint64_t v) {
    if (wide_)
      big_[t] += v;
    else
      fast_[t] += v;
  }

  const std::vector<std::uint64_t>& a_;
  std::uint64_t ceiling_;
  bool wide_ = false;
  unsigned k_ = 1;
  std::vector<unsigned __int128> fast_;
  std::vector<BigInt> big_;
};

void validate_rep_args(const WeightedIntegerSet& a, unsigned k,
                       std::uint64_t ceiling) {
  if (k < 1 || k > 200)
    throw ResourceError("representation arity must be in [1, 200]");
  if (ceiling > 1000000)
    throw ResourceError("representation ceiling capped at 10^6 (desk scale); "
                        "estimated cost " +
                        std::to_string((double)k * (double)ceiling *
                                       (double)a.size()) +
                        " cell updates");
}

}  // namespace

RepCountTable rep_count_table(const WeightedIntegerSet& a, unsigned k,
                              std::uint64_t ceiling) {
  validate_rep_args(a, k, ceiling);
  RepLadder ladder(a.members(), ceiling, k);
  while (ladder.k() < k) ladder.step();
  RepCountTable out;
  out.k = k;
  out.ceiling = ceiling;
  out.counts.resize(ceiling + 1);
  for (std::uint64_t t = 0; t <= ceiling; ++t) out.counts[t] = ladder.at(t);
  return out;
}

BigInt RepCountTable::window_sum(std::uint64_t lo_exclusive,
                                 std::uint64_t hi) const {
  BigInt s = 0;
  for (std::uint64_t t = lo_exclusive + 1; t <= hi && t <= ceiling; ++t)
    s += counts[t];
  return s;
}

BigInt windowed_count(const WeightedIntegerSet& a, std::uint64_t n,
                      unsigned k) {
  validate_rep_args(a, k, n);
  RepLadder ladder(a.members(), n, k);
  while (ladder.k() < k) ladder.step();
  return ladder.window_sum(n >= k ? n - k : 0, n);
}

namespace {

HypothesisAReport run_alpha_scan(const WeightedIntegerSet& a, unsigned k_lo,
                                 unsigned k_hi, bool with_measured_c,
                                 double log_u) {
  if (a.empty()) throw DomainError("hypothesis check needs a non-empty set");
  if (k_lo > k_hi)
    throw DomainError("empty k-range [" + std::to_string(k_lo) + ", " +
                      std::to_string(k_hi) + "]");
  validate_rep_args(a, k_hi, a.n());
  HypothesisAReport rep;
  const std::uint64_t n = a.n();
  BigInt size(a.size());
  RepLadder ladder(a.members(), n, k_hi);
  BigInt pow_size = size;
  Rational best = -1;
  for (unsigned k = 1; k <= k_hi; ++k) {
    if (k > 1) {
      ladder.step();
      pow_size *= size;
    }
    if (k < k_lo) continue;
    AlphaRow row;
    row.k = k;
    row.count = ladder.window_sum(n >= k ? n - k : 0, n);
    row.alpha = Rational(row.count * n, pow_size);
    row.alpha_f = to_double(row.alpha);
    if (with_measured_c && row.count > 0)
      row.measured_c = std::exp(log_double(row.alpha) / (double)k) * log_u;
    if (row.alpha > best) {
      best = row.alpha;
      rep.best_k = k;
      rep.best_alpha = row.alpha;
    }
    rep.table.push_back(std::move(row));
  }
  return rep;
}

}  // namespace

HypothesisAReport hypothesis_a_check(const WeightedIntegerSet& a, double u,
                                     double v, double lambda) {
  if (!(u >= 1.0) || !(v >= u)) throw DomainError("need 1 <= u <= v");
  unsigned k_lo = (unsigned)std::ceil(u - 1e-12);
  unsigned k_hi = (unsigned)std::floor(v + 1e-12);
  HypothesisAReport rep = run_alpha_scan(a, k_lo, k_hi, false, 0.0);

  Rational n(BigInt(a.n()));
  Rational rv = rat(v), ru = rat(u), rl = rat(lambda);
  rep.domain_ok = true;
  for (std::uint64_t m : a.members()) {
    Rational mm{BigInt(m)};
    if (!(mm > n / rv && mm <= n / ru)) {
      rep.domain_ok = false;
      break;
    }
  }
  rep.sum_ok = a.reciprocal_sum() >= (1 + rl) / ru;
  rep.scale_ok = n >= pow_rat(100 * rv / rl, 2);
  rep.refinement_k_limit = std::exp(-1.0 / u) * v;
  for (const auto& row : rep.table)
    if ((double)row.k <= rep.refinement_k_limit && row.count > 0)
      rep.refinement_found = true;
  return rep;
}

HypothesisAReport hypothesis_a_star_check(const WeightedIntegerSet& a,
                                          double u, double lambda) {
  if (!(u >= 1.0)) throw DomainError("need u >= 1");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("need lambda in (0,1)");
  unsigned k_lo = (unsigned)std::ceil(u - 1e-12);
  unsigned k_hi = (unsigned)std::floor(u / lambda + 1e-12);
  HypothesisAReport rep = run_alpha_scan(a, k_lo, k_hi, true, std::log(u));

  Rational n(BigInt(a.n()));
  Rational ru = rat(u), rl = rat(lambda);
  rep.domain_ok = true;
  for (std::uint64_t m : a.members()) {
    Rational mm{BigInt(m)};
    if (!(mm > rl * n / ru && mm <= n / ru)) {
      rep.domain_ok = false;
      break;
    }
  }
  rep.sum_ok = a.reciprocal_sum() >= (1 + rl) / ru;
  rep.scale_ok = n >= pow_rat(10 * ru / rl, 2);
  rep.refinement_k_limit = 0.0;
  return rep;
}

nlohmann::json HypothesisAReport::to_json() const {
  nlohmann::json doc;
  doc["domain_ok"] = domain_ok;
  doc["sum_ok"] = sum_ok;
  doc["scale_ok"] = scale_ok;
  doc["best_k"] = best_k;
  doc["best_alpha"] = rational_str(best_alpha);
  doc["refinement_found"] = refinement_found;
  doc["refinement_k_limit"] = refinement_k_limit;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table) {
    nlohmann::json rj;
    rj["k"] = r.k;
    rj["count"] = r.count.str();
    rj["alpha_rational"] = rational_str(r.alpha);
    rj["alpha_float"] = r.alpha_f;
    if (r.measured_c != 0.0) rj["measured_c"] = r.measured_c;
    rows.push_back(std::move(rj));
  }
  doc["table"] = std::move(rows);
  return doc;
}

std::string HypothesisAReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "k,count,alpha_rational,alpha_float\n";
  for (const auto& r : table)
    os << r.k << ',' << r.count.str() << ',' << rational_str(r.alpha) << ','
       << r.alpha_f << '\n';
  return os.str();
}

DyadicBand dyadic_localization(const WeightedIntegerSet& a, double u,
                               double lambda) {
  if (!(u >= 1.0)) throw DomainError("need u >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("need lambda in (0,1)");
  Rational ru = rat(u), rl = rat(lambda);
  Rational u0 = 3 / rl;
  Rational n(BigInt(a.n()));
  bool premise_ok = a.reciprocal_sum() >= (1 + rl) / ru;

  Rational scale = ru;  // u0^j * u
  for (unsigned j = 0;; ++j) {
    Rational hi = n / scale;
    Rational lo = n / (scale * u0);
    if (!a.empty() && hi < Rational(BigInt(a.members().front()))) break;
    if (hi < 1) break;
    std::vector<std::uint64_t> band_members;
    for (std::uint64_t m : a.members()) {
      Rational mm{BigInt(m)};
      if (mm > lo && mm <= hi) band_members.push_back(m);
    }
    Rational sum = sum_reciprocals(band_members).normalized();
    Rational threshold = (1 + rl / 3) / scale;
    if (sum >= threshold) {
      DyadicBand band;
      band.j = j;
      band.lo = lo;
      band.hi = hi;
      band.band_sum = sum;
      band.threshold = threshold;
      band.premise_ok = premise_ok;
      return band;
    }
    if (a.empty()) break;
    scale *= u0;
  }
  throw CounterexampleError(
      std::string("no dyadic band meets its threshold; premise ") +
      (premise_ok ? "held, this falsifies the geometric-series argument"
                  : "was violated"));
}

nlohmann::json DyadicBand::to_json() const {
  nlohmann::json doc;
  doc["j"] = j;
  doc["band"] = {rational_str(lo), rational_str(hi)};
  doc["band_sum"] = rational_str(band_sum);
  doc["band_sum_float"] = to_double(band_sum);
  doc["threshold"] = rational_str(threshold);
  doc["premise_ok"] = premise_ok;
  return doc;
}

DoublingDecomposition popular_doubling(const WeightedIntegerSet& a,
                                       double lambda, double u) {
  if (a.size() < 2) throw DomainError("popular doubling needs |A| >= 2");
  if (!(u > 1.0)) throw DomainError("need u > 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("need lambda in (0,1)");
  const auto& mem = a.members();
  if ((double)mem.size() * (double)mem.size() > 2e9)
    throw ResourceError("|A|^2 pair enumeration over budget");

  std::uint64_t top = 2 * mem.back();
  if (top > 200000000ULL)
    throw ResourceError("2A range " + std::to_string(top) + " over budget");
  std::vector<std::uint64_t> r2a(top + 1, 0);
  for (std::uint64_t x : mem)
    for (std::uint64_t y : mem) ++r2a[x + y];

  std::uint64_t sumset_size = 0, rmax = 0;
  for (std::uint64_t c : r2a) {
    if (c) ++sumset_size;
    rmax = std::max(rmax, c);
  }

  Rational rl4 = pow_rat(rat(lambda), 4);
  BigInt asq = BigInt(mem.size()) * BigInt(mem.size());
  Rational base = rl4 * asq / BigInt(sumset_size);  // r_i = 2^(i-10) * base

  // thresholds r_0 = 0, r_i for i >= 1 until they clear the largest count
  std::vector<Rational> r;
  r.push_back(Rational(0));
  for (unsigned i = 1;; ++i) {
    Rational ri = base * pow_rat(Rational(2), i) / 1024;
    r.push_back(ri);
    if (ri > rmax) break;
  }

  std::vector<std::uint64_t> bins(r.size(), 0);  // bins[i] = |B_i|
  for (std::uint64_t c : r2a) {
    if (!c) continue;
    // find i with r_i < c <= r_{i+1}
    std::size_t i = 0;
    while (i + 1 < r.size() && Rational(BigInt(c)) > r[i + 1]) ++i;
    ++bins[i];
  }

  // threshold lambda^4 |A|^2 / (512 log u), log u bracketed outward so the
  // acceptance of i0 is conservative
  RatInterval logu = log_outward(rat(u));
  Rational thr_hi = rl4 * asq / (512 * logu.lo);

  DoublingDecomposition out;
  out.r_thresholds = r;
  out.bin_sizes = bins;
  bool found = false;
  for (unsigned i = 1; i < r.size(); ++i) {
    if (bins[i] == 0) continue;
    if (Rational(BigInt(bins[i])) * r[i] >= thr_hi) {
      out.i0 = i;
      found = true;
      break;
    }
  }
  if (!found)
    throw CounterexampleError(
        "no bin satisfies |B_i| r_i >= lambda^4 |A|^2 / (512 log u)");

  std::uint64_t e_size = 0;
  for (std::uint64_t t = 0; t <= top; ++t) {
    if (!r2a[t]) continue;
    if (Rational(BigInt(r2a[t])) > r[out.i0]) {
      out.d_members.push_back(t);
      e_size += r2a[t];
    }
  }
  out.e_size = e_size;
  out.d_ambient = 2 * a.n();
  Rational bad(asq - e_size);
  out.ecomplement_ok = bad <= rl4 * asq / 64;
  return out;
}

nlohmann::json DoublingDecomposition::to_json() const {
  nlohmann::json doc;
  doc["i0"] = i0;
  doc["bin_sizes"] = bin_sizes;
  nlohmann::json thr = nlohmann::json::array();
  for (const auto& t : r_thresholds) thr.push_back(rational_str(t));
  doc["r_thresholds"] = std::move(thr);
  doc["E_size"] = e_size;
  doc["D"] = {{"N", d_ambient}, {"members", d_members}};
  doc["ecomplement_ok"] = ecomplement_ok;
  return doc;
}

}  // namespace sievelab
