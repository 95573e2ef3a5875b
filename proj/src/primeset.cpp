#include "sievelab/primeset.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"

namespace sievelab {

std::vector<std::uint64_t> generate_primes(std::uint64_t limit,
                                           std::size_t segment_size,
                                           std::uint64_t memory_ceiling) {
  if (limit > memory_ceiling)
    throw ResourceError("prime limit " + std::to_string(limit) +
                        " exceeds memory ceiling " +
                        std::to_string(memory_ceiling));
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt((double)limit));
  while ((root + 1) * (root + 1) <= limit) ++root;
  while (root * root > limit) --root;

  std::vector<char> small(root + 1, 1);
  for (std::uint64_t i = 2; i * i <= root; ++i)
    if (small[i])
      for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;

  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i)
    if (small[i]) base.push_back(i);

  primes.reserve(limit > 10 ? static_cast<std::size_t>(
                                  1.2 * (double)limit / std::log((double)limit))
                            : 8);
  std::vector<char> sieve(segment_size);
  for (std::uint64_t low = 2; low <= limit; low += segment_size) {
    std::uint64_t high = std::min<std::uint64_t>(low + segment_size - 1, limit);
    std::fill(sieve.begin(), sieve.begin() + (high - low + 1), 1);
    for (std::uint64_t p : base) {
      if (p * p > high) break;
      std::uint64_t start = std::max(p * p, ((low + p - 1) / p) * p);
      for (std::uint64_t j = start; j <= high; j += p) sieve[j - low] = 0;
    }
    for (std::uint64_t n = low; n <= high; ++n)
      if (sieve[n - low]) primes.push_back(n);
  }
  return primes;
}

struct PrimeSet::Cache {
  std::once_flag members_once;
  std::once_flag universe_once;
  std::vector<std::uint64_t> members;
  std::shared_ptr<const std::vector<std::uint64_t>> universe;
};

PrimeSet::PrimeSet(std::uint64_t limit, Base base, std::vector<Edit> edits)
    : limit_(limit), base_(base), edits_(std::move(edits)),
      cache_(std::make_shared<Cache>()) {
  if (limit_ < 1) throw DomainError("PrimeSet limit must be >= 1");
  for (const auto& e : edits_) {
    if (e.interval && !e.list.empty())
      throw DomainError("edit cannot carry both an interval and a list");
    if (e.interval) {
      auto [lo, hi] = *e.interval;
      if (lo < 2 || hi > limit_ || lo > hi)
        throw DomainError("edit interval outside [2, limit]");
    }
  }
}

const std::vector<std::uint64_t>& PrimeSet::universe() const {
  std::call_once(cache_->universe_once, [&] {
    if (!cache_->universe)
      cache_->universe = std::make_shared<const std::vector<std::uint64_t>>(
          generate_primes(limit_));
  });
  return *cache_->universe;
}

const std::vector<std::uint64_t>& PrimeSet::members() const {
  std::call_once(cache_->members_once, [&] {
    const auto& all = universe();
    std::vector<std::uint64_t> cur;
    if (base_ == Base::all) cur = all;
    auto is_prime = [&](std::uint64_t n) {
      return std::binary_search(all.begin(), all.end(), n);
    };
    for (const auto& e : edits_) {
      std::vector<std::uint64_t> affected;
      if (e.interval) {
        auto lo = std::lower_bound(all.begin(), all.end(), e.interval->first);
        auto hi = std::upper_bound(all.begin(), all.end(), e.interval->second);
        affected.assign(lo, hi);
      } else {
        for (std::uint64_t p : e.list) {
          if (p > limit_ || !is_prime(p))
            throw DomainError("edit list entry " + std::to_string(p) +
                              " is not a prime <= limit");
          affected.push_back(p);
        }
        std::sort(affected.begin(), affected.end());
        affected.erase(std::unique(affected.begin(), affected.end()),
                       affected.end());
      }
      std::vector<std::uint64_t> next;
      next.reserve(cur.size() + affected.size());
      if (e.add)
        std::set_union(cur.begin(), cur.end(), affected.begin(),
                       affected.end(), std::back_inserter(next));
      else
        std::set_difference(cur.begin(), cur.end(), affected.begin(),
                            affected.end(), std::back_inserter(next));
      cur = std::move(next);
    }
    cache_->members = std::move(cur);
  });
  return cache_->members;
}

PrimeSet PrimeSet::complement() const {
  const auto& all = universe();
  const auto& mem = members();
  std::vector<std::uint64_t> rest;
  rest.reserve(all.size() - mem.size());
  std::set_difference(all.begin(), all.end(), mem.begin(), mem.end(),
                      std::back_inserter(rest));
  Edit add;
  add.add = true;
  add.list = std::move(rest);
  PrimeSet comp(limit_, Base::none, {std::move(add)});
  comp.cache_->universe = cache_->universe
                              ? cache_->universe
                              : std::make_shared<const std::vector<std::uint64_t>>(all);
  return comp;
}

bool PrimeSet::contains(std::uint64_t p) const {
  const auto& mem = members();
  return std::binary_search(mem.begin(), mem.end(), p);
}

PrimeSet PrimeSet::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid prime-set JSON: ") + e.what());
  }
  return from_json(doc);
}

PrimeSet PrimeSet::from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ParseError("prime-set document must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (it.key() != "limit" && it.key() != "base" && it.key() != "edits")
        throw ParseError("unknown prime-set field: " + it.key());
    if (!doc.contains("limit") || !doc.contains("base"))
      throw ParseError("prime-set document needs \"limit\" and \"base\"");
    std::uint64_t limit = doc.at("limit").get<std::uint64_t>();
    std::string base_s = doc.at("base").get<std::string>();
    Base base;
    if (base_s == "all")
      base = Base::all;
    else if (base_s == "none")
      base = Base::none;
    else
      throw ParseError("base must be \"all\" or \"none\"");
    std::vector<Edit> edits;
    if (doc.contains("edits")) {
      for (const auto& ej : doc.at("edits")) {
        for (auto it = ej.begin(); it != ej.end(); ++it)
          if (it.key() != "op" && it.key() != "interval" && it.key() != "list")
            throw ParseError("unknown edit field: " + it.key());
        Edit e;
        std::string op = ej.at("op").get<std::string>();
        if (op == "add")
          e.add = true;
        else if (op == "remove")
          e.add = false;
        else
          throw ParseError("edit op must be \"add\" or \"remove\"");
        if (ej.contains("interval") == ej.contains("list"))
          throw ParseError("edit needs exactly one of \"interval\", \"list\"");
        if (ej.contains("interval")) {
          const auto& iv = ej.at("interval");
          if (!iv.is_array() || iv.size() != 2)
            throw ParseError("edit interval must be [lo, hi]");
          e.interval = {iv[0].get<std::uint64_t>(), iv[1].get<std::uint64_t>()};
        } else {
          e.list = ej.at("list").get<std::vector<std::uint64_t>>();
        }
        edits.push_back(std::move(e));
      }
    }
    return PrimeSet(limit, base, std::move(edits));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid prime-set JSON: ") + e.what());
  }
}

nlohmann::json PrimeSet::to_json() const {
  nlohmann::json doc;
  doc["limit"] = limit_;
  doc["base"] = base_ == Base::all ? "all" : "none";
  nlohmann::json edits = nlohmann::json::array();
  for (const auto& e : edits_) {
    nlohmann::json ej;
    ej["op"] = e.add ? "add" : "remove";
    if (e.interval)
      ej["interval"] = {e.interval->first, e.interval->second};
    else
      ej["list"] = e.list;
    edits.push_back(std::move(ej));
  }
  doc["edits"] = std::move(edits);
  return doc;
}

ReciprocalSum reciprocal_prime_sum(const PrimeSet& set, std::uint64_t lo,
                                   std::uint64_t hi, unsigned max_denom_bits) {
  if (lo > hi || hi > set.limit())
    throw DomainError("reciprocal sum range must satisfy 0 <= lo <= hi <= limit");
  const auto& mem = set.members();
  auto begin = std::upper_bound(mem.begin(), mem.end(), lo);
  auto end = std::upper_bound(mem.begin(), mem.end(), hi);
  ReciprocalSum out;
  if (begin == end) {
    out.exact = 0;
    out.approx = 0;
    out.value = 0.0;
    return out;
  }
  double denom_bits = 0.0;
  for (auto it = begin; it != end; ++it) denom_bits += std::log2((double)*it);
  std::vector<std::uint64_t> range(begin, end);
  if (denom_bits <= (double)max_denom_bits) {
    out.exact = sum_reciprocals(range).normalized();
    out.is_exact = true;
    out.approx = Float128(numerator(out.exact)) / Float128(denominator(out.exact));
  } else {
    out.exact = 0;
    out.is_exact = false;
    Float128 acc = 0;
    for (std::uint64_t p : range) acc += Float128(1) / Float128(p);
    out.approx = acc;
  }
  out.value = out.approx.convert_to<double>();
  return out;
}

double mertens_product(const PrimeSet& set) {
  const auto& all = set.universe();
  const auto& mem = set.members();
  long double acc = 0.0L;
  std::size_t mi = 0;
  for (std::uint64_t p : all) {
    while (mi < mem.size() && mem[mi] < p) ++mi;
    if (mi < mem.size() && mem[mi] == p) continue;
    acc += std::log1p(-1.0L / (long double)p);
  }
  return (double)std::exp(acc);
}

std::optional<ConditionWitness> scan_theorem_condition(const PrimeSet& set,
                                                       double epsilon,
                                                       const ScanOptions& opts) {
  if (set.limit() < 10000)
    throw DomainError("scanner needs limit >= 10^4");
  if (!(epsilon > 0)) throw DomainError("epsilon must be > 0");

  double x = (double)set.limit();
  double v_max = opts.v_fixed ? *opts.v_fixed
                              : std::log(x) / (opts.vbound_denom *
                                               std::log(std::log(x)));
  if (!(v_max >= 1.0)) return std::nullopt;  // no admissible u <= v

  std::vector<double> grid;
  if (opts.u_grid) {
    grid = *opts.u_grid;
    std::sort(grid.begin(), grid.end());
  } else {
    for (double u = 1.0; u <= v_max; u *= opts.grid_ratio) grid.push_back(u);
  }

  std::uint64_t lo = floor_root(x, v_max);
  for (double u : grid) {
    if (u < 1.0 || u > v_max) continue;
    std::uint64_t hi = floor_root(x, u);
    ReciprocalSum s =
        reciprocal_prime_sum(set, lo, hi, opts.max_denom_bits);
    Rational threshold = (1 + rat(epsilon)) / rat(u);
    bool ok;
    if (s.is_exact) {
      ok = s.exact >= threshold;
    } else {
      Float128 thr =
          Float128(numerator(threshold)) / Float128(denominator(threshold));
      ok = s.approx >= thr;
    }
    if (ok) {
      ConditionWitness w;
      w.u = u;
      w.v = v_max;
      w.epsilon = epsilon;
      w.sum = std::move(s);
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace sievelab
