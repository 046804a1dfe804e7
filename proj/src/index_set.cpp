#include "mixlab/index_set.hpp"

#include "mixlab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace mixlab {

DissociatedSequence::DissociatedSequence(std::vector<BigInt> t) : terms(std::move(t)) {
  BigInt running = 0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j] <= 0) throw PreconditionError("dissociated sequence needs positive terms");
    if (terms[j] <= 2 * running) {
      throw PreconditionError("dissociation fails at term " + std::to_string(j) + ": " +
                              terms[j].str() + " <= 2 * " + running.str());
    }
    running += terms[j];
  }
}

BigInt DissociatedSequence::term_sum() const {
  BigInt s = 0;
  for (const auto& t : terms) s += t;
  return s;
}

struct IndexSet::Node {
  enum class Kind {
    Explicit,
    Squares,
    PrimePowers,
    Naturals,
    PowerIntervals,
    RieszSupport,
    Complement,
    Shift,
    Union,
  };
  Kind kind;

  // Explicit
  std::vector<BigInt> values;
  // PrimePowers
  unsigned exponent = 1;
  // PowerIntervals
  BigInt base;
  unsigned step = 1, lo_shift = 0, hi_shift = 1, n_start = 1;
  // RieszSupport
  std::vector<BigInt> freqs;
  std::optional<unsigned> max_word;
  BigInt shift_offset;
  // Complement / Shift
  std::shared_ptr<const Node> inner;
  // Union
  std::vector<std::shared_ptr<const Node>> parts;
};

namespace {

using Node = IndexSet::Node;

bool node_contains(const Node& n, const BigInt& v);

bool power_interval_contains(const Node& n, const BigInt& v) {
  if (v < 1) return false;
  // v is in [base^(step*k + lo), base^(step*k + hi) - 1] for some k >= n_start.
  // Scan exponent bands; band count is logarithmic in v.
  BigInt lo = pow_big(n.base, n.step * n.n_start + n.lo_shift);
  BigInt hi = pow_big(n.base, n.step * n.n_start + n.hi_shift) - 1;
  BigInt band_factor = pow_big(n.base, n.step);
  while (lo <= v) {
    if (v <= hi) return true;
    lo *= band_factor;
    hi = (hi + 1) * band_factor - 1;
  }
  return false;
}

BigInt riesz_greedy_remainder(const std::vector<BigInt>& freqs, const BigInt& value,
                              std::optional<unsigned> max_word) {
  // Dissociation forces the decomposition digit by digit from the top.
  BigInt rem = value;
  std::vector<BigInt> prefix_sums(freqs.size() + 1, 0);
  for (std::size_t i = 0; i < freqs.size(); ++i) prefix_sums[i + 1] = prefix_sums[i] + freqs[i];
  unsigned used = 0;
  for (std::size_t j = freqs.size(); j-- > 0;) {
    if (abs(rem) > prefix_sums[j]) {
      rem += rem > 0 ? -freqs[j] : freqs[j];
      ++used;
      if (max_word && used > *max_word) return BigInt(1);  // nonzero sentinel: word too long
    }
  }
  return rem;
}

bool node_contains(const Node& n, const BigInt& v) {
  switch (n.kind) {
    case Node::Kind::Explicit:
      return std::binary_search(n.values.begin(), n.values.end(), v);
    case Node::Kind::Squares:
      return v >= 0 && is_perfect_square(v);
    case Node::Kind::PrimePowers: {
      if (v < 2) return false;
      return prime_root_of_power(v, n.exponent).has_value();
    }
    case Node::Kind::Naturals:
      return v >= 0;
    case Node::Kind::PowerIntervals:
      return power_interval_contains(n, v);
    case Node::Kind::RieszSupport:
      return riesz_greedy_remainder(n.freqs, v - n.shift_offset, n.max_word) == 0;
    case Node::Kind::Complement:
      return !node_contains(*n.inner, v);
    case Node::Kind::Shift:
      return node_contains(*n.inner, v - n.shift_offset);
    case Node::Kind::Union:
      for (const auto& p : n.parts) {
        if (node_contains(*p, v)) return true;
      }
      return false;
  }
  return false;
}

std::vector<std::pair<BigInt, BigInt>> node_runs(const Node& n, const Window& w);

// Enumeration avoids per-value membership scans where the kind allows it.
void node_enumerate(const Node& n, const Window& w, std::vector<BigInt>& out) {
  if (w.empty()) return;
  switch (n.kind) {
    case Node::Kind::Explicit: {
      auto lo = std::lower_bound(n.values.begin(), n.values.end(), w.lo);
      auto hi = std::upper_bound(n.values.begin(), n.values.end(), w.hi);
      out.insert(out.end(), lo, hi);
      return;
    }
    case Node::Kind::Squares: {
      BigInt r = w.lo <= 0 ? BigInt(0) : isqrt(w.lo - 1) + 1;
      for (; r * r <= w.hi; ++r) out.push_back(r * r);
      return;
    }
    case Node::Kind::PrimePowers: {
      // Walk candidate roots from the integer e-th root of the window start.
      BigInt root = 2;
      if (w.lo > 2) {
        double guess = std::pow(w.lo.convert_to<double>(), 1.0 / n.exponent);
        root = BigInt(static_cast<long long>(guess)) - 2;
        if (root < 2) root = 2;
        while (pow_big(root, n.exponent) < w.lo) ++root;
      }
      for (; pow_big(root, n.exponent) <= w.hi; ++root) {
        if (root <= BigInt(std::numeric_limits<std::uint64_t>::max()) &&
            is_prime_u64(root.convert_to<std::uint64_t>())) {
          out.push_back(pow_big(root, n.exponent));
        }
      }
      return;
    }
    case Node::Kind::Naturals: {
      for (BigInt v = w.lo < 0 ? BigInt(0) : w.lo; v <= w.hi; ++v) out.push_back(v);
      return;
    }
    case Node::Kind::PowerIntervals: {
      BigInt lo = pow_big(n.base, n.step * n.n_start + n.lo_shift);
      BigInt hi = pow_big(n.base, n.step * n.n_start + n.hi_shift) - 1;
      BigInt band_factor = pow_big(n.base, n.step);
      while (lo <= w.hi) {
        BigInt a = lo > w.lo ? lo : w.lo;
        BigInt b = hi < w.hi ? hi : w.hi;
        for (BigInt v = a; v <= b; ++v) out.push_back(v);
        lo *= band_factor;
        hi = (hi + 1) * band_factor - 1;
      }
      return;
    }
    case Node::Kind::RieszSupport: {
      DissociatedSequence d{std::vector<BigInt>(n.freqs)};
      auto words = riesz_support(d, n.max_word, n.shift_offset, w);
      out.insert(out.end(), words.begin(), words.end());
      return;
    }
    case Node::Kind::Shift: {
      Window shifted{w.lo - n.shift_offset, w.hi - n.shift_offset};
      std::vector<BigInt> innervals;
      node_enumerate(*n.inner, shifted, innervals);
      for (auto& v : innervals) out.push_back(v + n.shift_offset);
      return;
    }
    case Node::Kind::Complement:
    case Node::Kind::Union: {
      // Enumerate through the run decomposition; inner kinds with analytic
      // runs avoid the per-integer membership scan entirely.
      for (const auto& [a, b] : node_runs(n, w)) {
        for (BigInt v = a; v <= b; ++v) out.push_back(v);
      }
      return;
    }
  }
}

// Maximal runs [a, b] of members inside the window, without per-integer
// scans where the kind allows it.
std::vector<std::pair<BigInt, BigInt>> node_runs(const Node& n, const Window& w) {
  std::vector<std::pair<BigInt, BigInt>> runs;
  if (w.empty()) return runs;
  switch (n.kind) {
    case Node::Kind::Naturals: {
      BigInt lo = w.lo < 0 ? BigInt(0) : w.lo;
      if (lo <= w.hi) runs.emplace_back(lo, w.hi);
      return runs;
    }
    case Node::Kind::PowerIntervals: {
      BigInt lo = pow_big(n.base, n.step * n.n_start + n.lo_shift);
      BigInt hi = pow_big(n.base, n.step * n.n_start + n.hi_shift) - 1;
      BigInt band_factor = pow_big(n.base, n.step);
      while (lo <= w.hi) {
        BigInt a = lo > w.lo ? lo : w.lo;
        BigInt b = hi < w.hi ? hi : w.hi;
        if (a <= b) runs.emplace_back(a, b);
        lo *= band_factor;
        hi = (hi + 1) * band_factor - 1;
      }
      return runs;
    }
    case Node::Kind::Complement: {
      auto inner = node_runs(*n.inner, w);
      BigInt cur = w.lo;
      for (const auto& [a, b] : inner) {
        if (a > cur) runs.emplace_back(cur, a - 1);
        cur = b + 1;
      }
      if (cur <= w.hi) runs.emplace_back(cur, w.hi);
      return runs;
    }
    case Node::Kind::Shift: {
      auto inner = node_runs(*n.inner, Window{w.lo - n.shift_offset, w.hi - n.shift_offset});
      for (auto& [a, b] : inner) runs.emplace_back(a + n.shift_offset, b + n.shift_offset);
      return runs;
    }
    case Node::Kind::Union: {
      std::vector<std::pair<BigInt, BigInt>> all;
      for (const auto& p : n.parts) {
        auto part = node_runs(*p, w);
        all.insert(all.end(), part.begin(), part.end());
      }
      std::sort(all.begin(), all.end());
      for (auto& r : all) {
        if (!runs.empty() && r.first <= runs.back().second + 1) {
          if (r.second > runs.back().second) runs.back().second = r.second;
        } else {
          runs.push_back(r);
        }
      }
      return runs;
    }
    default: {
      std::vector<BigInt> vals;
      node_enumerate(n, w, vals);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (const auto& v : vals) {
        if (!runs.empty() && runs.back().second + 1 == v) {
          runs.back().second = v;
        } else {
          runs.emplace_back(v, v);
        }
      }
      return runs;
    }
  }
}

nlohmann::json node_to_json(const Node& n) {
  nlohmann::json j;
  switch (n.kind) {
    case Node::Kind::Explicit: {
      j["kind"] = "explicit";
      auto arr = nlohmann::json::array();
      for (const auto& v : n.values) arr.push_back(v.str());
      j["values"] = arr;
      break;
    }
    case Node::Kind::Squares:
      j["kind"] = "squares";
      break;
    case Node::Kind::PrimePowers:
      j["kind"] = "prime-powers";
      j["exponent"] = n.exponent;
      break;
    case Node::Kind::Naturals:
      j["kind"] = "naturals";
      break;
    case Node::Kind::PowerIntervals:
      j["kind"] = "power-intervals";
      j["base"] = n.base.str();
      j["step"] = n.step;
      j["lo_shift"] = n.lo_shift;
      j["hi_shift"] = n.hi_shift;
      j["n_start"] = n.n_start;
      break;
    case Node::Kind::RieszSupport: {
      j["kind"] = "riesz-support";
      auto arr = nlohmann::json::array();
      for (const auto& v : n.freqs) arr.push_back(v.str());
      j["freqs"] = arr;
      if (n.max_word) {
        j["max_word"] = *n.max_word;
      } else {
        j["max_word"] = nullptr;
      }
      j["shift"] = n.shift_offset.str();
      break;
    }
    case Node::Kind::Complement:
      j["kind"] = "complement";
      j["inner"] = node_to_json(*n.inner);
      break;
    case Node::Kind::Shift:
      j["kind"] = "shift";
      j["offset"] = n.shift_offset.str();
      j["inner"] = node_to_json(*n.inner);
      break;
    case Node::Kind::Union: {
      j["kind"] = "union";
      auto arr = nlohmann::json::array();
      for (const auto& p : n.parts) arr.push_back(node_to_json(*p));
      j["parts"] = arr;
      break;
    }
  }
  return j;
}

std::shared_ptr<const Node> node_from_json(const nlohmann::json& j);

std::string node_describe(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Explicit:
      return "explicit(" + std::to_string(n.values.size()) + " values)";
    case Node::Kind::Squares:
      return "squares";
    case Node::Kind::PrimePowers:
      return "prime-powers(e=" + std::to_string(n.exponent) + ")";
    case Node::Kind::Naturals:
      return "naturals";
    case Node::Kind::PowerIntervals:
      return "power-intervals(base=" + n.base.str() + ",step=" + std::to_string(n.step) + ")";
    case Node::Kind::RieszSupport:
      return "riesz-support(" + std::to_string(n.freqs.size()) + " freqs)";
    case Node::Kind::Complement:
      return "complement(" + node_describe(*n.inner) + ")";
    case Node::Kind::Shift:
      return "shift(" + node_describe(*n.inner) + " by " + n.shift_offset.str() + ")";
    case Node::Kind::Union:
      return "union(" + std::to_string(n.parts.size()) + " parts)";
  }
  return "?";
}

}  // namespace

IndexSet IndexSet::explicit_set(std::vector<BigInt> values) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Explicit;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  n->values = std::move(values);
  return IndexSet(n);
}

IndexSet IndexSet::squares() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Squares;
  return IndexSet(n);
}

IndexSet IndexSet::prime_powers(unsigned exponent) {
  if (exponent == 0) throw ConfigError("prime-powers exponent must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::PrimePowers;
  n->exponent = exponent;
  return IndexSet(n);
}

IndexSet IndexSet::naturals() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Naturals;
  return IndexSet(n);
}

IndexSet IndexSet::power_intervals(const BigInt& base, unsigned step, unsigned lo_shift,
                                   unsigned hi_shift, unsigned n_start) {
  if (base < 2) throw ConfigError("power-intervals base must be >= 2");
  if (hi_shift <= lo_shift) throw ConfigError("power-intervals needs hi_shift > lo_shift");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::PowerIntervals;
  n->base = base;
  n->step = step;
  n->lo_shift = lo_shift;
  n->hi_shift = hi_shift;
  n->n_start = n_start;
  return IndexSet(n);
}

IndexSet IndexSet::thick_power_set(const BigInt& base, unsigned step) {
  return power_intervals(base, step, 0, 1, 1);
}

IndexSet IndexSet::riesz_support_set(DissociatedSequence freqs, std::optional<unsigned> max_word,
                                     const BigInt& shift) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::RieszSupport;
  n->freqs = std::move(freqs.terms);
  n->max_word = max_word;
  n->shift_offset = shift;
  return IndexSet(n);
}

IndexSet IndexSet::complement(IndexSet inner) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Complement;
  n->inner = std::shared_ptr<const Node>(inner.node_);
  return IndexSet(n);
}

IndexSet IndexSet::shifted(IndexSet inner, const BigInt& offset) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Shift;
  n->inner = std::shared_ptr<const Node>(inner.node_);
  n->shift_offset = offset;
  return IndexSet(n);
}

IndexSet IndexSet::set_union(std::vector<IndexSet> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Union;
  for (auto& p : parts) n->parts.push_back(p.node_);
  return IndexSet(n);
}

bool IndexSet::contains(const BigInt& value) const { return node_contains(*node_, value); }

std::vector<BigInt> IndexSet::enumerate(const Window& window) const {
  std::vector<BigInt> out;
  node_enumerate(*node_, window, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<BigInt, BigInt>> IndexSet::runs_in_window(const Window& window) const {
  return node_runs(*node_, window);
}

Rational IndexSet::density_in_window(const Window& window) const {
  if (window.empty()) throw PreconditionError("density: empty window");
  BigInt total = window.hi - window.lo + 1;
  return Rational(BigInt(enumerate(window).size())) / total;
}

std::string IndexSet::describe() const { return node_describe(*node_); }

std::string IndexSet::to_json() const {
  nlohmann::json j;
  j["format"] = "mixlab-set/1";
  j["set"] = node_to_json(*node_);
  return j.dump(2) + "\n";
}

namespace {

std::shared_ptr<const Node> node_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "explicit") {
    std::vector<BigInt> vals;
    for (const auto& v : j.at("values")) vals.push_back(parse_bigint(v.get<std::string>()));
    return IndexSet::explicit_set(std::move(vals)).node_ptr();
  }
  if (kind == "squares") return IndexSet::squares().node_ptr();
  if (kind == "naturals") return IndexSet::naturals().node_ptr();
  if (kind == "prime-powers") {
    return IndexSet::prime_powers(j.at("exponent").get<unsigned>()).node_ptr();
  }
  if (kind == "power-intervals") {
    return IndexSet::power_intervals(parse_bigint(j.at("base").get<std::string>()),
                                     j.at("step").get<unsigned>(), j.at("lo_shift").get<unsigned>(),
                                     j.at("hi_shift").get<unsigned>(), j.at("n_start").get<unsigned>())
        .node_ptr();
  }
  if (kind == "riesz-support") {
    std::vector<BigInt> freqs;
    for (const auto& v : j.at("freqs")) freqs.push_back(parse_bigint(v.get<std::string>()));
    std::optional<unsigned> max_word;
    if (!j.at("max_word").is_null()) max_word = j.at("max_word").get<unsigned>();
    return IndexSet::riesz_support_set(DissociatedSequence(std::move(freqs)), max_word,
                                       parse_bigint(j.at("shift").get<std::string>()))
        .node_ptr();
  }
  if (kind == "complement") {
    return IndexSet::complement(IndexSet(node_from_json(j.at("inner")))).node_ptr();
  }
  if (kind == "shift") {
    return IndexSet::shifted(IndexSet(node_from_json(j.at("inner"))),
                             parse_bigint(j.at("offset").get<std::string>()))
        .node_ptr();
  }
  if (kind == "union") {
    std::vector<IndexSet> parts;
    for (const auto& p : j.at("parts")) parts.emplace_back(node_from_json(p));
    return IndexSet::set_union(std::move(parts)).node_ptr();
  }
  throw ConfigError("unknown index-set kind '" + kind + "'");
}

}  // namespace

IndexSet IndexSet::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("set document is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "mixlab-set/1") throw ConfigError("not a mixlab-set/1 document");
  return IndexSet(node_from_json(j.at("set")));
}

IndexSet IndexSet::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void IndexSet::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << to_json();
}

WitnessResult is_thick_in_window(const IndexSet& S, const Window& window, const BigInt& ell) {
  if (window.empty()) throw PreconditionError("is_thick_in_window: empty window");
  WitnessResult res;
  for (const auto& [a, b] : S.runs_in_window(window)) {
    if (b - a >= 2 * ell) {
      res.witness = ThickWitness{a + ell, ell, 1};
      return res;
    }
  }
  res.note = "no witness in window [" + window.lo.str() + ", " + window.hi.str() +
             "] for ell = " + ell.str() + " (not a proof of non-thickness)";
  return res;
}

WitnessResult r_thick_witness(const IndexSet& S, unsigned r, const Window& window,
                              const BigInt& ell, std::size_t candidate_cap) {
  if (r < 1) throw PreconditionError("r_thick_witness: r must be >= 1");
  if (window.empty()) throw PreconditionError("r_thick_witness: empty window");
  if (r == 1) return is_thick_in_window(S, window, ell);

  // Candidate centers are the points whose j=1 block already fits; the
  // remaining blocks are verified via membership queries.
  std::size_t scanned = 0;
  for (const auto& [a, b] : S.runs_in_window(window)) {
    for (BigInt k = a + ell; k + ell <= b; ++k) {
      if (++scanned > candidate_cap) {
        WitnessResult res;
        res.note = "candidate scan capped at " + std::to_string(candidate_cap) +
                   " centers; no witness found so far";
        return res;
      }
      bool ok = true;
      for (unsigned j = 2; j <= r && ok; ++j) {
        BigInt base = BigInt(j) * k;
        for (BigInt i = -ell; i <= ell; ++i) {
          if (!S.contains(base + i)) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        WitnessResult res;
        res.witness = ThickWitness{k, ell, r};
        return res;
      }
    }
  }
  WitnessResult res;
  res.note = "no r-thick witness in window (not a proof of non-r-thickness)";
  return res;
}

std::vector<BigInt> doubling_free_check(const IndexSet& S, const Window& window, const BigInt& m) {
  if (window.empty()) throw PreconditionError("doubling_free_check: empty window");
  std::vector<BigInt> violations;
  for (const auto& k : S.enumerate(window)) {
    if (S.contains(m * k)) violations.push_back(k);
  }
  return violations;
}

std::vector<BigInt> riesz_support(const DissociatedSequence& freqs,
                                  std::optional<unsigned> max_word, const BigInt& shift,
                                  const Window& window) {
  if (window.empty()) throw PreconditionError("riesz_support: empty window");
  // Suffix reach bounds prune the sign tree; dissociation keeps it slim.
  const auto& n = freqs.terms;
  std::vector<BigInt> reach(n.size() + 1, 0);
  for (std::size_t i = n.size(); i-- > 0;) reach[i] = reach[i + 1] + n[i];

  std::vector<BigInt> out;
  std::set<BigInt> seen;
  // Walk digits from the largest term down; partial covers terms [idx, end),
  // the remaining reach is sum of terms [0, idx).
  std::function<void(std::size_t, BigInt, unsigned)> walk = [&](std::size_t idx, BigInt partial,
                                                                unsigned used) {
    BigInt rem = idx == 0 ? BigInt(0) : reach[0] - reach[idx];
    if (shift + partial + rem < window.lo || shift + partial - rem > window.hi) return;
    if (idx == 0) {
      BigInt v = shift + partial;
      if (v >= window.lo && v <= window.hi) {
        if (!seen.insert(v).second) {
          throw std::logic_error("dissociation violated: duplicate sum " + v.str());
        }
        out.push_back(v);
      }
      return;
    }
    walk(idx - 1, partial, used);
    if (!max_word || used < *max_word) {
      walk(idx - 1, partial + n[idx - 1], used + 1);
      walk(idx - 1, partial - n[idx - 1], used + 1);
    }
  };
  walk(n.size(), BigInt(0), 0);
  std::sort(out.begin(), out.end());
  return out;
}

RajchmanCheckResult rajchman_dissociated_property_check(const IndexSet& M,
                                                        const DissociatedSequence& freqs,
                                                        std::optional<unsigned> max_word,
                                                        const BigInt& shift, const Window& window) {
  RajchmanCheckResult res;
  for (const auto& w : riesz_support(freqs, max_word, shift, window)) {
    if (!M.contains(w)) res.intersection.push_back(w);
  }
  return res;
}

DiscrepancyResult equidistribution_discrepancy(const IndexSet& S, const Rational& alpha,
                                               const Rational& alpha_error, std::size_t count) {
  if (count < 1) throw PreconditionError("discrepancy: count must be >= 1");
  // First `count` members of S in increasing order from 0.
  std::vector<BigInt> terms;
  BigInt lo = 0;
  BigInt chunk = 1024;
  while (terms.size() < count) {
    Window w{lo, lo + chunk - 1};
    auto vals = S.enumerate(w);
    terms.insert(terms.end(), vals.begin(), vals.end());
    lo += chunk;
    chunk *= 2;
  }
  terms.resize(count);

  std::vector<Rational> points;
  points.reserve(count);
  BigInt max_term = 0;
  for (const auto& s : terms) {
    if (s > max_term) max_term = s;
    Rational x = Rational(s) * alpha;
    BigInt ip = numerator(x) / denominator(x);
    Rational frac = x - Rational(ip);
    if (frac < 0) frac += 1;
    points.push_back(frac);
  }
  std::sort(points.begin(), points.end());

  // D*_N = max over i of max( x_(i) - (i-1)/N, i/N - x_(i) ).
  Rational dstar = 0;
  Rational N{BigInt(count)};
  for (std::size_t i = 1; i <= count; ++i) {
    Rational a = points[i - 1] - Rational(BigInt(i - 1)) / N;
    Rational b = Rational(BigInt(i)) / N - points[i - 1];
    if (a > dstar) dstar = a;
    if (b > dstar) dstar = b;
  }
  DiscrepancyResult res;
  res.star_discrepancy = dstar;
  res.perturbation_bound = Rational(max_term) * alpha_error;
  return res;
}

Rational golden_conjugate_approx(unsigned digits) {
  // (sqrt(5) - 1) / 2 to `digits` decimal places, exactly floored.
  BigInt scale = pow_big(BigInt(10), digits);
  BigInt root = isqrt(BigInt(5) * scale * scale);
  return Rational(root - scale, 2 * scale);
}

Rational sqrt2_approx(unsigned digits) {
  BigInt scale = pow_big(BigInt(10), digits);
  return Rational(isqrt(BigInt(2) * scale * scale), scale);
}

void export_enumeration_csv(const IndexSet& S, const Window& window, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  for (const auto& v : S.enumerate(window)) out << v.str() << "\n";
}

}  // namespace mixlab
