#include "lattab/coding.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lattab {

namespace {

std::size_t height(FiniteLattice const& L) {
  // Elements sorted so that every predecessor comes first: by down-set size.
  std::vector<Elem> order(L.size());
  for (Elem a = 0; a < L.size(); ++a) order[a] = a;
  auto below = [&](Elem a) {
    std::size_t k = 0;
    for (Elem b = 0; b < L.size(); ++b) k += L.leq(b, a);
    return k;
  };
  std::vector<std::size_t> down(L.size());
  for (Elem a = 0; a < L.size(); ++a) down[a] = below(a);
  std::sort(order.begin(), order.end(), [&](Elem a, Elem b) { return down[a] < down[b]; });
  std::vector<std::size_t> h(L.size(), 0);
  for (Elem a : order)
    for (Elem b = 0; b < L.size(); ++b)
      if (L.lt(b, a)) h[a] = std::max(h[a], h[b] + 1);
  return h[L.top()];
}

}  // namespace

CodedLattice build_coded_lattice(std::set<std::size_t> const& u, std::size_t n) {
  if (n == 0) throw InvalidArgument("L(U) needs at least one g-atom");
  for (std::size_t i : u)
    if (i >= n) throw InvalidArgument("U contains " + std::to_string(i) + ", outside [0, " + std::to_string(n) + ")");

  std::vector<std::string> names{"0", "1", "p", "s", "e0", "e1"};
  auto add = [&](std::string name) {
    names.push_back(std::move(name));
    return static_cast<Elem>(names.size() - 1);
  };
  CodedLattice out;
  out.n = n;
  out.u = u;
  out.p = 2;
  out.s = 3;
  out.e0 = 4;
  out.e1 = 5;
  for (std::size_t i = 0; i < n; ++i) out.g.push_back(add("g" + std::to_string(i)));
  out.f0 = add("f0");
  out.f1 = add("f1");
  for (std::size_t k = 0; 2 * k < n; ++k) out.a.push_back(add("a" + std::to_string(k)));
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) out.b.push_back(add("b" + std::to_string(k)));
  out.c.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!u.count(i)) out.c[i] = add("c" + std::to_string(i));

  std::vector<std::pair<Elem, Elem>> leq;
  std::vector<Elem> atoms{out.p, out.s, out.e0, out.e1};
  atoms.insert(atoms.end(), out.g.begin(), out.g.end());
  for (Elem x = 2; x < names.size(); ++x) leq.emplace_back(0, x), leq.emplace_back(x, 1);
  auto g_in = [&](std::size_t i, Elem co) {
    if (i < n) leq.emplace_back(out.g[i], co);
  };
  for (std::size_t i = 0; i < n; ++i) leq.emplace_back(out.g[i], i % 2 == 0 ? out.f0 : out.f1);
  for (std::size_t k = 0; k < out.a.size(); ++k) {
    leq.emplace_back(out.e1, out.a[k]);
    g_in(2 * k, out.a[k]);
    g_in(2 * k + 1, out.a[k]);
  }
  for (std::size_t k = 0; k < out.b.size(); ++k) {
    leq.emplace_back(out.e0, out.b[k]);
    g_in(2 * k + 1, out.b[k]);
    g_in(2 * k + 2, out.b[k]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.c[i]) continue;
    leq.emplace_back(out.g[i], *out.c[i]);
    leq.emplace_back(out.s, *out.c[i]);
  }

  auto report = validate_lattice(names, leq, ValidateOptions{names.size(), true});
  if (!report.ok) {
    auto const& v = report.violations.front();
    throw InternalError("L(U) is not a lattice: " + v.axiom + " at (" + names[v.a] + ", " + names[v.b] + ")");
  }
  out.lattice = std::move(*report.lattice);
  FiniteLattice const& L = out.lattice;

  if (height(L) != 3) throw InternalError("L(U) does not have height three");
  for (std::size_t i = 0; i < n; ++i) {
    bool const full = L.join(out.g[i], out.s) == L.top();
    if (full != (u.count(i) == 1)) throw InternalError("g" + std::to_string(i) + " v s disagrees with U");
  }
  if (!check_shore_sequence(L, out.g, out.e0, out.e1, out.f0, out.f1))
    throw InternalError("g-atoms do not form a Shore sequence");
  if (!check_sw_set(L, out.g, out.p, L.top())) throw InternalError("g-atoms do not form a Slaman-Woodin set");
  return out;
}

bool check_sw_set(FiniteLattice const& L, std::span<const Elem> g, Elem p, Elem q) {
  for (Elem x : {p, q})
    if (!L.contains(x)) throw InvalidArgument("unknown element " + std::to_string(x));
  for (Elem x : g) {
    if (!L.contains(x)) throw InvalidArgument("unknown element " + std::to_string(x));
    if (!L.leq(q, L.join(x, p))) return false;
    for (Elem y = 0; y < L.size(); ++y)
      if (L.lt(y, x) && L.leq(q, L.join(y, p))) return false;
  }
  return true;
}

bool check_shore_sequence(FiniteLattice const& L, std::span<const Elem> seq, Elem e0, Elem e1, Elem f0, Elem f1) {
  for (Elem x : {e0, e1, f0, f1})
    if (!L.contains(x)) throw InvalidArgument("unknown element " + std::to_string(x));
  for (Elem x : seq)
    if (!L.contains(x)) throw InvalidArgument("unknown element " + std::to_string(x));
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    bool const even = k % 2 == 0;
    Elem const expected = L.meet(L.join(seq[k], even ? e1 : e0), even ? f1 : f0);
    if (seq[k + 1] != expected) return false;
  }
  return true;
}

// Presentations ---------------------------------------------------------

namespace {

/// Uniform draw from [0, bound) by rejection, independent of the standard
/// library's distribution implementation.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t const limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t const x = rng();
    if (x < limit) return x % bound;
  }
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

Presentation scramble_impl(FiniteLattice const& L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Presentation pres;
  pres.n = L.size();
  pres.seed = seed;
  pres.names = L.names();
  pres.permutation.resize(L.size());
  for (Elem a = 0; a < L.size(); ++a) pres.permutation[a] = a;
  shuffle(pres.permutation, rng);
  auto const& perm = pres.permutation;
  pres.joins.assign(L.size(), std::vector<Elem>(L.size()));
  for (Elem a = 0; a < L.size(); ++a)
    for (Elem b = 0; b < L.size(); ++b) pres.joins[perm[a]][perm[b]] = perm[L.join(a, b)];
  for (Elem a = 0; a < L.size(); ++a)
    for (Elem b = 0; b < L.size(); ++b)
      if (L.leq(a, b)) pres.leq_facts.emplace_back(perm[a], perm[b]);
  shuffle(pres.leq_facts, rng);
  return pres;
}

}  // namespace

Presentation scramble(FiniteLattice const& lattice, std::uint64_t seed) { return scramble_impl(lattice, seed); }

Presentation scramble(CodedLattice const& coded, std::uint64_t seed) {
  Presentation pres = scramble_impl(coded.lattice, seed);
  auto const& perm = pres.permutation;
  pres.landmarks = {{"p", perm[coded.p]},   {"q", perm[coded.q()]}, {"s", perm[coded.s]},
                    {"e0", perm[coded.e0]}, {"e1", perm[coded.e1]}, {"f0", perm[coded.f0]},
                    {"f1", perm[coded.f1]}, {"g0", perm[coded.g[0]]}};
  pres.g_count = coded.n;
  pres.u = coded.u;
  return pres;
}

FiniteLattice unscramble(Presentation const& pres) {
  if (pres.permutation.size() != pres.n) throw InvalidArgument("presentation carries no permutation");
  std::vector<Elem> inverse(pres.n, static_cast<Elem>(pres.n));
  for (Elem a = 0; a < pres.n; ++a) {
    Elem const x = pres.permutation[a];
    if (x >= pres.n || inverse[x] != pres.n) throw InvalidArgument("permutation is not a bijection");
    inverse[x] = a;
  }
  std::vector<std::string> names = pres.names;
  if (names.size() != pres.n) {
    names.clear();
    for (std::size_t a = 0; a < pres.n; ++a) names.push_back(std::to_string(a));
  }
  std::vector<std::pair<Elem, Elem>> leq;
  for (auto const& [a, b] : pres.leq_facts) {
    if (a >= pres.n || b >= pres.n) throw InvalidArgument("fact references an unknown element");
    leq.emplace_back(inverse[a], inverse[b]);
  }
  std::sort(leq.begin(), leq.end());
  return make_lattice(std::move(names), leq, ValidateOptions{std::max<std::size_t>(pres.n, 1), false});
}

// Decoding --------------------------------------------------------------

Elem PresentationOracle::landmark(std::string const& name) const {
  auto it = pres_->landmarks.find(name);
  if (it == pres_->landmarks.end()) throw DecodeError("presentation has no landmark " + name);
  if (it->second >= pres_->n) throw DecodeError("landmark " + name + " is out of range");
  return it->second;
}

Elem PresentationOracle::join(Elem a, Elem b) const {
  if (a >= pres_->n || b >= pres_->n) throw DecodeError("join of unknown elements");
  if (pres_->joins.size() != pres_->n || pres_->joins[a].size() != pres_->n) throw DecodeError("join table has the wrong shape");
  Elem const j = pres_->joins[a][b];
  if (j >= pres_->n) throw DecodeError("join table entry out of range");
  return j;
}

namespace {

/// Positive-only view of an oracle: a fact is known once it has appeared
/// in the stream, which is read lazily and in order.
class Reader {
 public:
  explicit Reader(PresentationOracle const& oracle) : o_(oracle) {}

  bool leq(Elem a, Elem b) {
    if (seen_.count({a, b})) return true;
    while (next_ < o_.fact_count()) {
      auto const f = o_.fact(next_++);
      seen_.insert(f);
      if (f == std::pair{a, b}) return true;
    }
    return false;
  }

  /// A join entry must agree with its mirror and lie above both arguments.
  Elem join(Elem a, Elem b) {
    Elem const j = o_.join(a, b);
    if (o_.join(b, a) != j) throw DecodeError(describe("join table is not symmetric", a, b));
    if (!leq(a, j) || !leq(b, j)) throw DecodeError(describe("join entry is not an upper bound", a, b));
    return j;
  }

  PresentationOracle const& oracle() const noexcept { return o_; }

 private:
  static std::string describe(char const* what, Elem a, Elem b) {
    return std::string(what) + " at (" + std::to_string(a) + ", " + std::to_string(b) + ")";
  }

  PresentationOracle const& o_;
  std::set<std::pair<Elem, Elem>> seen_;
  std::size_t next_ = 0;
};

std::vector<Elem> g_sequence(Reader& r, std::size_t count) {
  auto const& o = r.oracle();
  if (count == 0 || count > o.g_count()) {
    throw InvalidArgument("g-sequence length " + std::to_string(count) + " outside [1, " + std::to_string(o.g_count()) + "]");
  }
  Elem const p = o.landmark("p"), q = o.landmark("q");
  Elem const e[2] = {o.landmark("e0"), o.landmark("e1")};
  Elem const f[2] = {o.landmark("f0"), o.landmark("f1")};
  std::vector<Elem> seq{o.landmark("g0")};
  while (seq.size() < count) {
    std::size_t const side = seq.size() % 2;  // 1: odd target, use e1 and f1
    Elem const bound = r.join(seq.back(), e[side]);
    std::optional<Elem> found;
    for (std::size_t i = 0; i < o.fact_count() && !found; ++i) {
      auto const [y, z] = o.fact(i);
      if (z != bound || !r.leq(y, f[side])) continue;
      if (r.leq(q, r.join(y, p))) found = y;
    }
    if (!found) throw DecodeError("no candidate for g" + std::to_string(seq.size()));
    seq.push_back(*found);
  }
  return seq;
}

}  // namespace

std::vector<Elem> decode_g_sequence(PresentationOracle const& oracle, std::size_t count) {
  Reader r(oracle);
  return g_sequence(r, count);
}

std::set<std::size_t> decode_u(PresentationOracle const& oracle) {
  Reader r(oracle);
  auto const seq = g_sequence(r, oracle.g_count());
  Elem const s = oracle.landmark("s"), q = oracle.landmark("q");
  std::set<std::size_t> out;
  for (std::size_t k = 0; k < seq.size(); ++k)
    if (r.leq(q, r.join(seq[k], s))) out.insert(k);
  return out;
}

// JSON ------------------------------------------------------------------

nlohmann::json presentation_to_json(Presentation const& pres) {
  nlohmann::json j;
  j["n"] = pres.n;
  j["joins"] = pres.joins;
  auto facts = nlohmann::json::array();
  for (auto const& [a, b] : pres.leq_facts) facts.push_back({a, b});
  j["leqFacts"] = std::move(facts);
  j["landmarks"] = pres.landmarks;
  j["seed"] = pres.seed;
  j["gCount"] = pres.g_count;
  if (!pres.permutation.empty() || pres.u) {
    nlohmann::json hidden = nlohmann::json::object();
    if (!pres.permutation.empty()) hidden["permutation"] = pres.permutation;
    if (!pres.names.empty()) hidden["names"] = pres.names;
    if (pres.u) hidden["U"] = *pres.u;
    j["hidden"] = std::move(hidden);
  }
  return j;
}

Presentation presentation_from_json(nlohmann::json const& j) {
  try {
    Presentation pres;
    pres.n = j.at("n").get<std::size_t>();
    pres.joins = j.at("joins").get<std::vector<std::vector<Elem>>>();
    for (auto const& f : j.at("leqFacts")) pres.leq_facts.emplace_back(f.at(0).get<Elem>(), f.at(1).get<Elem>());
    pres.landmarks = j.at("landmarks").get<std::map<std::string, Elem>>();
    pres.seed = j.value("seed", std::uint64_t{0});
    pres.g_count = j.value("gCount", std::size_t{0});
    if (auto it = j.find("hidden"); it != j.end()) {
      pres.permutation = it->value("permutation", std::vector<Elem>{});
      pres.names = it->value("names", std::vector<std::string>{});
      if (it->contains("U")) pres.u = it->at("U").get<std::set<std::size_t>>();
    }
    if (pres.joins.size() != pres.n) throw InvalidArgument("join table has " + std::to_string(pres.joins.size()) + " rows");
    for (auto const& row : pres.joins) {
      if (row.size() != pres.n) throw InvalidArgument("join table row has the wrong length");
      for (Elem x : row)
        if (x >= pres.n) throw InvalidArgument("join table entry out of range");
    }
    for (auto const& [a, b] : pres.leq_facts)
      if (a >= pres.n || b >= pres.n) throw InvalidArgument("fact references an unknown element");
    for (auto const& [name, id] : pres.landmarks)
      if (id >= pres.n) throw InvalidArgument("landmark " + name + " out of range");
    return pres;
  } catch (nlohmann::json::exception const& e) {
    throw InvalidArgument(std::string("malformed presentation: ") + e.what());
  }
}

std::string format_set(std::set<std::size_t> const& u) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : u) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

std::set<std::size_t> parse_set(std::string const& text) {
  std::set<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto const b = item.find_first_not_of(" \t{}");
    auto const e = item.find_last_not_of(" \t{}");
    if (b == std::string::npos) {
      if (text.find_first_not_of(" \t{}") == std::string::npos) continue;
      throw InvalidArgument("empty item in set '" + text + "'");
    }
    std::string const digits = item.substr(b, e - b + 1);
    if (digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 9)
      throw InvalidArgument("'" + digits + "' is not a set element");
    out.insert(std::stoul(digits));
  }
  return out;
}

}  // namespace lattab
