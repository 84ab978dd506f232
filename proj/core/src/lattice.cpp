#include "lattab/lattice.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"
#include "lattab/partition.hpp"

namespace lattab {

std::size_t FiniteLattice::index(Elem a, Elem b) const {
  if (a >= size() || b >= size()) {
    throw InvalidArgument("unknown lattice element id " + std::to_string(std::max(a, b)));
  }
  return static_cast<std::size_t>(a) * size() + b;
}

std::optional<Elem> FiniteLattice::find(std::string const& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Elem>(it - names_.begin());
}

Elem FiniteLattice::at(std::string const& name) const {
  if (auto e = find(name)) return *e;
  throw InvalidArgument("unknown lattice element '" + name + "'");
}

FiniteLattice FiniteLattice::dual() const {
  std::vector<std::pair<Elem, Elem>> pairs;
  for (Elem a = 0; a < size(); ++a)
    for (Elem b = 0; b < size(); ++b)
      if (leq(a, b)) pairs.emplace_back(b, a);
  return make_lattice(names_, pairs, {.size_bound = size(), .close = false});
}

namespace {

std::string pair_text(std::vector<std::string> const& names, Elem a, Elem b) {
  return "(" + names[a] + ", " + names[b] + ")";
}

}  // namespace

ValidationReport validate_lattice(std::vector<std::string> names,
                                  std::span<const std::pair<Elem, Elem>> leq_pairs,
                                  ValidateOptions opts) {
  std::size_t const n = names.size();
  if (n == 0) throw InvalidArgument("empty lattice candidate");
  if (n > opts.size_bound) {
    throw InvalidArgument("lattice candidate has " + std::to_string(n) +
                          " elements, bound is " + std::to_string(opts.size_bound));
  }
  std::vector<char> leq(n * n, 0);
  auto at = [&](std::size_t a, std::size_t b) -> char& { return leq[a * n + b]; };
  for (auto [a, b] : leq_pairs) {
    if (a >= n || b >= n) throw InvalidArgument("order pair references unknown element");
    at(a, b) = 1;
  }
  ValidationReport report;
  if (opts.close) {
    for (std::size_t a = 0; a < n; ++a) at(a, a) = 1;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t a = 0; a < n; ++a)
        if (at(a, k))
          for (std::size_t b = 0; b < n; ++b)
            if (at(k, b)) at(a, b) = 1;
  } else {
    for (Elem a = 0; a < n; ++a)
      if (!at(a, a)) report.violations.push_back({"reflexive", a, a, names[a] + " <= " + names[a] + " missing"});
    bool transitive = true;
    for (Elem a = 0; a < n && transitive; ++a)
      for (Elem k = 0; k < n && transitive; ++k)
        for (Elem b = 0; b < n && transitive; ++b)
          if (at(a, k) && at(k, b) && !at(a, b)) {
            report.violations.push_back({"transitive", a, b, "via " + names[k]});
            transitive = false;
          }
  }
  for (Elem a = 0; a < n; ++a)
    for (Elem b = a + 1; b < n; ++b)
      if (at(a, b) && at(b, a))
        report.violations.push_back({"antisymmetric", a, b, pair_text(names, a, b) + " are mutually below"});
  if (!report.violations.empty()) return report;

  // Least upper / greatest lower bounds by exhaustive search.
  std::vector<Elem> join(n * n), meet(n * n);
  auto least = [&](auto&& is_bound, auto&& below) -> std::optional<Elem> {
    for (Elem c = 0; c < n; ++c) {
      if (!is_bound(c)) continue;
      bool best = true;
      for (Elem d = 0; d < n && best; ++d) best = !is_bound(d) || below(c, d);
      if (best) return c;
    }
    return std::nullopt;
  };
  for (Elem a = 0; a < n; ++a) {
    for (Elem b = 0; b < n; ++b) {
      auto lub = least([&](Elem c) { return at(a, c) && at(b, c); },
                       [&](Elem c, Elem d) { return at(c, d) != 0; });
      auto glb = least([&](Elem c) { return at(c, a) && at(c, b); },
                       [&](Elem c, Elem d) { return at(d, c) != 0; });
      if (lub) {
        join[a * n + b] = *lub;
      } else if (a < b) {
        report.violations.push_back(
            {"join", a, b, "no least upper bound of " + pair_text(names, a, b)});
      }
      if (glb) {
        meet[a * n + b] = *glb;
      } else if (a < b) {
        report.violations.push_back(
            {"meet", a, b, "no greatest lower bound of " + pair_text(names, a, b)});
      }
    }
  }
  std::optional<Elem> bottom, top;
  for (Elem c = 0; c < n; ++c) {
    bool is_bottom = true, is_top = true;
    for (Elem x = 0; x < n; ++x) {
      is_bottom = is_bottom && at(c, x);
      is_top = is_top && at(x, c);
    }
    if (is_bottom) bottom = c;
    if (is_top) top = c;
  }
  if (!bottom) report.violations.push_back({"bounded", 0, 0, "no least element"});
  if (!top) report.violations.push_back({"bounded", 0, 0, "no greatest element"});
  if (!report.violations.empty()) return report;

  FiniteLattice lattice;
  lattice.names_ = std::move(names);
  lattice.leq_ = std::move(leq);
  lattice.join_ = std::move(join);
  lattice.meet_ = std::move(meet);
  lattice.bottom_ = *bottom;
  lattice.top_ = *top;
  report.ok = true;
  report.lattice = std::move(lattice);
  return report;
}

FiniteLattice make_lattice(std::vector<std::string> names,
                           std::span<const std::pair<Elem, Elem>> leq_pairs,
                           ValidateOptions opts) {
  auto report = validate_lattice(std::move(names), leq_pairs, opts);
  if (!report.ok) {
    auto const& v = report.violations.front();
    throw InvalidArgument("not a lattice: " + v.axiom + " axiom fails: " + v.detail);
  }
  return std::move(*report.lattice);
}

std::pair<Elem, Elem> bounds(FiniteLattice const& lattice, Elem a, Elem b) {
  return {lattice.join(a, b), lattice.meet(a, b)};
}

// Catalog ---------------------------------------------------------------

std::vector<std::string> const& catalog_names() {
  static std::vector<std::string> const names = {"2", "3-chain", "4-chain", "M3", "N5", "B2"};
  return names;
}

FiniteLattice chain_lattice(std::size_t length) {
  if (length == 0) throw InvalidArgument("chain length must be positive");
  std::vector<std::string> names;
  static char const* const inner3[] = {"m"};
  static char const* const inner4[] = {"a", "b"};
  for (std::size_t i = 0; i < length; ++i) {
    if (i == 0) {
      names.emplace_back("0");
    } else if (i + 1 == length) {
      names.emplace_back("1");
    } else if (length == 3) {
      names.emplace_back(inner3[i - 1]);
    } else if (length == 4) {
      names.emplace_back(inner4[i - 1]);
    } else {
      names.emplace_back("c" + std::to_string(i));
    }
  }
  std::vector<std::pair<Elem, Elem>> pairs;
  for (Elem i = 0; i + 1 < length; ++i) pairs.emplace_back(i, i + 1);
  return make_lattice(std::move(names), pairs);
}

FiniteLattice catalog_lattice(std::string const& name) {
  using P = std::pair<Elem, Elem>;
  if (name == "2") return chain_lattice(2);
  if (name == "3-chain") return chain_lattice(3);
  if (name == "4-chain") return chain_lattice(4);
  if (name == "M3") {
    std::vector<P> pairs = {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}};
    return make_lattice({"0", "a", "b", "c", "1"}, pairs);
  }
  if (name == "N5") {
    // 0 < a < c < 1 and 0 < b < 1.
    std::vector<P> pairs = {{0, 1}, {1, 3}, {3, 4}, {0, 2}, {2, 4}};
    return make_lattice({"0", "a", "b", "c", "1"}, pairs);
  }
  if (name == "B2") {
    std::vector<P> pairs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    return make_lattice({"0", "a", "b", "1"}, pairs);
  }
  throw InvalidArgument("unknown catalog lattice '" + name + "'");
}

// Homomorphisms ---------------------------------------------------------

HomReport check_usl_hom(std::span<const Elem> map, FiniteLattice const& source,
                        FiniteLattice const& target) {
  HomReport r;
  auto fail = [&](std::string what, Elem a, Elem b, std::string detail) {
    r.ok = false;
    r.failed = std::move(what);
    r.a = a;
    r.b = b;
    r.detail = std::move(detail);
    return r;
  };
  if (map.size() != source.size()) {
    return fail("total", 0, 0, "map has " + std::to_string(map.size()) + " entries for " +
                                   std::to_string(source.size()) + " elements");
  }
  for (Elem a = 0; a < map.size(); ++a)
    if (!target.contains(map[a])) return fail("total", a, a, "image outside target");
  if (map[source.bottom()] != target.bottom())
    return fail("zero", source.bottom(), source.bottom(), "0 not sent to 0");
  if (map[source.top()] != target.top())
    return fail("one", source.top(), source.top(), "1 not sent to 1");
  for (Elem a = 0; a < source.size(); ++a)
    for (Elem b = a + 1; b < source.size(); ++b)
      if (map[source.join(a, b)] != target.join(map[a], map[b]))
        return fail("join", a, b,
                    "map(" + source.name(a) + " v " + source.name(b) + ") != map(" +
                        source.name(a) + ") v map(" + source.name(b) + ")");
  return r;
}

UslHom::UslHom(FiniteLattice source, FiniteLattice target, std::vector<Elem> map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
  auto report = check_usl_hom(map_, source_, target_);
  if (!report.ok) {
    throw InvalidArgument("not a (0,1,join)-homomorphism: " + report.failed + ": " +
                          report.detail);
  }
}

UslHom UslHom::identity(FiniteLattice const& lattice) {
  std::vector<Elem> map(lattice.size());
  for (Elem a = 0; a < map.size(); ++a) map[a] = a;
  return UslHom(lattice, lattice, std::move(map));
}

UslHom UslHom::then(UslHom const& next) const {
  if (!(target_ == next.source_)) throw InvalidArgument("homomorphisms do not compose");
  std::vector<Elem> map(map_.size());
  for (Elem a = 0; a < map.size(); ++a) map[a] = next(map_[a]);
  return UslHom(source_, next.target_, std::move(map));
}

std::vector<UslHom> enumerate_usl_homs(FiniteLattice const& source,
                                       FiniteLattice const& target) {
  std::vector<UslHom> out;
  std::size_t const n = source.size();
  std::vector<Elem> map(n, 0);
  // Odometer over all maps; n <= 64 and target sizes are desk scale.
  while (true) {
    if (check_usl_hom(map, source, target).ok) out.emplace_back(source, target, map);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++map[i] < target.size()) break;
      map[i] = 0;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

std::optional<UslHom> canonical_hom(FiniteLattice const& source, FiniteLattice const& target) {
  for (auto& phi : enumerate_usl_homs(source, target)) {
    auto m = phi.map();
    std::sort(m.begin(), m.end());
    if (std::adjacent_find(m.begin(), m.end()) == m.end()) return phi;
  }
  return std::nullopt;
}

AdjointClauseReport check_adjoint_clauses(UslHom const& phi, std::span<const Elem> adjoint) {
  auto const& L0 = phi.source();
  auto const& L1 = phi.target();
  AdjointClauseReport r;
  auto note = [&](std::string text) {
    if (r.witness.empty()) r.witness = std::move(text);
  };
  if (adjoint.size() != L1.size()) {
    r.meet_preserving = r.proper = r.injective_on_image = r.order_clause = r.adjunction = false;
    r.witness = "adjoint has wrong arity";
    return r;
  }
  if (adjoint[L1.top()] != L0.top()) {
    r.meet_preserving = false;
    note("phi*(1) != 1");
  }
  for (Elem b1 = 0; b1 < L1.size(); ++b1) {
    for (Elem b2 = 0; b2 < L1.size(); ++b2) {
      if (adjoint[L1.meet(b1, b2)] != L0.meet(adjoint[b1], adjoint[b2])) {
        r.meet_preserving = false;
        note("phi*(" + L1.name(b1) + " ^ " + L1.name(b2) + ") is not a meet");
      }
    }
    if (b1 != L1.top() && adjoint[b1] == L0.top()) {
      r.proper = false;
      note("phi*(" + L1.name(b1) + ") = 1");
    }
  }
  for (Elem a1 = 0; a1 < L0.size(); ++a1)
    for (Elem a2 = 0; a2 < L0.size(); ++a2)
      if (phi(a1) != phi(a2) && adjoint[phi(a1)] == adjoint[phi(a2)]) {
        r.injective_on_image = false;
        note("phi* collapses phi(" + L0.name(a1) + ") and phi(" + L0.name(a2) + ")");
      }
  for (Elem a = 0; a < L0.size(); ++a) {
    for (Elem b = 0; b < L1.size(); ++b) {
      bool const below = L0.leq(a, adjoint[b]);
      if (below != L0.leq(adjoint[phi(a)], adjoint[b])) {
        r.order_clause = false;
        note("order clause fails at (" + L0.name(a) + ", " + L1.name(b) + ")");
      }
      if (below != L1.leq(phi(a), b)) {
        r.adjunction = false;
        note("adjunction fails at (" + L0.name(a) + ", " + L1.name(b) + ")");
      }
    }
  }
  return r;
}

std::vector<Elem> galois_adjoint(UslHom const& phi) {
  auto const& L0 = phi.source();
  auto const& L1 = phi.target();
  std::vector<Elem> adjoint(L1.size(), L0.bottom());
  for (Elem b = 0; b < L1.size(); ++b) {
    Elem acc = L0.bottom();
    for (Elem a = 0; a < L0.size(); ++a)
      if (L1.leq(phi(a), b)) acc = L0.join(acc, a);
    adjoint[b] = acc;
  }
  auto report = check_adjoint_clauses(phi, adjoint);
  if (!report.ok()) throw InternalError("Galois adjoint check failed: " + report.witness);
  return adjoint;
}

// Direct limits ---------------------------------------------------------

DirectLimit direct_limit(DirectLimitSystem const& system) {
  std::size_t const k = system.cutoff;
  if (system.lattices.size() < k + 1 || system.homs.size() < k) {
    throw InvalidArgument("direct limit system shorter than its cutoff");
  }
  for (std::size_t i = 0; i < k; ++i) {
    auto const& phi = system.homs[i];
    if (!(phi.source() == system.lattices[i]) || !(phi.target() == system.lattices[i + 1])) {
      throw InvalidArgument("homomorphism " + std::to_string(i) + " does not connect stages");
    }
  }
  // Carriers are tagged by stage: (i, a) -> offset[i] + a.
  std::vector<std::size_t> offset(k + 2, 0);
  for (std::size_t i = 0; i <= k; ++i) offset[i + 1] = offset[i] + system.lattices[i].size();
  UnionFind uf(offset[k + 1]);
  for (std::size_t i = 0; i < k; ++i)
    for (Elem a = 0; a < system.lattices[i].size(); ++a)
      uf.unite(offset[i] + a, offset[i + 1] + system.homs[i](a));

  DirectLimit out{system.lattices[k], {}};
  std::map<std::size_t, Elem> class_name;
  for (Elem a = 0; a < system.lattices[k].size(); ++a) {
    auto [it, fresh] = class_name.emplace(uf.find(offset[k] + a), a);
    if (!fresh) throw InternalError("two top-stage elements identified in direct limit");
  }
  out.canonical.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) {
    for (Elem a = 0; a < system.lattices[i].size(); ++a) {
      auto it = class_name.find(uf.find(offset[i] + a));
      if (it == class_name.end()) throw InternalError("direct limit class without top representative");
      out.canonical[i].push_back(it->second);
    }
  }
  return out;
}

// JSON ------------------------------------------------------------------

FiniteLattice lattice_from_json(nlohmann::json const& j, ValidateOptions opts) {
  if (!j.is_object() || !j.contains("elements") || !j.contains("leq")) {
    throw InvalidArgument("lattice JSON needs 'elements' and 'leq'");
  }
  std::vector<std::string> names;
  for (auto const& e : j.at("elements")) names.push_back(e.get<std::string>());
  auto resolve = [&](nlohmann::json const& v) -> Elem {
    if (v.is_number_unsigned()) {
      auto idx = v.get<std::size_t>();
      if (idx >= names.size()) throw InvalidArgument("leq index out of range");
      return static_cast<Elem>(idx);
    }
    auto name = v.get<std::string>();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidArgument("leq references unknown element '" + name + "'");
    return static_cast<Elem>(it - names.begin());
  };
  std::vector<std::pair<Elem, Elem>> pairs;
  for (auto const& p : j.at("leq")) {
    if (!p.is_array() || p.size() != 2) throw InvalidArgument("leq entries must be pairs");
    pairs.emplace_back(resolve(p[0]), resolve(p[1]));
  }
  opts.close = true;
  return make_lattice(std::move(names), pairs, opts);
}

nlohmann::json lattice_to_json(FiniteLattice const& lattice) {
  nlohmann::json j;
  j["elements"] = lattice.names();
  auto leq = nlohmann::json::array();
  for (Elem a = 0; a < lattice.size(); ++a) {
    for (Elem b = 0; b < lattice.size(); ++b) {
      if (!lattice.lt(a, b)) continue;
      bool cover = true;
      for (Elem c = 0; c < lattice.size() && cover; ++c)
        cover = !(lattice.lt(a, c) && lattice.lt(c, b));
      if (cover) leq.push_back({lattice.name(a), lattice.name(b)});
    }
  }
  j["leq"] = std::move(leq);
  auto join = nlohmann::json::array();
  auto meet = nlohmann::json::array();
  for (Elem a = 0; a < lattice.size(); ++a) {
    auto jr = nlohmann::json::array();
    auto mr = nlohmann::json::array();
    for (Elem b = 0; b < lattice.size(); ++b) {
      jr.push_back(lattice.join(a, b));
      mr.push_back(lattice.meet(a, b));
    }
    join.push_back(std::move(jr));
    meet.push_back(std::move(mr));
  }
  j["join"] = std::move(join);
  j["meet"] = std::move(meet);
  return j;
}

}  // namespace lattab
