#include "lattab/partition.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "lattab/error.hpp"

namespace lattab {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), Node{0});
}

Node UnionFind::find(Node x) {
  Node root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    Node next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(Node x, Node y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (rank_[x] < rank_[y]) std::swap(x, y);
  parent_[y] = x;
  if (rank_[x] == rank_[y]) ++rank_[x];
  return true;
}

EqRel::EqRel(std::vector<Node> rep) : rep_(std::move(rep)) {
  for (Node x = 0; x < rep_.size(); ++x)
    if (rep_[x] == x) ++blocks_;
}

EqRel EqRel::discrete(std::size_t n) {
  std::vector<Node> rep(n);
  std::iota(rep.begin(), rep.end(), Node{0});
  return EqRel(std::move(rep));
}

EqRel EqRel::full(std::size_t n) { return EqRel(std::vector<Node>(n, 0)); }

EqRel EqRel::from_labels(std::span<const std::uint32_t> labels) {
  std::unordered_map<std::uint32_t, Node> first;
  std::vector<Node> rep(labels.size());
  for (Node x = 0; x < labels.size(); ++x) rep[x] = first.emplace(labels[x], x).first->second;
  return EqRel(std::move(rep));
}

EqRel EqRel::from_union_find(UnionFind& uf) {
  std::vector<std::uint32_t> labels(uf.size());
  for (Node x = 0; x < labels.size(); ++x) labels[x] = uf.find(x);
  return from_labels(labels);
}

EqRel EqRel::from_pairs(std::size_t n, std::span<const std::pair<Node, Node>> pairs) {
  UnionFind uf(n);
  for (auto [x, y] : pairs) {
    if (x >= n || y >= n) throw InvalidArgument("pair outside carrier");
    uf.unite(x, y);
  }
  return from_union_find(uf);
}

EqRel EqRel::from_blocks(std::size_t n, std::span<const std::vector<Node>> blocks) {
  std::vector<char> seen(n, 0);
  UnionFind uf(n);
  for (auto const& block : blocks) {
    for (Node x : block) {
      if (x >= n) throw InvalidArgument("block element outside carrier");
      if (seen[x]) throw InvalidArgument("blocks overlap at node " + std::to_string(x));
      seen[x] = 1;
      uf.unite(block.front(), x);
    }
  }
  return from_union_find(uf);
}

std::vector<std::vector<Node>> EqRel::blocks() const {
  std::vector<std::vector<Node>> out;
  std::vector<std::size_t> slot(size(), 0);
  for (Node x = 0; x < size(); ++x) {
    if (rep_[x] == x) {
      slot[x] = out.size();
      out.emplace_back();
    }
    out[slot[rep_[x]]].push_back(x);
  }
  return out;
}

bool EqRel::subset_of(EqRel const& other) const {
  if (size() != other.size()) throw InvalidArgument("carrier mismatch");
  // p is contained in q iff every p-block lies inside one q-block.
  for (Node x = 0; x < size(); ++x)
    if (other.rep_[x] != other.rep_[rep_[x]]) return false;
  return true;
}

EqRel EqRel::restrict(std::span<const Node> nodes) const {
  std::vector<std::uint32_t> labels(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) labels[i] = rep_.at(nodes[i]);
  return from_labels(labels);
}

EqRel part_join(EqRel const& p, EqRel const& q) {
  if (p.size() != q.size()) throw InvalidArgument("carrier mismatch in join");
  UnionFind uf(p.size());
  for (Node x = 0; x < p.size(); ++x) {
    uf.unite(x, p.rep(x));
    uf.unite(x, q.rep(x));
  }
  return EqRel::from_union_find(uf);
}

EqRel part_meet(EqRel const& p, EqRel const& q) {
  if (p.size() != q.size()) throw InvalidArgument("carrier mismatch in meet");
  std::vector<std::uint32_t> labels(p.size());
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  for (Node x = 0; x < p.size(); ++x) {
    std::uint64_t key = (std::uint64_t{p.rep(x)} << 32) | q.rep(x);
    labels[x] = ids.emplace(key, static_cast<std::uint32_t>(ids.size())).first->second;
  }
  return EqRel::from_labels(labels);
}

char const* to_string(Order o) {
  switch (o) {
    case Order::equal: return "equal";
    case Order::finer: return "finer";
    case Order::coarser: return "coarser";
    case Order::incomparable: return "incomparable";
  }
  return "?";
}

Order compare(EqRel const& p, EqRel const& q) {
  bool const le = p.subset_of(q);
  bool const ge = q.subset_of(p);
  if (le && ge) return Order::equal;
  if (le) return Order::finer;
  if (ge) return Order::coarser;
  return Order::incomparable;
}

nlohmann::json eqrel_to_json(EqRel const& p) { return p.blocks(); }

EqRel eqrel_from_json(std::size_t n, nlohmann::json const& j) {
  auto blocks = j.get<std::vector<std::vector<Node>>>();
  return EqRel::from_blocks(n, blocks);
}

}  // namespace lattab
