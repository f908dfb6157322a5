// Copyright 2026 The netflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "netflow/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace netflow {

GroupElement::GroupElement(int regions) : size_(regions), words_(static_cast<size_t>((regions + 63) / 64), 0) {
  if (regions < 0) fail("group element size must be nonnegative");
}

void GroupElement::flip(int region) {
  if (region < 0 || region >= size_) fail("region id out of range");
  words_[static_cast<size_t>(region / 64)] ^= std::uint64_t{1} << (region % 64);
}

bool GroupElement::test(int region) const {
  if (region < 0 || region >= size_) fail("region id out of range");
  return (words_[static_cast<size_t>(region / 64)] >> (region % 64)) & 1U;
}

bool GroupElement::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

GroupElement& GroupElement::operator^=(const GroupElement& o) {
  if (o.size_ != size_) fail("group elements over different region sets");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
  return *this;
}

std::string GroupElement::bits() const {
  std::string s;
  for (int r = 0; r < size_; ++r) s.push_back(test(r) ? '1' : '0');
  return s;
}

namespace {

struct HalfEdges {
  const Network& net;

  int edge(int h) const { return h / 2; }
  bool forward(int h) const { return h % 2 == 0; }
  int origin(int h) const {
    const Edge& e = net.edges[static_cast<size_t>(edge(h))];
    return forward(h) ? e.v0 : e.v1;
  }
  int dest(int h) const {
    const Edge& e = net.edges[static_cast<size_t>(edge(h))];
    return forward(h) ? e.v1 : e.v0;
  }
  Vec direction(int h) const {
    const Edge& e = net.edges[static_cast<size_t>(edge(h))];
    const size_t n = e.nodes.size();
    return forward(h) ? Vec(e.nodes[1] - e.nodes[0]) : Vec(e.nodes[n - 2] - e.nodes[n - 1]);
  }
  // Nodes visited, excluding the final one.
  void append_nodes(int h, std::vector<Point>& out) const {
    const Edge& e = net.edges[static_cast<size_t>(edge(h))];
    const int n = e.node_count();
    if (e.closed) {
      for (int i = 0; i < n; ++i) out.push_back(e.nodes[static_cast<size_t>(forward(h) ? i : n - 1 - i)]);
      return;
    }
    for (int i = 0; i + 1 < n; ++i) out.push_back(e.nodes[static_cast<size_t>(forward(h) ? i : n - 1 - i)]);
  }
};

double signed_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

bool inside(const std::vector<Point>& poly, const Point& p) {
  int winding = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
    if (a[1] <= p[1]) {
      if (b[1] > p[1] && cross > 0) ++winding;
    } else if (b[1] <= p[1] && cross < 0) {
      --winding;
    }
  }
  return winding != 0;
}

int find(std::vector<int>& parent, int x) {
  while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
  return x;
}

}  // namespace

RegionMap compute_regions(const Network& net) {
  if (net.dim != 2) fail("regions need a planar network");
  for (const auto& e : net.edges)
    if (e.node_count() < 2) fail("edge " + std::to_string(e.id) + " has fewer than two nodes");
  const HalfEdges H{net};
  const int nh = 2 * static_cast<int>(net.edges.size());
  const int nv = static_cast<int>(net.vertices.size());

  // Outgoing half-edges around each vertex, counterclockwise.
  std::vector<std::vector<int>> around(static_cast<size_t>(nv));
  for (int h = 0; h < nh; ++h)
    if (!net.edges[static_cast<size_t>(H.edge(h))].closed) around[static_cast<size_t>(H.origin(h))].push_back(h);
  std::vector<int> slot(static_cast<size_t>(nh), -1);
  for (auto& list : around) {
    std::vector<double> ang;
    for (int h : list) {
      const Vec d = H.direction(h);
      ang.push_back(std::atan2(d[1], d[0]));
    }
    std::vector<size_t> idx(list.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return ang[a] < ang[b]; });
    std::vector<int> sorted;
    for (size_t i : idx) sorted.push_back(list[i]);
    list = std::move(sorted);
    for (size_t i = 0; i < list.size(); ++i) slot[static_cast<size_t>(list[i])] = static_cast<int>(i);
  }
  auto next = [&](int h) {
    if (net.edges[static_cast<size_t>(H.edge(h))].closed) return h;
    const int t = h ^ 1;
    const auto& list = around[static_cast<size_t>(H.dest(h))];
    const int k = static_cast<int>(list.size());
    return list[static_cast<size_t>((slot[static_cast<size_t>(t)] - 1 + k) % k)];
  };

  // Components: vertices by union-find; each closed loop on its own.
  std::vector<int> parent(static_cast<size_t>(nv + static_cast<int>(net.edges.size())));
  std::iota(parent.begin(), parent.end(), 0);
  for (int ei = 0; ei < static_cast<int>(net.edges.size()); ++ei) {
    const Edge& e = net.edges[static_cast<size_t>(ei)];
    if (!e.closed) parent[static_cast<size_t>(find(parent, e.v0))] = find(parent, e.v1);
  }
  auto component_of_edge = [&](int ei) {
    const Edge& e = net.edges[static_cast<size_t>(ei)];
    return e.closed ? nv + ei : find(parent, e.v0);
  };

  RegionMap rm;
  for (int v = 0; v < nv; ++v)
    if (find(parent, v) == v) ++rm.components;
  rm.euler_vertices = nv;
  rm.euler_edges = static_cast<int>(net.edges.size());
  for (const auto& e : net.edges)
    if (e.closed) {
      ++rm.components;
      ++rm.euler_vertices;
    }

  // Trace boundary cycles.
  struct Cycle {
    std::vector<int> half_edges;
    std::vector<Point> poly;
    double area = 0.0;
    int component = -1;
  };
  std::vector<Cycle> cycles;
  std::vector<int> cycle_of(static_cast<size_t>(nh), -1);
  for (int h0 = 0; h0 < nh; ++h0) {
    if (cycle_of[static_cast<size_t>(h0)] >= 0) continue;
    Cycle c;
    int h = h0;
    do {
      cycle_of[static_cast<size_t>(h)] = static_cast<int>(cycles.size());
      c.half_edges.push_back(h);
      H.append_nodes(h, c.poly);
      h = next(h);
    } while (h != h0 && static_cast<int>(c.half_edges.size()) <= nh);
    c.area = signed_area(c.poly);
    c.component = component_of_edge(H.edge(h0));
    cycles.push_back(std::move(c));
  }

  const double diam = std::max(net.diameter(), 1e-300);
  const double area_tol = 1e-12 * diam * diam;
  std::vector<int> region_of_cycle(cycles.size(), -1);
  rm.unbounded = 0;
  rm.regions = 1;
  rm.area.push_back(std::numeric_limits<double>::infinity());
  for (size_t c = 0; c < cycles.size(); ++c)
    if (cycles[c].area > area_tol) {
      region_of_cycle[c] = rm.regions++;
      rm.area.push_back(cycles[c].area);
    }
  // Outer boundary of a component: innermost bounded cycle of another component around it.
  for (size_t c = 0; c < cycles.size(); ++c) {
    if (region_of_cycle[c] >= 0) continue;
    const Point probe = cycles[c].poly.front();
    int best = -1;
    for (size_t d = 0; d < cycles.size(); ++d) {
      if (region_of_cycle[d] < 0 || cycles[d].component == cycles[c].component) continue;
      if (!inside(cycles[d].poly, probe)) continue;
      if (best < 0 || cycles[d].area < cycles[static_cast<size_t>(best)].area) best = static_cast<int>(d);
    }
    region_of_cycle[c] = best < 0 ? rm.unbounded : region_of_cycle[static_cast<size_t>(best)];
    if (best >= 0) rm.area[static_cast<size_t>(region_of_cycle[c])] += cycles[c].area;
  }

  rm.left.assign(net.edges.size(), -1);
  rm.right.assign(net.edges.size(), -1);
  for (int h = 0; h < nh; ++h) {
    const int r = region_of_cycle[static_cast<size_t>(cycle_of[static_cast<size_t>(h)])];
    (H.forward(h) ? rm.left : rm.right)[static_cast<size_t>(H.edge(h))] = r;
  }
  return rm;
}

GroupElement edge_multiplicity(int edge, const RegionMap& regions) {
  if (edge < 0 || edge >= static_cast<int>(regions.left.size())) fail("edge index out of range");
  GroupElement g(regions.regions);
  g.flip(regions.left[static_cast<size_t>(edge)]);
  g.flip(regions.right[static_cast<size_t>(edge)]);
  return g;
}

CycleCheck cycle_check(const std::vector<GroupElement>& element, const Network& net) {
  if (element.size() != net.edges.size()) fail("one group element per edge expected");
  CycleCheck res;
  const int size = element.empty() ? 0 : element.front().size();
  std::vector<GroupElement> sum(net.vertices.size(), GroupElement(size));
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    const Edge& e = net.edges[ei];
    if (e.closed) continue;
    sum[static_cast<size_t>(e.v0)] ^= element[ei];
    sum[static_cast<size_t>(e.v1)] ^= element[ei];
  }
  for (size_t v = 0; v < sum.size(); ++v)
    if (!sum[v].is_zero()) {
      res.pass = false;
      res.witness_vertex = static_cast<int>(v);
      break;
    }
  return res;
}

MultiplicityAssignment assign_multiplicity(const Network& net) {
  MultiplicityAssignment a;
  a.regions = compute_regions(net);
  for (int ei = 0; ei < static_cast<int>(net.edges.size()); ++ei) {
    a.element.push_back(edge_multiplicity(ei, a.regions));
    if (a.element.back().is_zero()) a.vanishing.push_back(ei);
  }
  const CycleCheck cc = cycle_check(a.element, net);
  a.cycle = cc.pass;
  a.witness_vertex = cc.witness_vertex;
  return a;
}

double weighted_measure(const Network& net, const MultiplicityAssignment& a,
                        const std::vector<std::vector<double>>& phi) {
  if (phi.size() != net.edges.size() || a.element.size() != net.edges.size())
    fail("weighted measure: one sample vector and one element per edge expected");
  double total = 0.0;
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    const Edge& e = net.edges[ei];
    if (a.element[ei].norm() == 0) continue;
    if (phi[ei].size() != e.nodes.size()) fail("weighted measure: one sample per node expected");
    const int n = e.node_count();
    for (int s = 0; s < e.segment_count(); ++s) {
      const double len = (e.seg_b(s) - e.seg_a(s)).norm();
      total += 0.5 * len * (phi[ei][static_cast<size_t>(s)] + phi[ei][static_cast<size_t>((s + 1) % n)]);
    }
  }
  return total;
}

double weighted_measure(const Network& net, const MultiplicityAssignment& a,
                        const std::function<double(const Point&)>& phi) {
  std::vector<std::vector<double>> samples;
  for (const auto& e : net.edges) {
    samples.emplace_back();
    for (const auto& p : e.nodes) samples.back().push_back(phi(p));
  }
  return weighted_measure(net, a, samples);
}

Network drop_vanishing(const Network& net, const MultiplicityAssignment& a) {
  if (a.element.size() != net.edges.size()) fail("assignment does not match the network");
  struct Piece {
    std::vector<Point> nodes;
    int v0 = -1, v1 = -1;
    bool closed = false;
    int id = -1;
    bool alive = true;
  };
  std::vector<Piece> pieces;
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    if (a.element[ei].is_zero()) continue;
    const Edge& e = net.edges[ei];
    pieces.push_back({e.nodes, e.v0, e.v1, e.closed, e.id, true});
  }
  const size_t nv = net.vertices.size();
  auto incident = [&](int v) {
    std::vector<std::pair<int, bool>> inc;  // (piece, at start)
    for (int p = 0; p < static_cast<int>(pieces.size()); ++p) {
      const Piece& pc = pieces[static_cast<size_t>(p)];
      if (!pc.alive || pc.closed) continue;
      if (pc.v0 == v) inc.push_back({p, true});
      if (pc.v1 == v) inc.push_back({p, false});
    }
    return inc;
  };

  std::vector<char> merged(nv, 0);
  for (int v = 0; v < static_cast<int>(nv); ++v) {
    const auto inc = incident(v);
    const bool was_junction = net.vertices[static_cast<size_t>(v)].valence() >= 3;
    if (inc.size() == 1 && was_junction)
      fail_domain("dropping vanishing edges leaves former junction " + std::to_string(net.vertices[static_cast<size_t>(v)].id) +
                  " with a single edge");
    if (inc.size() != 2) continue;
    merged[static_cast<size_t>(v)] = 1;
    auto [p, p_start] = inc[0];
    auto [q, q_start] = inc[1];
    Piece& A = pieces[static_cast<size_t>(p)];
    if (p == q) {
      // Both ends on v: a closed loop.
      A.nodes.pop_back();
      A.closed = true;
      A.v0 = A.v1 = -1;
      continue;
    }
    Piece& B = pieces[static_cast<size_t>(q)];
    // A ends at v, B starts at v.
    if (p_start) {
      std::reverse(A.nodes.begin(), A.nodes.end());
      std::swap(A.v0, A.v1);
    }
    if (!q_start) {
      std::reverse(B.nodes.begin(), B.nodes.end());
      std::swap(B.v0, B.v1);
    }
    A.nodes.insert(A.nodes.end(), B.nodes.begin() + 1, B.nodes.end());
    A.v1 = B.v1;
    B.alive = false;
  }

  Network out(net.dim);
  std::vector<int> remap(nv, -1);
  for (size_t v = 0; v < nv; ++v) {
    if (merged[v]) continue;
    if (incident(static_cast<int>(v)).empty()) continue;
    const Vertex& src = net.vertices[v];
    remap[v] = out.add_vertex(src.position, src.kind, src.id);
  }
  for (const auto& pc : pieces) {
    if (!pc.alive) continue;
    if (pc.closed)
      out.add_loop(pc.nodes, pc.id);
    else
      out.add_edge(remap[static_cast<size_t>(pc.v0)], remap[static_cast<size_t>(pc.v1)], pc.nodes, pc.id);
  }
  // Fixed ends that lost their edge are gone; junction kinds follow valence.
  for (auto& v : out.vertices)
    if (v.valence() == 3) v.kind = VertexKind::Junction;
  return out;
}

}  // namespace netflow
