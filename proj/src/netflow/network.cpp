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

#include "netflow/network.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <utility>

namespace netflow {

double segment_segment_dist2(const Vec& p0, const Vec& p1, const Vec& q0, const Vec& q1) {
  // Closest points of two segments (Eberly), clamped parameters.
  const Vec d1 = p1 - p0;
  const Vec d2 = q1 - q0;
  const Vec r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.squaredNorm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p0 + s * d1 - (q0 + t * d2)).squaredNorm();
}

double Edge::length() const {
  double L = 0.0;
  for (int s = 0; s < segment_count(); ++s) L += (seg_b(s) - seg_a(s)).norm();
  return L;
}

Network::Network(int d) : dim(d) {
  if (d < 2 || d > kMaxDim) fail("ambient dimension must be in [2, " + std::to_string(kMaxDim) + "]");
}

int Network::add_vertex(const Point& p, VertexKind kind, int id) {
  if (p.size() != dim) fail("vertex dimension mismatch");
  Vertex v;
  v.id = id >= 0 ? id : static_cast<int>(vertices.size());
  v.kind = kind;
  v.position = p;
  vertices.push_back(std::move(v));
  return static_cast<int>(vertices.size()) - 1;
}

int Network::add_edge(int v0, int v1, std::vector<Point> nodes, int id) {
  const int nv = static_cast<int>(vertices.size());
  if (v0 < 0 || v0 >= nv || v1 < 0 || v1 >= nv) fail("edge references unknown vertex");
  if (nodes.size() < 2) fail("open edge needs at least two nodes");
  for (const auto& p : nodes)
    if (p.size() != dim) fail("edge node dimension mismatch");
  nodes.front() = vertices[static_cast<size_t>(v0)].position;
  nodes.back() = vertices[static_cast<size_t>(v1)].position;
  Edge e;
  e.id = id >= 0 ? id : static_cast<int>(edges.size());
  e.nodes = std::move(nodes);
  e.v0 = v0;
  e.v1 = v1;
  edges.push_back(std::move(e));
  const int ei = static_cast<int>(edges.size()) - 1;
  vertices[static_cast<size_t>(v0)].incident.push_back({ei, EdgeEnd::Start});
  vertices[static_cast<size_t>(v1)].incident.push_back({ei, EdgeEnd::End});
  return ei;
}

int Network::add_loop(std::vector<Point> nodes, int id) {
  if (nodes.size() < 3) fail("closed loop needs at least three nodes");
  for (const auto& p : nodes)
    if (p.size() != dim) fail("loop node dimension mismatch");
  Edge e;
  e.id = id >= 0 ? id : static_cast<int>(edges.size());
  e.nodes = std::move(nodes);
  e.closed = true;
  edges.push_back(std::move(e));
  return static_cast<int>(edges.size()) - 1;
}

void Network::rebuild_incidence() {
  for (auto& v : vertices) v.incident.clear();
  for (size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.closed) continue;
    vertices[static_cast<size_t>(e.v0)].incident.push_back({static_cast<int>(i), EdgeEnd::Start});
    vertices[static_cast<size_t>(e.v1)].incident.push_back({static_cast<int>(i), EdgeEnd::End});
  }
}

void Network::set_vertex_position(int v, const Point& p) {
  Vertex& vx = vertices[static_cast<size_t>(v)];
  vx.position = p;
  for (const auto& inc : vx.incident) {
    Edge& e = edges[static_cast<size_t>(inc.edge)];
    if (inc.end == EdgeEnd::Start)
      e.nodes.front() = p;
    else
      e.nodes.back() = p;
  }
}

const Point& Network::neighbour_node(const Incidence& inc) const {
  const Edge& e = edges[static_cast<size_t>(inc.edge)];
  return inc.end == EdgeEnd::Start ? e.nodes[1] : e.nodes[e.nodes.size() - 2];
}

double Network::total_length() const {
  double L = 0.0;
  for (const auto& e : edges) L += e.length();
  return L;
}

double Network::diameter() const {
  Vec lo = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
  bool any = false;
  for (const auto& e : edges)
    for (const auto& p : e.nodes) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      any = true;
    }
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v.position);
    hi = hi.cwiseMax(v.position);
    any = true;
  }
  return any ? (hi - lo).norm() : 0.0;
}

int Network::node_count() const {
  int n = 0;
  for (const auto& e : edges) n += e.node_count();
  return n;
}

std::vector<int> Network::junction_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].kind == VertexKind::Junction) out.push_back(static_cast<int>(i));
  return out;
}

int Network::vertex_index(int id) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return static_cast<int>(i);
  return -1;
}

int Network::edge_index(int id) const {
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return static_cast<int>(i);
  return -1;
}

bool ValidationReport::all_regular() const {
  return std::all_of(junctions.begin(), junctions.end(), [](const JunctionInfo& j) { return j.regular; });
}

bool ValidationReport::has(ValidationIssue::Kind k) const {
  return std::any_of(issues.begin(), issues.end(), [k](const ValidationIssue& i) { return i.kind == k; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (valid() ? "valid" : "invalid") << ", " << junctions.size() << " junction(s)";
  for (const auto& i : issues) os << "\n  " << i.message;
  return os.str();
}

JunctionInfo junction_info(const Network& net, int vertex, const Tolerances& tol) {
  const Vertex& v = net.vertices[static_cast<size_t>(vertex)];
  JunctionInfo info;
  info.vertex = vertex;
  Vec sum = zeros(net.dim);
  const int n = std::min(3, v.valence());
  for (int k = 0; k < n; ++k) {
    const Vec d = net.neighbour_node(v.incident[static_cast<size_t>(k)]) - v.position;
    const double len = d.norm();
    info.tangents[static_cast<size_t>(k)] = len > 0.0 ? Vec(d / len) : zeros(net.dim);
    sum += info.tangents[static_cast<size_t>(k)];
  }
  for (int k = n; k < 3; ++k) info.tangents[static_cast<size_t>(k)] = zeros(net.dim);
  for (int k = 0; k < 3; ++k) {
    const Vec& a = info.tangents[static_cast<size_t>(k)];
    const Vec& b = info.tangents[static_cast<size_t>((k + 1) % 3)];
    info.angles[static_cast<size_t>(k)] =
        (a.squaredNorm() > 0 && b.squaredNorm() > 0) ? angle_between(a, b) : 0.0;
    if (info.angles[static_cast<size_t>(k)] < tol.angle) info.coincident = true;
  }
  info.tangent_sum = sum.norm();
  info.regular = !info.coincident && info.tangent_sum < tol.regular;
  return info;
}

namespace {

struct SegRef {
  int edge;
  int seg;
  int tag_a;  // vertex index at the first node, or -1
  int tag_b;  // vertex index at the second node, or -1
};

std::vector<SegRef> collect_segments(const Network& net) {
  std::vector<SegRef> segs;
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    const Edge& e = net.edges[ei];
    const int ns = e.segment_count();
    for (int s = 0; s < ns; ++s) {
      SegRef r{static_cast<int>(ei), s, -1, -1};
      if (!e.closed) {
        if (s == 0) r.tag_a = e.v0;
        if (s == ns - 1) r.tag_b = e.v1;
      }
      segs.push_back(r);
    }
  }
  return segs;
}

bool adjacent(const Network& net, const SegRef& a, const SegRef& b) {
  if (a.edge == b.edge) {
    const Edge& e = net.edges[static_cast<size_t>(a.edge)];
    const int ns = e.segment_count();
    const int d = std::abs(a.seg - b.seg);
    if (d <= 1) return true;
    if (e.closed && d == ns - 1) return true;
  }
  auto shares = [](int x, int y) { return x >= 0 && x == y; };
  return shares(a.tag_a, b.tag_a) || shares(a.tag_a, b.tag_b) || shares(a.tag_b, b.tag_a) ||
         shares(a.tag_b, b.tag_b);
}

std::uint64_t cell_key(const std::array<std::int64_t, kMaxDim>& c, int dim) {
  std::uint64_t h = 1469598103934665603ull;
  for (int i = 0; i < dim; ++i) {
    h ^= static_cast<std::uint64_t>(c[static_cast<size_t>(i)]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void for_each_close_segment_pair(
    const Network& net, double radius,
    const std::function<void(int, int, int, int, double)>& visit) {
  const auto segs = collect_segments(net);
  if (segs.size() < 2) return;
  double cell = radius;
  for (const auto& s : segs) {
    const Edge& e = net.edges[static_cast<size_t>(s.edge)];
    cell = std::max(cell, (e.seg_b(s.seg) - e.seg_a(s.seg)).norm());
  }
  if (!(cell > 0.0)) cell = 1.0;
  const int dim = net.dim;
  std::vector<std::pair<std::uint64_t, int>> entries;
  entries.reserve(segs.size() * 4);
  for (size_t i = 0; i < segs.size(); ++i) {
    const Edge& e = net.edges[static_cast<size_t>(segs[i].edge)];
    const Vec& a = e.seg_a(segs[i].seg);
    const Vec& b = e.seg_b(segs[i].seg);
    std::array<std::int64_t, kMaxDim> lo{}, hi{}, cur{};
    for (int k = 0; k < dim; ++k) {
      lo[static_cast<size_t>(k)] = static_cast<std::int64_t>(std::floor((std::min(a[k], b[k]) - radius) / cell));
      hi[static_cast<size_t>(k)] = static_cast<std::int64_t>(std::floor((std::max(a[k], b[k]) + radius) / cell));
    }
    cur = lo;
    while (true) {
      entries.emplace_back(cell_key(cur, dim), static_cast<int>(i));
      int k = 0;
      for (; k < dim; ++k) {
        if (++cur[static_cast<size_t>(k)] <= hi[static_cast<size_t>(k)]) break;
        cur[static_cast<size_t>(k)] = lo[static_cast<size_t>(k)];
      }
      if (k == dim) break;
    }
  }
  std::sort(entries.begin(), entries.end());
  std::vector<std::pair<int, int>> pairs;
  for (size_t g = 0; g < entries.size();) {
    size_t h = g;
    while (h < entries.size() && entries[h].first == entries[g].first) ++h;
    for (size_t i = g; i < h; ++i)
      for (size_t j = i + 1; j < h; ++j) {
        int x = entries[i].second, y = entries[j].second;
        if (x == y) continue;
        pairs.emplace_back(std::min(x, y), std::max(x, y));
      }
    g = h;
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  const double r2 = radius * radius;
  for (const auto& [i, j] : pairs) {
    const SegRef& a = segs[static_cast<size_t>(i)];
    const SegRef& b = segs[static_cast<size_t>(j)];
    if (adjacent(net, a, b)) continue;
    const Edge& ea = net.edges[static_cast<size_t>(a.edge)];
    const Edge& eb = net.edges[static_cast<size_t>(b.edge)];
    const double d2 = segment_segment_dist2(ea.seg_a(a.seg), ea.seg_b(a.seg), eb.seg_a(b.seg), eb.seg_b(b.seg));
    if (d2 < r2) visit(a.edge, a.seg, b.edge, b.seg, d2);
  }
}

ValidationReport validate(const Network& net, const Tolerances& tol, bool flow_valence) {
  using K = ValidationIssue::Kind;
  ValidationReport rep;
  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    const Edge& e = net.edges[ei];
    for (const auto& p : e.nodes)
      if (p.size() != net.dim || !all_finite(p)) {
        rep.issues.push_back({K::NonFinite, "edge " + std::to_string(e.id) + " has a non-finite node", e.id});
        break;
      }
    if (e.node_count() < (e.closed ? 3 : 2)) {
      rep.issues.push_back({K::DegenerateEdge, "edge " + std::to_string(e.id) + " has too few nodes", e.id});
      continue;
    }
    for (int s = 0; s < e.segment_count(); ++s)
      if ((e.seg_b(s) - e.seg_a(s)).squaredNorm() == 0.0) {
        rep.issues.push_back(
            {K::DegenerateEdge, "edge " + std::to_string(e.id) + " has coincident consecutive nodes", e.id});
        break;
      }
  }
  if (!rep.issues.empty()) return rep;

  for (size_t vi = 0; vi < net.vertices.size(); ++vi) {
    const Vertex& v = net.vertices[vi];
    const int val = v.valence();
    const bool ok_valence = flow_valence ? (val == 1 || val == 3) : val >= 1;
    if (!ok_valence)
      rep.issues.push_back({K::Valence, "vertex " + std::to_string(v.id) + " has valence " + std::to_string(val), -1,
                            -1, static_cast<int>(vi)});
    if (flow_valence && ((val == 1 && v.kind != VertexKind::Fixed) || (val == 3 && v.kind != VertexKind::Junction)))
      rep.issues.push_back({K::KindMismatch, "vertex " + std::to_string(v.id) + " kind does not match valence", -1,
                            -1, static_cast<int>(vi)});
    if (val == 3) {
      JunctionInfo info = junction_info(net, static_cast<int>(vi), tol);
      if (info.coincident)
        rep.issues.push_back({K::CoincidentTangents,
                              "junction " + std::to_string(v.id) + " has coincident tangents", -1, -1,
                              static_cast<int>(vi)});
      rep.junctions.push_back(std::move(info));
    }
  }

  const double tau = tol.embed_rel * std::max(net.diameter(), 1e-300);
  for_each_close_segment_pair(net, tau, [&](int ea, int sa, int eb, int sb, double) {
    rep.issues.push_back({K::Embeddedness,
                          "segments " + std::to_string(net.edges[static_cast<size_t>(ea)].id) + ":" +
                              std::to_string(sa) + " and " + std::to_string(net.edges[static_cast<size_t>(eb)].id) +
                              ":" + std::to_string(sb) + " touch",
                          net.edges[static_cast<size_t>(ea)].id, net.edges[static_cast<size_t>(eb)].id});
  });
  return rep;
}

SpacetimePoint parabolic_rescale(const SpacetimePoint& X, double lambda) {
  if (!(lambda > 0.0)) fail("parabolic rescaling needs lambda > 0");
  return {lambda * X.x, lambda * lambda * X.t};
}

Network scale_network(const Network& net, double lambda) {
  if (!(lambda > 0.0)) fail("scaling needs lambda > 0");
  Network out = net;
  for (auto& v : out.vertices) v.position *= lambda;
  for (auto& e : out.edges)
    for (auto& p : e.nodes) p *= lambda;
  return out;
}

Network transform_network(const Network& net, const Eigen::MatrixXd& rotation, const Vec& shift) {
  if (rotation.rows() != net.dim || rotation.cols() != net.dim) fail("rotation has wrong size");
  Network out = net;
  auto apply = [&](Vec& p) {
    Vec q = zeros(net.dim);
    for (int r = 0; r < net.dim; ++r)
      for (int c = 0; c < net.dim; ++c) q[r] += rotation(r, c) * p[c];
    p = q + shift;
  };
  for (auto& v : out.vertices) apply(v.position);
  for (auto& e : out.edges)
    for (auto& p : e.nodes) apply(p);
  return out;
}

Network make_y(int dim, const Eigen::MatrixXd& rotation, double ray_length, int nodes_per_ray) {
  if (dim < 2) fail("make_y needs d >= 2");
  if (!(ray_length > 0.0) || nodes_per_ray < 2) fail("make_y needs positive ray length and >= 2 nodes");
  if (rotation.rows() != dim || rotation.cols() != dim) fail("rotation has wrong size");
  Network net(dim);
  const double s3 = std::sqrt(3.0) / 2.0;
  const std::array<std::array<double, 2>, 3> dirs{{{1.0, 0.0}, {-0.5, s3}, {-0.5, -s3}}};
  auto rotated = [&](double x, double y) {
    Vec p = zeros(dim);
    for (int r = 0; r < dim; ++r) p[r] = rotation(r, 0) * x + rotation(r, 1) * y;
    return p;
  };
  const int j = net.add_vertex(zeros(dim), VertexKind::Junction, 0);
  for (int k = 0; k < 3; ++k) {
    const Vec dir = rotated(dirs[static_cast<size_t>(k)][0], dirs[static_cast<size_t>(k)][1]);
    const int end = net.add_vertex(ray_length * dir, VertexKind::Fixed, k + 1);
    std::vector<Point> nodes;
    for (int i = 0; i < nodes_per_ray; ++i)
      nodes.push_back((ray_length * i / (nodes_per_ray - 1)) * dir);
    net.add_edge(j, end, std::move(nodes), k);
  }
  return net;
}

Network make_y(int dim, double ray_length, int nodes_per_ray) {
  return make_y(dim, Eigen::MatrixXd::Identity(dim, dim), ray_length, nodes_per_ray);
}

Edge resample(const Edge& edge, double target_h) {
  if (!(target_h > 0.0)) fail("resample needs target_h > 0");
  const int ns = edge.segment_count();
  std::vector<double> cum(static_cast<size_t>(ns) + 1, 0.0);
  for (int s = 0; s < ns; ++s)
    cum[static_cast<size_t>(s) + 1] = cum[static_cast<size_t>(s)] + (edge.seg_b(s) - edge.seg_a(s)).norm();
  const double L = cum.back();
  Edge out = edge;
  out.nodes.clear();
  if (!edge.closed && L < target_h) {
    out.nodes = {edge.nodes.front(), edge.nodes.back()};
    return out;
  }
  const int n = std::max(1, static_cast<int>(std::lround(L / target_h)));
  const double step = L / n;
  out.nodes.push_back(edge.nodes.front());
  int s = 0;
  for (int k = 1; k < n; ++k) {
    const double target = k * step;
    while (s + 1 < ns && cum[static_cast<size_t>(s) + 1] < target) ++s;
    const double seg_len = cum[static_cast<size_t>(s) + 1] - cum[static_cast<size_t>(s)];
    const double f = seg_len > 0.0 ? (target - cum[static_cast<size_t>(s)]) / seg_len : 0.0;
    out.nodes.push_back(edge.seg_a(s) + f * (edge.seg_b(s) - edge.seg_a(s)));
  }
  if (!edge.closed) out.nodes.push_back(edge.nodes.back());
  return out;
}

Vec curvature_vector(const Point& prev, const Point& x, const Point& next) {
  const Vec cp = next - x;
  const Vec cm = x - prev;
  const double dp = cp.norm();
  const double dm = cm.norm();
  if (!(dp > 0.0) || !(dm > 0.0)) fail("degenerate chord in curvature evaluation");
  return (2.0 / (dp + dm)) * (cp / dp - cm / dm);
}

Vec discrete_curvature(const Edge& edge, int node) {
  const int n = edge.node_count();
  if (node < 0 || node >= n || !edge.is_interior(node)) fail("curvature needs an interior node");
  const int prev = edge.closed ? (node + n - 1) % n : node - 1;
  const int next = edge.closed ? (node + 1) % n : node + 1;
  return curvature_vector(edge.nodes[static_cast<size_t>(prev)], edge.nodes[static_cast<size_t>(node)],
                          edge.nodes[static_cast<size_t>(next)]);
}

double max_curvature(const Network& net) {
  double m = 0.0;
  for (const auto& e : net.edges) {
    if (e.closed && e.node_count() < 3) continue;  // collapsed loop
    for (int i = 0; i < e.node_count(); ++i)
      if (e.is_interior(i)) m = std::max(m, discrete_curvature(e, i).norm());
  }
  return m;
}

double min_node_spacing(const Network& net) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : net.edges)
    for (int s = 0; s < e.segment_count(); ++s) m = std::min(m, (e.seg_b(s) - e.seg_a(s)).norm());
  return m;
}

namespace {

double directed_hausdorff(const Network& from, const Network& to, int samples) {
  double worst = 0.0;
  auto probe = [&](const Vec& p) { worst = std::max(worst, distance_to_network(to, p)); };
  for (const auto& e : from.edges) {
    for (int s = 0; s < e.segment_count(); ++s) {
      const Vec& a = e.seg_a(s);
      const Vec& b = e.seg_b(s);
      probe(a);
      for (int k = 1; k <= samples; ++k) probe(a + (static_cast<double>(k) / (samples + 1)) * (b - a));
    }
    if (!e.closed && !e.nodes.empty()) probe(e.nodes.back());
  }
  return worst;
}

}  // namespace

double distance_to_network(const Network& net, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : net.edges) {
    if (e.node_count() == 1) best = std::min(best, (e.nodes[0] - p).squaredNorm());
    for (int s = 0; s < e.segment_count(); ++s)
      best = std::min(best, point_segment_dist2(p, e.seg_a(s), e.seg_b(s)));
  }
  return std::sqrt(best);
}

double hausdorff_distance(const Network& a, const Network& b, int samples_per_segment) {
  return std::max(directed_hausdorff(a, b, samples_per_segment), directed_hausdorff(b, a, samples_per_segment));
}

}  // namespace netflow
