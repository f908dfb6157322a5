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

#include "netflow/elliptic.hpp"

#include "netflow/scenario.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

namespace netflow {

namespace {

bool is_junction(const Network& net, int v) { return v >= 0 && net.vertices[static_cast<size_t>(v)].valence() == 3; }

}  // namespace

OrientationAssignment assign_orientation(const Network& net) {
  OrientationAssignment out;
  const size_t nv = net.vertices.size();
  out.sign.assign(net.edges.size(), 1);
  out.junction_colour.assign(nv, -1);

  // Junction graph adjacency: (neighbour, edge).
  std::vector<std::vector<std::pair<int, int>>> adj(nv);
  for (int ei = 0; ei < static_cast<int>(net.edges.size()); ++ei) {
    const Edge& e = net.edges[static_cast<size_t>(ei)];
    if (e.closed || !is_junction(net, e.v0) || !is_junction(net, e.v1)) continue;
    if (e.v0 == e.v1) {
      out.consistent = false;
      out.witness = {ei};
      out.message = "edge " + std::to_string(e.id) + " starts and ends at the same junction";
      return out;
    }
    adj[static_cast<size_t>(e.v0)].push_back({e.v1, ei});
    adj[static_cast<size_t>(e.v1)].push_back({e.v0, ei});
  }

  std::vector<int> parent_edge(nv, -1), parent(nv, -1), depth(nv, 0);
  for (int root = 0; root < static_cast<int>(nv) && out.consistent; ++root) {
    if (!is_junction(net, root) || out.junction_colour[static_cast<size_t>(root)] >= 0) continue;
    out.junction_colour[static_cast<size_t>(root)] = 0;
    std::deque<int> queue{root};
    while (!queue.empty() && out.consistent) {
      const int a = queue.front();
      queue.pop_front();
      for (const auto& [b, ei] : adj[static_cast<size_t>(a)]) {
        int& cb = out.junction_colour[static_cast<size_t>(b)];
        if (cb < 0) {
          cb = 1 - out.junction_colour[static_cast<size_t>(a)];
          parent[static_cast<size_t>(b)] = a;
          parent_edge[static_cast<size_t>(b)] = ei;
          depth[static_cast<size_t>(b)] = depth[static_cast<size_t>(a)] + 1;
          queue.push_back(b);
        } else if (cb == out.junction_colour[static_cast<size_t>(a)]) {
          // Odd cycle: tree paths from a and b to their common ancestor plus this edge.
          out.consistent = false;
          std::vector<int> left, right;
          int x = a, y = b;
          while (depth[static_cast<size_t>(x)] > depth[static_cast<size_t>(y)]) {
            left.push_back(parent_edge[static_cast<size_t>(x)]);
            x = parent[static_cast<size_t>(x)];
          }
          while (depth[static_cast<size_t>(y)] > depth[static_cast<size_t>(x)]) {
            right.push_back(parent_edge[static_cast<size_t>(y)]);
            y = parent[static_cast<size_t>(y)];
          }
          while (x != y) {
            left.push_back(parent_edge[static_cast<size_t>(x)]);
            right.push_back(parent_edge[static_cast<size_t>(y)]);
            x = parent[static_cast<size_t>(x)];
            y = parent[static_cast<size_t>(y)];
          }
          out.witness = left;
          out.witness.push_back(ei);
          out.witness.insert(out.witness.end(), right.rbegin(), right.rend());
          out.message = "odd cycle of " + std::to_string(out.witness.size()) + " edges between junctions";
          break;
        }
      }
    }
  }
  if (!out.consistent) return out;

  for (size_t ei = 0; ei < net.edges.size(); ++ei) {
    const Edge& e = net.edges[ei];
    if (e.closed) continue;
    // Colour 1: all edges leave the junction.
    if (is_junction(net, e.v0))
      out.sign[ei] = out.junction_colour[static_cast<size_t>(e.v0)] == 1 ? 1 : -1;
    else if (is_junction(net, e.v1))
      out.sign[ei] = out.junction_colour[static_cast<size_t>(e.v1)] == 0 ? 1 : -1;
  }
  return out;
}

int GluedSurface::free_count() const {
  return static_cast<int>(std::count(fixed.begin(), fixed.end(), char{0}));
}

GluedSurface build_initial_surface(const Network& net, const SurfaceOptions& opt) {
  if (net.dim != 2) fail("elliptic regularisation needs a planar network");
  if (!(opt.epsilon > 0.0)) fail("epsilon must be positive");
  if (!(opt.z_max >= 5.0 * opt.epsilon)) fail("z_max must be at least 5 epsilon");
  if (opt.rows_per_epsilon < 1) fail("rows_per_epsilon must be >= 1");
  for (const auto& v : net.vertices)
    if (v.valence() != 1 && v.valence() != 3) fail("elliptic regularisation needs valences 1 and 3");

  GluedSurface s;
  s.orientation = assign_orientation(net);
  if (!s.orientation.consistent)
    fail_domain("network is not orientable (" + s.orientation.message + "); the double cover is not constructed");

  s.base = net;
  if (opt.target_h > 0.0)
    for (auto& e : s.base.edges) {
      Edge r = resample(e, opt.target_h);
      e.nodes = std::move(r.nodes);
    }
  s.epsilon = opt.epsilon;
  s.z_max = opt.z_max;
  s.rows = static_cast<int>(std::ceil(opt.z_max * opt.rows_per_epsilon / opt.epsilon - 1e-9));
  s.dz = opt.z_max / s.rows;

  auto add_column = [&](const Point& p, bool fixed_col, int junction) {
    const int c = static_cast<int>(s.columns.size());
    std::vector<int> ids;
    for (int j = 0; j <= s.rows; ++j) {
      ids.push_back(static_cast<int>(s.X.size()));
      s.X.emplace_back(p[0], p[1], j * s.dz);
      s.fixed.push_back(fixed_col || j == 0 || j == s.rows ? 1 : 0);
      s.vertex_row.push_back(j);
      s.vertex_column.push_back(c);
    }
    s.columns.push_back(std::move(ids));
    s.column_junction.push_back(junction);
    return c;
  };

  s.vertex_column_of_base.assign(s.base.vertices.size(), -1);
  for (size_t vi = 0; vi < s.base.vertices.size(); ++vi) {
    const Vertex& v = s.base.vertices[vi];
    const bool junction = v.valence() == 3;
    s.vertex_column_of_base[vi] = add_column(v.position, !junction, junction ? static_cast<int>(vi) : -1);
  }
  for (const auto& e : s.base.edges) {
    std::vector<int> sheet;
    const int n = e.node_count();
    if (e.closed) {
      for (int i = 0; i < n; ++i) sheet.push_back(add_column(e.nodes[static_cast<size_t>(i)], false, -1));
      sheet.push_back(sheet.front());
    } else {
      sheet.push_back(s.vertex_column_of_base[static_cast<size_t>(e.v0)]);
      for (int i = 1; i + 1 < n; ++i) sheet.push_back(add_column(e.nodes[static_cast<size_t>(i)], false, -1));
      sheet.push_back(s.vertex_column_of_base[static_cast<size_t>(e.v1)]);
    }
    s.sheets.push_back(std::move(sheet));
  }

  s.column_direction.assign(s.columns.size(), Eigen::Vector2d::Zero());
  for (const auto& sheet : s.sheets) {
    const size_t n = sheet.size();
    const bool closed = sheet.front() == sheet.back();
    for (size_t k = 0; k < n; ++k) {
      const int c = sheet[k];
      if (s.column_junction[static_cast<size_t>(c)] >= 0) continue;
      size_t a = k == 0 ? (closed ? n - 2 : 0) : k - 1;
      size_t b = k + 1 == n ? (closed ? 1 : n - 1) : k + 1;
      const Eigen::Vector3d chord = s.X[static_cast<size_t>(s.columns[static_cast<size_t>(sheet[b])][0])] -
                                    s.X[static_cast<size_t>(s.columns[static_cast<size_t>(sheet[a])][0])];
      const Eigen::Vector2d nrm(-chord[1], chord[0]);
      if (nrm.norm() > 0.0) s.column_direction[static_cast<size_t>(c)] = nrm.normalized();
    }
  }

  for (size_t si = 0; si < s.sheets.size(); ++si) {
    const auto& sheet = s.sheets[si];
    for (size_t k = 0; k + 1 < sheet.size(); ++k) {
      const auto& a = s.columns[static_cast<size_t>(sheet[k])];
      const auto& b = s.columns[static_cast<size_t>(sheet[k + 1])];
      for (int j = 0; j < s.rows; ++j) {
        // (1/eps) * band mean of exp(-z/eps).
        const double w = std::exp(-j * s.dz / s.epsilon) * -std::expm1(-s.dz / s.epsilon) / s.dz;
        const size_t ju = static_cast<size_t>(j);
        s.triangles.push_back({a[ju], b[ju], b[ju + 1]});
        s.triangles.push_back({a[ju], b[ju + 1], a[ju + 1]});
        for (int r = 0; r < 2; ++r) {
          s.triangle_weight.push_back(w);
          s.triangle_sheet.push_back(static_cast<int>(si));
        }
      }
    }
  }
  return s;
}

namespace {

Eigen::Vector3d tri_cross(const GluedSurface& s, const std::array<int, 3>& t) {
  const Eigen::Vector3d& a = s.X[static_cast<size_t>(t[0])];
  return (s.X[static_cast<size_t>(t[1])] - a).cross(s.X[static_cast<size_t>(t[2])] - a);
}

}  // namespace

TranslatorEnergy translator_energy(const GluedSurface& s) {
  TranslatorEnergy en;
  en.contributions.resize(s.triangles.size());
  for (size_t t = 0; t < s.triangles.size(); ++t) {
    en.contributions[t] = s.triangle_weight[t] * 0.5 * tri_cross(s, s.triangles[t]).norm();
    en.value += en.contributions[t];
  }
  return en;
}

double energy_value(const GluedSurface& s) {
  double v = 0.0;
  for (size_t t = 0; t < s.triangles.size(); ++t) v += s.triangle_weight[t] * 0.5 * tri_cross(s, s.triangles[t]).norm();
  return v;
}

std::vector<Eigen::Vector3d> energy_gradient(const GluedSurface& s) {
  std::vector<Eigen::Vector3d> g(s.X.size(), Eigen::Vector3d::Zero());
  for (size_t t = 0; t < s.triangles.size(); ++t) {
    const auto& tri = s.triangles[t];
    const Eigen::Vector3d c = tri_cross(s, tri);
    const double len = c.norm();
    if (len == 0.0) continue;
    const Eigen::Vector3d N = c / len;
    const double f = 0.5 * s.triangle_weight[t];
    for (int k = 0; k < 3; ++k) {
      const auto& pj = s.X[static_cast<size_t>(tri[static_cast<size_t>((k + 1) % 3)])];
      const auto& pk = s.X[static_cast<size_t>(tri[static_cast<size_t>((k + 2) % 3)])];
      g[static_cast<size_t>(tri[static_cast<size_t>(k)])] += f * N.cross(pk - pj);
    }
  }
  return g;
}

namespace {

double cot_at(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Eigen::Vector3d& r) {
  const Eigen::Vector3d a = q - p, b = r - p;
  const double cr = a.cross(b).norm();
  return cr > 0.0 ? a.dot(b) / cr : 0.0;
}

// Unknowns: one coefficient per basis direction of each free vertex.
struct Basis {
  std::vector<int> first;  // vertex -> first unknown, or -1
  std::vector<int> count;  // 0, 1 or 2
  std::vector<std::array<Eigen::Vector2d, 2>> dir;
  int size = 0;
};

Basis make_basis(const GluedSurface& s) {
  Basis B;
  const size_t n = s.X.size();
  B.first.assign(n, -1);
  B.count.assign(n, 0);
  B.dir.assign(n, {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()});
  for (size_t v = 0; v < n; ++v) {
    if (s.fixed[v]) continue;
    const size_t c = static_cast<size_t>(s.vertex_column[v]);
    B.first[v] = B.size;
    if (s.column_junction[c] >= 0) {
      B.count[v] = 2;
      B.dir[v] = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
    } else {
      B.count[v] = 1;
      B.dir[v][0] = s.column_direction[c];
    }
    B.size += B.count[v];
  }
  return B;
}

struct Preconditioner {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool ok = false;
};

void factor(const GluedSurface& s, const Basis& B, Preconditioner& P) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(s.triangles.size() * 12);
  auto couple = [&](int v, int w, double c) {
    for (int k = 0; k < B.count[static_cast<size_t>(v)]; ++k)
      for (int l = 0; l < B.count[static_cast<size_t>(w)]; ++l)
        trips.emplace_back(B.first[static_cast<size_t>(v)] + k, B.first[static_cast<size_t>(w)] + l,
                           c * B.dir[static_cast<size_t>(v)][static_cast<size_t>(k)].dot(
                                   B.dir[static_cast<size_t>(w)][static_cast<size_t>(l)]));
  };
  for (size_t t = 0; t < s.triangles.size(); ++t) {
    const auto& tri = s.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int i = tri[static_cast<size_t>(k)];
      const int j = tri[static_cast<size_t>((k + 1) % 3)];
      const int l = tri[static_cast<size_t>((k + 2) % 3)];
      const double c = 0.5 * s.triangle_weight[t] *
                       std::max(cot_at(s.X[static_cast<size_t>(i)], s.X[static_cast<size_t>(j)], s.X[static_cast<size_t>(l)]), 1e-3);
      couple(j, j, c);
      couple(l, l, c);
      couple(j, l, -c);
      couple(l, j, -c);
    }
  }
  Eigen::SparseMatrix<double> K(B.size, B.size);
  K.setFromTriplets(trips.begin(), trips.end());
  P.ldlt.compute(K);
  P.ok = P.ldlt.info() == Eigen::Success;
}

bool inverted(const GluedSurface& s, const std::vector<Eigen::Vector3d>& ref_normals) {
  for (size_t t = 0; t < s.triangles.size(); ++t) {
    const Eigen::Vector3d c = tri_cross(s, s.triangles[t]);
    if (!(c.dot(ref_normals[t]) > 0.0)) return true;
  }
  return false;
}

// I(X) - I(base) summed per triangle without cancellation against the total.
double energy_delta(const GluedSurface& s, const std::vector<Eigen::Vector3d>& base) {
  double d = 0.0;
  for (size_t t = 0; t < s.triangles.size(); ++t) {
    const auto& tri = s.triangles[t];
    const Eigen::Vector3d c1 = tri_cross(s, tri);
    const Eigen::Vector3d& a = base[static_cast<size_t>(tri[0])];
    const Eigen::Vector3d c0 = (base[static_cast<size_t>(tri[1])] - a).cross(base[static_cast<size_t>(tri[2])] - a);
    const double den = c1.norm() + c0.norm();
    if (den > 0.0) d += s.triangle_weight[t] * 0.5 * (c1 - c0).dot(c1 + c0) / den;
  }
  return d;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

MinimizeReport minimize(GluedSurface& s, const MinimizeOptions& opt) {
  MinimizeReport rep;
  const std::vector<Eigen::Vector3d> X0 = s.X;
  double E = energy_value(s);
  rep.energy.push_back(E);
  const Basis B = make_basis(s);
  Preconditioner P;
  std::vector<Eigen::Vector3d> ref(s.triangles.size());
  auto refresh = [&] {
    factor(s, B, P);
    if (!P.ok) throw Error(Error::Code::Internal, "preconditioner factorisation failed");
    for (size_t t = 0; t < s.triangles.size(); ++t) ref[t] = tri_cross(s, s.triangles[t]);
  };
  refresh();

  auto gather = [&](const std::vector<Eigen::Vector3d>& g) {
    Eigen::VectorXd G(B.size);
    for (size_t v = 0; v < s.X.size(); ++v)
      for (int k = 0; k < B.count[v]; ++k)
        G[B.first[v] + k] = B.dir[v][static_cast<size_t>(k)].dot(g[v].head<2>());
    return G;
  };
  auto apply = [&](const std::vector<Eigen::Vector3d>& base, const Eigen::VectorXd& D, double alpha) {
    for (size_t v = 0; v < s.X.size(); ++v) {
      if (B.count[v] == 0) continue;
      Eigen::Vector2d d = Eigen::Vector2d::Zero();
      for (int k = 0; k < B.count[v]; ++k) d += D[B.first[v] + k] * B.dir[v][static_cast<size_t>(k)];
      s.X[v].head<2>() = base[v].head<2>() + alpha * d;
    }
  };

  // Limited-memory BFGS pairs; the initial inverse Hessian is the
  // preconditioner solve.
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  constexpr size_t kMemory = 8;
  auto direction = [&](const Eigen::VectorXd& G) {
    Eigen::VectorXd q = G;
    std::vector<double> a(pairs.size());
    for (size_t i = pairs.size(); i-- > 0;) {
      const auto& [sv, yv] = pairs[i];
      a[i] = sv.dot(q) / yv.dot(sv);
      q -= a[i] * yv;
    }
    Eigen::VectorXd r = P.ldlt.solve(q);
    for (size_t i = 0; i < pairs.size(); ++i) {
      const auto& [sv, yv] = pairs[i];
      const double b = yv.dot(r) / yv.dot(sv);
      r += (a[i] - b) * sv;
    }
    return Eigen::VectorXd(-r);
  };

  bool retried = false;
  int since_refresh = 0;
  Eigen::VectorXd G = gather(energy_gradient(s));
  for (int it = 0; it < opt.max_iterations; ++it) {
    rep.gradient_norm = max_abs(G);
    if (rep.gradient_norm < opt.gradient_tol) {
      rep.converged = true;
      rep.reason = "gradient below tolerance";
      break;
    }
    if (since_refresh >= opt.refactor_interval) {
      refresh();
      since_refresh = 0;
    }
    Eigen::VectorXd D = direction(G);
    double slope = G.dot(D);
    if (!(slope < 0.0)) {
      pairs.clear();
      D = direction(G);
      slope = G.dot(D);
      if (!(slope < 0.0)) {
        rep.converged = true;
        rep.reason = "no descent direction";
        break;
      }
    }

    const std::vector<Eigen::Vector3d> base = s.X;
    double alpha = 1.0;
    bool accepted = false, all_inverted = true;
    double E_new = E, delta = 0.0;
    for (int ls = 0; ls < 50; ++ls) {
      apply(base, D, alpha);
      if (!inverted(s, ref)) {
        all_inverted = false;
        delta = energy_delta(s, base);
        E_new = E + delta;
        if (delta <= 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      s.X = base;
      if (!pairs.empty() || !retried) {
        // Restart from the plain preconditioned direction with fresh normals.
        retried = pairs.empty();
        pairs.clear();
        refresh();
        since_refresh = 0;
        continue;
      }
      if (all_inverted) throw Error(Error::Code::Domain, "mesh inversion during minimisation");
      rep.converged = true;
      rep.reason = "line search stalled at round-off";
      break;
    }
    retried = false;
    ++rep.iterations;
    ++since_refresh;
    E = E_new;
    rep.energy.push_back(E);
    Eigen::VectorXd G_new = gather(energy_gradient(s));
    Eigen::VectorXd sv = alpha * D;
    Eigen::VectorXd yv = G_new - G;
    if (sv.dot(yv) > 1e-12 * sv.norm() * yv.norm()) {
      pairs.emplace_back(std::move(sv), std::move(yv));
      if (pairs.size() > kMemory) pairs.pop_front();
    }
    G = std::move(G_new);
    if (-delta <= opt.rel_decrease * std::abs(E)) {
      rep.gradient_norm = max_abs(G);
      rep.converged = true;
      rep.reason = "relative energy decrease below tolerance";
      break;
    }
  }
  if (rep.reason.empty()) {
    rep.gradient_norm = max_abs(G);
    rep.reason = "iteration limit";
  }
  for (size_t v = 0; v < s.X.size(); ++v) rep.max_displacement = std::max(rep.max_displacement, (s.X[v] - X0[v]).norm());
  s.minimized = rep.converged;
  return rep;
}

Network slice(const GluedSurface& s, double z) {
  const double slack = 1e-12 * std::max(1.0, s.z_max);
  const bool bottom = z == 0.0;
  if (!bottom && (z < 2.0 * s.epsilon - slack || z > s.z_max - 2.0 * s.epsilon + slack))
    fail_domain("slice height " + std::to_string(z) + " outside [2 eps, z_max - 2 eps]");
  int j = std::clamp(static_cast<int>(std::floor(z / s.dz)), 0, s.rows - 1);
  double w = (z - j * s.dz) / s.dz;
  if (w >= 1.0 - 1e-12) {
    ++j;
    w = 0.0;
  }
  auto at = [&](int col) {
    const auto& ids = s.columns[static_cast<size_t>(col)];
    const Eigen::Vector3d& a = s.X[static_cast<size_t>(ids[static_cast<size_t>(j)])];
    if (w == 0.0) return vec2(a[0], a[1]);
    const Eigen::Vector3d& b = s.X[static_cast<size_t>(ids[static_cast<size_t>(j + 1)])];
    return vec2(a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]));
  };
  Network out = s.base;
  for (size_t vi = 0; vi < out.vertices.size(); ++vi)
    out.vertices[vi].position = at(s.vertex_column_of_base[vi]);
  for (size_t ei = 0; ei < out.edges.size(); ++ei) {
    Edge& e = out.edges[ei];
    const auto& sheet = s.sheets[ei];
    const size_t n = e.closed ? sheet.size() - 1 : sheet.size();
    for (size_t k = 0; k < n; ++k) e.nodes[k] = at(sheet[k]);
  }
  return out;
}

TranslatorResidual translator_residual(const GluedSurface& s) {
  TranslatorResidual res;
  res.minimized = s.minimized;
  const size_t n = s.X.size();
  std::vector<Eigen::Vector3d> lap(n, Eigen::Vector3d::Zero()), normal(n, Eigen::Vector3d::Zero());
  std::vector<double> area(n, 0.0);
  for (const auto& tri : s.triangles) {
    const Eigen::Vector3d c = tri_cross(s, tri);
    for (int k = 0; k < 3; ++k) {
      const int i = tri[static_cast<size_t>(k)];
      const int j = tri[static_cast<size_t>((k + 1) % 3)];
      const int l = tri[static_cast<size_t>((k + 2) % 3)];
      const double ct = cot_at(s.X[static_cast<size_t>(i)], s.X[static_cast<size_t>(j)], s.X[static_cast<size_t>(l)]);
      lap[static_cast<size_t>(j)] += ct * (s.X[static_cast<size_t>(l)] - s.X[static_cast<size_t>(j)]);
      lap[static_cast<size_t>(l)] += ct * (s.X[static_cast<size_t>(j)] - s.X[static_cast<size_t>(l)]);
      area[static_cast<size_t>(i)] += c.norm() / 6.0;
      normal[static_cast<size_t>(i)] += c;
    }
  }
  double sum2 = 0.0;
  for (size_t v = 0; v < n; ++v) {
    if (s.fixed[v] || s.column_junction[static_cast<size_t>(s.vertex_column[v])] >= 0) continue;
    const double z = s.vertex_row[v] * s.dz;
    if (z < 2.0 * s.epsilon - 1e-12 || z > s.z_max - 2.0 * s.epsilon + 1e-12) continue;
    if (!(area[v] > 0.0) || !(normal[v].norm() > 0.0)) continue;
    const Eigen::Vector3d nrm = normal[v].normalized();
    const Eigen::Vector3d H = lap[v] / (2.0 * area[v]);
    const double r = std::abs(H.dot(nrm) + nrm[2] / s.epsilon);
    res.max = std::max(res.max, r);
    sum2 += r * r;
    ++res.vertices;
  }
  if (res.vertices > 0) res.rms = std::sqrt(sum2 / res.vertices);
  return res;
}

RegularizedFlow regularized_flow(const Network& net, const std::vector<double>& times, SurfaceOptions opt,
                                 const MinimizeOptions& mopt) {
  if (times.empty()) fail("regularized flow needs at least one time");
  const double eps = opt.epsilon;
  if (!(eps > 0.0)) fail("epsilon must be positive");
  const double t_max = *std::max_element(times.begin(), times.end());
  if (opt.z_max <= 0.0) opt.z_max = std::max(10.0 * eps, t_max / eps + 4.0 * eps);
  for (double t : times)
    if (t < 2.0 * eps * eps - 1e-15 || t > eps * (opt.z_max - 2.0 * eps) + 1e-15)
      fail_domain("time " + std::to_string(t) + " outside [2 eps^2, eps (z_max - 2 eps)]");
  RegularizedFlow out;
  out.surface = build_initial_surface(net, opt);
  out.report = minimize(out.surface, mopt);
  out.times = times;
  for (double t : times) out.slices.push_back(slice(out.surface, t / eps));
  return out;
}

void write_checkpoint(std::ostream& out, const GluedSurface& s) {
  out << "netflow-surface 1\n";
  out << "# format " << kFormatVersion << '\n';
  out << "epsilon " << format_real(s.epsilon) << '\n';
  out << "z_max " << format_real(s.z_max) << '\n';
  out << "rows " << s.rows << '\n';
  out << "minimized " << (s.minimized ? 1 : 0) << '\n';
  out << "vertices " << s.X.size() << '\n';
  out << "sheet u z id x y z fixed\n";
  for (size_t si = 0; si < s.sheets.size(); ++si) {
    const auto& sheet = s.sheets[si];
    const size_t n = s.base.edges[si].closed ? sheet.size() - 1 : sheet.size();
    for (size_t u = 0; u < n; ++u)
      for (int j = 0; j <= s.rows; ++j) {
        const int id = s.columns[static_cast<size_t>(sheet[u])][static_cast<size_t>(j)];
        const auto& p = s.X[static_cast<size_t>(id)];
        out << s.base.edges[si].id << ' ' << u << ' ' << j << ' ' << id << ' ' << format_real(p[0]) << ' '
            << format_real(p[1]) << ' ' << format_real(p[2]) << ' ' << int(s.fixed[static_cast<size_t>(id)]) << '\n';
      }
  }
  out << "shared_columns\n";
  for (size_t vi = 0; vi < s.base.vertices.size(); ++vi) {
    if (s.base.vertices[vi].valence() != 3) continue;
    out << "junction " << s.base.vertices[vi].id << " column " << s.vertex_column_of_base[vi] << " sheets";
    for (const auto& inc : s.base.vertices[vi].incident) out << ' ' << s.base.edges[static_cast<size_t>(inc.edge)].id;
    out << '\n';
  }
  out << "end\n";
}

}  // namespace netflow
