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

#include "netflow/scenario.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

namespace netflow {

namespace {

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& msg) {
  throw Error(Error::Code::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

bool to_real(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return errno == 0 && end == tok.c_str() + tok.size() && std::isfinite(out);
}

bool to_int(const std::string& tok, int& out) {
  if (tok.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (errno != 0 || end != tok.c_str() + tok.size()) return false;
  out = static_cast<int>(v);
  return true;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ',')) {
    const auto toks = split(cur);
    if (toks.size() != 1) throw Error(Error::Code::Parse, what + ": malformed list entry '" + cur + "'");
    double v = 0;
    if (!to_real(toks[0], v)) throw Error(Error::Code::Parse, what + ": not a real number: '" + toks[0] + "'");
    out.push_back(v);
  }
  return out;
}

double Scenario::real(const std::string& key, double fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  double v = 0;
  if (!to_real(it->second, v)) throw Error(Error::Code::Parse, "param " + key + ": not a real: " + it->second);
  return v;
}

int Scenario::integer(const std::string& key, int fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  int v = 0;
  if (!to_int(it->second, v)) throw Error(Error::Code::Parse, "param " + key + ": not an integer: " + it->second);
  return v;
}

std::string Scenario::text(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::vector<double> Scenario::reals(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) return {};
  return parse_real_list(it->second, "param " + key);
}

Scenario read_scenario(std::istream& in, const std::string& source) {
  Scenario sc;
  std::string raw;
  int lineno = 0;
  bool have_magic = false;
  bool have_dim = false;
  bool ended = false;
  std::unordered_map<int, int> vertex_of_id;
  std::unordered_map<int, int> seen_edge_ids;

  auto next_tokens = [&](std::vector<std::string>& toks) {
    while (std::getline(in, raw)) {
      ++lineno;
      const auto hash = raw.find('#');
      toks = split(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (!toks.empty()) return true;
    }
    return false;
  };
  auto read_point = [&](const std::vector<std::string>& toks, size_t first, const std::string& what) {
    if (toks.size() != first + static_cast<size_t>(sc.net.dim))
      parse_error(source, lineno, what + ": expected " + std::to_string(sc.net.dim) + " coordinates");
    Vec p = zeros(sc.net.dim);
    for (int k = 0; k < sc.net.dim; ++k)
      if (!to_real(toks[first + static_cast<size_t>(k)], p[k]))
        parse_error(source, lineno, what + ": coordinate " + std::to_string(k) + " is not a finite real");
    return p;
  };
  auto read_nodes = [&](int count, const std::string& what) {
    std::vector<Point> nodes;
    std::vector<std::string> toks;
    for (int i = 0; i < count; ++i) {
      if (!next_tokens(toks)) parse_error(source, lineno, what + ": missing node line " + std::to_string(i));
      nodes.push_back(read_point(toks, 0, what + " node " + std::to_string(i)));
    }
    return nodes;
  };

  std::vector<std::string> toks;
  while (next_tokens(toks)) {
    const std::string& key = toks[0];
    if (!have_magic) {
      int ver = 0;
      if (key != kScenarioMagic || toks.size() != 2 || !to_int(toks[1], ver))
        parse_error(source, lineno, std::string("expected header '") + kScenarioMagic + " <version>'");
      if (ver != kScenarioVersion) parse_error(source, lineno, "unsupported format version " + toks[1]);
      have_magic = true;
      continue;
    }
    if (ended) parse_error(source, lineno, "content after 'end'");
    if (key == "dim") {
      int d = 0;
      if (have_dim || toks.size() != 2 || !to_int(toks[1], d) || d < 2 || d > kMaxDim)
        parse_error(source, lineno, "dim: expected a single integer in [2, " + std::to_string(kMaxDim) + "]");
      sc.net = Network(d);
      have_dim = true;
    } else if (key == "time") {
      double t = 0;
      if (toks.size() != 2 || !to_real(toks[1], t)) parse_error(source, lineno, "time: expected one real");
      sc.time = t;
    } else if (key == "vertex") {
      if (!have_dim) parse_error(source, lineno, "vertex before dim");
      int id = 0;
      if (toks.size() < 3 || !to_int(toks[1], id)) parse_error(source, lineno, "vertex: expected id");
      VertexKind kind;
      if (toks[2] == "fixed")
        kind = VertexKind::Fixed;
      else if (toks[2] == "junction")
        kind = VertexKind::Junction;
      else
        parse_error(source, lineno, "vertex: kind must be 'fixed' or 'junction'");
      if (vertex_of_id.count(id)) parse_error(source, lineno, "vertex: duplicate id " + toks[1]);
      vertex_of_id[id] = sc.net.add_vertex(read_point(toks, 3, "vertex"), kind, id);
    } else if (key == "edge") {
      if (!have_dim) parse_error(source, lineno, "edge before dim");
      int id = 0, a = 0, b = 0, n = 0;
      if (toks.size() != 5 || !to_int(toks[1], id) || !to_int(toks[2], a) || !to_int(toks[3], b) ||
          !to_int(toks[4], n))
        parse_error(source, lineno, "edge: expected '<id> <v0> <v1> <node count>'");
      if (seen_edge_ids.count(id)) parse_error(source, lineno, "edge: duplicate id " + toks[1]);
      if (!vertex_of_id.count(a) || !vertex_of_id.count(b))
        parse_error(source, lineno, "edge: unknown endpoint vertex id");
      if (n < 2) parse_error(source, lineno, "edge: needs at least 2 nodes");
      const int header_line = lineno;
      auto nodes = read_nodes(n, "edge " + toks[1]);
      const Vec& pa = sc.net.vertices[static_cast<size_t>(vertex_of_id[a])].position;
      const Vec& pb = sc.net.vertices[static_cast<size_t>(vertex_of_id[b])].position;
      if (nodes.front() != pa || nodes.back() != pb)
        parse_error(source, header_line, "edge " + toks[1] + ": end nodes must equal its vertex positions");
      seen_edge_ids[id] = sc.net.add_edge(vertex_of_id[a], vertex_of_id[b], std::move(nodes), id);
    } else if (key == "loop") {
      if (!have_dim) parse_error(source, lineno, "loop before dim");
      int id = 0, n = 0;
      if (toks.size() != 3 || !to_int(toks[1], id) || !to_int(toks[2], n))
        parse_error(source, lineno, "loop: expected '<id> <node count>'");
      if (seen_edge_ids.count(id)) parse_error(source, lineno, "loop: duplicate id " + toks[1]);
      if (n < 3) parse_error(source, lineno, "loop: needs at least 3 nodes");
      seen_edge_ids[id] = sc.net.add_loop(read_nodes(n, "loop " + toks[1]), id);
    } else if (key == "param") {
      if (toks.size() != 3) parse_error(source, lineno, "param: expected '<key> <value>'");
      sc.params[toks[1]] = toks[2];
    } else if (key == "end") {
      ended = true;
    } else {
      parse_error(source, lineno, "unknown record '" + key + "'");
    }
  }
  if (!have_magic) parse_error(source, lineno, "empty scenario");
  if (!have_dim) parse_error(source, lineno, "missing dim record");
  if (!ended) parse_error(source, lineno, "missing 'end'");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Code::Io, "cannot open scenario '" + path + "'");
  return read_scenario(in, path);
}

void write_scenario(std::ostream& out, const Scenario& sc) {
  const Network& net = sc.net;
  out << kScenarioMagic << ' ' << kScenarioVersion << '\n';
  out << "# format " << kFormatVersion << '\n';
  out << "dim " << net.dim << '\n';
  if (sc.time) out << "time " << format_real(*sc.time) << '\n';
  auto point = [&](const Vec& p) {
    for (int k = 0; k < p.size(); ++k) out << (k ? " " : "") << format_real(p[k]);
  };
  for (const auto& v : net.vertices) {
    out << "vertex " << v.id << ' ' << (v.kind == VertexKind::Fixed ? "fixed" : "junction") << ' ';
    point(v.position);
    out << '\n';
  }
  for (const auto& e : net.edges) {
    if (e.closed)
      out << "loop " << e.id << ' ' << e.node_count() << '\n';
    else
      out << "edge " << e.id << ' ' << net.vertices[static_cast<size_t>(e.v0)].id << ' '
          << net.vertices[static_cast<size_t>(e.v1)].id << ' ' << e.node_count() << '\n';
    for (const auto& p : e.nodes) {
      point(p);
      out << '\n';
    }
  }
  for (const auto& [k, v] : sc.params) out << "param " << k << ' ' << v << '\n';
  out << "end\n";
}

void save_scenario(const std::string& path, const Scenario& sc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Code::Io, "cannot write '" + path + "'");
  write_scenario(out, sc);
  if (!out) throw Error(Error::Code::Io, "write failed for '" + path + "'");
}

void save_network(const std::string& path, const Network& net, std::optional<double> time,
                  const std::map<std::string, std::string>& params) {
  Scenario sc;
  sc.net = net;
  sc.time = time;
  sc.params = params;
  save_scenario(path, sc);
}

}  // namespace netflow
