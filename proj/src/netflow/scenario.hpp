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

// Line-oriented scenario files:
//
//   netflow-scenario 1
//   dim 2
//   time 0.25                      (optional; snapshot time)
//   vertex <id> fixed|junction <x1> ... <xd>
//   edge <id> <v0> <v1> <n>        followed by n node lines
//   loop <id> <n>                  followed by n node lines
//   param <key> <value>
//   end
//
// Reals are written with 17 significant digits, so load(save(x)) == x.

#pragma once

#include "netflow/network.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netflow {

inline constexpr const char* kScenarioMagic = "netflow-scenario";
inline constexpr int kScenarioVersion = 1;
inline constexpr const char* kFormatVersion = "netflow-1";

struct Scenario {
  Network net;
  std::map<std::string, std::string> params;
  std::optional<double> time;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  double real(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> reals(const std::string& key) const;
};

std::string format_real(double x);
/// Comma separated list of reals; throws Parse errors naming `what`.
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

Scenario read_scenario(std::istream& in, const std::string& source = "<stream>");
Scenario load_scenario(const std::string& path);
void write_scenario(std::ostream& out, const Scenario& sc);
void save_scenario(const std::string& path, const Scenario& sc);

void save_network(const std::string& path, const Network& net, std::optional<double> time = std::nullopt,
                  const std::map<std::string, std::string>& params = {});

}  // namespace netflow
