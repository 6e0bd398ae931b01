// Copyright 2026 The noregret-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noregret/experiment_config.h"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#ifndef NOREGRET_VERSION
#define NOREGRET_VERSION "unknown"
#endif

namespace noregret {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string ShortestReal(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

// Returns the canonical form or throws a message-only std::invalid_argument.
using Canonicalizer = std::function<std::string(std::string_view)>;

struct KeySpec {
  std::string_view name;
  std::string_view default_value;
  std::string_view grammar;
  Canonicalizer canonical;
  bool semantic = true;
};

Canonicalizer Integer(std::int64_t lo, std::int64_t hi = std::numeric_limits<std::int64_t>::max()) {
  return [lo, hi](std::string_view v) {
    std::int64_t x = 0;
    if (!ParseNumber(v, x)) throw std::invalid_argument("not an integer");
    if (x < lo || x > hi) throw std::invalid_argument("out of range");
    return std::to_string(x);
  };
}

Canonicalizer Real(double lo, double hi, bool lo_open = false) {
  return [=](std::string_view v) {
    double x = 0.0;
    if (!ParseNumber(v, x) || !std::isfinite(x)) {
      throw std::invalid_argument("not a finite number");
    }
    if (x < lo || x > hi || (lo_open && x == lo)) {
      throw std::invalid_argument("out of range");
    }
    return ShortestReal(x);
  };
}

std::string CanonicalGame(std::string_view v) {
  for (std::string_view prefix : {"family:", "zs-equivalent:"}) {
    if (!v.starts_with(prefix)) continue;
    const std::string_view rest = v.substr(prefix.size());
    const auto comma = rest.find(',');
    double a = 0.0, b = 0.0;
    if (comma == std::string_view::npos ||
        !ParseNumber(Trim(rest.substr(0, comma)), a) ||
        !ParseNumber(Trim(rest.substr(comma + 1)), b)) {
      throw std::invalid_argument("expected two numbers");
    }
    std::string out = std::string(prefix) + ShortestReal(a) + "," + ShortestReal(b);
    ParseGameDescriptor(out);
    return out;
  }
  ParseGameDescriptor(v);
  return std::string(v);
}

const std::vector<KeySpec>& Table() {
  static const std::vector<KeySpec> table = {
      {"alpha_coeff", "2", "real > 0", Real(0.0, 1e9, true)},
      {"checkpoint_base", "10", "real >= 1", Real(1.0, 1e18)},
      {"checkpoint_ratio", "1.25", "real > 1", Real(1.0, 1e9, true)},
      {"delta", "0.1", "real in (0, 0.5)", Real(0.0, 0.5, true)},
      {"game", "matching-pennies",
       "matching-pennies | family:a,b | zs-equivalent:a,b | <json path>",
       CanonicalGame},
      {"gamma", "1", "real > 0", Real(0.0, 1e9, true)},
      {"grid_levels", "9", "odd integer >= 3", [](std::string_view v) {
         const std::string s = Integer(3, 41)(v);
         if (std::stoi(s) % 2 == 0) throw std::invalid_argument("must be odd");
         return s;
       }},
      {"mode", "realization", "realization | telepathic",
       [](std::string_view v) {
         return std::string(ToString(ParseFeedbackMode(v)));
       }},
      {"n_runs", "1", "integer >= 1", Integer(1)},
      {"normalization", "by-sigma-hat", "by-sigma-hat | by-sqrt-t",
       [](std::string_view v) {
         if (v != "by-sigma-hat" && v != "by-sqrt-t") {
           throw std::invalid_argument("unknown normalisation");
         }
         return std::string(v);
       }},
      {"output_dir", "", "directory path",
       [](std::string_view v) { return std::string(v); }, false},
      {"pmf", "binomial",
       "binomial | poisson-binomial | shifted | mixture | demoivre | "
       "shift-ratio | extremizer",
       [](std::string_view v) {
         for (std::string_view k : {"binomial", "poisson-binomial", "shifted",
                                    "mixture", "demoivre", "shift-ratio",
                                    "extremizer"}) {
           if (v == k) return std::string(v);
         }
         throw std::invalid_argument("unknown pmf tool");
       }},
      {"pmf_delta", "0.1", "real in [0, 0.5]", Real(0.0, 0.5)},
      {"pmf_n", "0", "even integer >= 0", [](std::string_view v) {
         const std::string s = Integer(0)(v);
         if (std::stoll(s) % 2 != 0) throw std::invalid_argument("must be even");
         return s;
       }},
      {"pmf_q", "0.5", "probability", Real(0.0, 1.0)},
      {"pmf_qs", "", "'/'-separated probabilities", [](std::string_view v) {
         std::string out;
         while (!v.empty()) {
           const auto slash = v.find('/');
           out += (out.empty() ? "" : "/") +
                  Real(0.0, 1.0)(Trim(v.substr(0, slash)));
           if (slash == std::string_view::npos) break;
           v = v.substr(slash + 1);
         }
         return out;
       }},
      {"pmf_s", "0", "integer >= 0", Integer(0)},
      {"pmf_t", "100", "integer >= 0", Integer(0)},
      {"pmf_z", "-1", "integer >= -1 (-1: every z)", Integer(-1)},
      {"probe_s", "-1", "integer >= -1 (-1: scan the s grid)", Integer(-1)},
      {"probe_t", "100000", "integer >= 2", Integer(2)},
      {"rate_exponent", "0.5", "real in (0, 1]", Real(0.0, 1.0, true)},
      {"s_grid_ratio", "2", "real > 1", Real(1.0, 1e9, true)},
      {"samples", "200", "integer >= 1", Integer(1)},
      {"script", "", "empty | iid:q=<p> | prop1:q=,t=,s=,tail= | opposite-previous",
       [](std::string_view v) {
         return v.empty() ? std::string() : OpponentScript::Parse(v).ToString();
       }},
      {"seed", "0", "unsigned 64-bit integer", [](std::string_view v) {
         std::uint64_t x = 0;
         if (!ParseNumber(v, x)) throw std::invalid_argument("not an unsigned integer");
         return std::to_string(x);
       }},
      {"steps", "100000", "integer >= 1", Integer(1)},
      {"strategy1", "hedge:r=0.5", "strategy descriptor",
       [](std::string_view v) { return StrategySpec::Parse(v).ToString(); }},
      {"strategy2", "hedge:r=0.5", "strategy descriptor",
       [](std::string_view v) { return StrategySpec::Parse(v).ToString(); }},
      {"tail_value", "1", "0 | 1", Integer(0, 1)},
      {"tail_window", "10000", "integer >= 0", Integer(0)},
      {"window", "2", "real > 0", Real(0.0, 1e9, true)},
      {"workers", "0", "integer >= 0 (0: all hardware threads)", Integer(0, 4096),
       false},
  };
  return table;
}

const KeySpec& Lookup(std::string_view key) {
  for (const auto& spec : Table()) {
    if (spec.name == key) return spec;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string_view Version() { return NOREGRET_VERSION; }

ExperimentConfig::ExperimentConfig() {
  for (const auto& spec : Table()) {
    values_[std::string(spec.name)] = spec.canonical(spec.default_value);
  }
}

std::vector<std::string> ExperimentConfig::Keys() {
  std::vector<std::string> out;
  for (const auto& spec : Table()) out.emplace_back(spec.name);
  return out;
}

void ExperimentConfig::Set(std::string_view key, std::string_view value) {
  const KeySpec& spec = Lookup(Trim(key));
  const std::string_view v = Trim(value);
  try {
    values_[std::string(spec.name)] = spec.canonical(v);
  } catch (const std::exception& e) {
    throw ConfigError("bad value '" + std::string(v) + "' for key '" +
                      std::string(spec.name) + "': " + e.what() +
                      " (expected " + std::string(spec.grammar) + ")");
  }
}

void ExperimentConfig::SetAssignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) +
                      "'");
  }
  Set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::Parse(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                        "' already set on line " + std::to_string(it->second));
    }
    seen.emplace(key, line_no);
    config.Set(key, line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

const std::string& ExperimentConfig::Get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  return it->second;
}

std::int64_t ExperimentConfig::GetInt(std::string_view key) const {
  return std::stoll(Get(key));
}

double ExperimentConfig::GetReal(std::string_view key) const {
  double x = 0.0;
  ParseNumber(std::string_view(Get(key)), x);
  return x;
}

Game2x2 ExperimentConfig::game() const { return ParseGameDescriptor(Get("game")); }

StrategySpec ExperimentConfig::strategy1() const {
  return StrategySpec::Parse(Get("strategy1"));
}

std::optional<StrategySpec> ExperimentConfig::strategy2() const {
  if (!Get("script").empty()) return std::nullopt;
  return StrategySpec::Parse(Get("strategy2"));
}

std::optional<OpponentScript> ExperimentConfig::script() const {
  if (Get("script").empty()) return std::nullopt;
  return OpponentScript::Parse(Get("script"));
}

FeedbackMode ExperimentConfig::mode() const {
  return ParseFeedbackMode(Get("mode"));
}

std::uint64_t ExperimentConfig::seed() const { return std::stoull(Get("seed")); }

int ExperimentConfig::workers() const {
  return static_cast<int>(GetInt("workers"));
}

Normalization ExperimentConfig::normalization() const {
  return Get("normalization") == "by-sqrt-t" ? Normalization::kBySqrtT
                                             : Normalization::kBySigmaHat;
}

RunConfig ExperimentConfig::ToRunConfig() const {
  RunConfig rc;
  rc.game = game();
  rc.spec1 = strategy1();
  rc.spec2 = strategy2();
  rc.script = script();
  rc.mode = mode();
  rc.steps = GetInt("steps");
  rc.options.schedule.base = GetReal("checkpoint_base");
  rc.options.schedule.ratio = GetReal("checkpoint_ratio");
  rc.options.tail_window = GetInt("tail_window");
  try {
    ValidateRunConfig(rc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

std::string ExperimentConfig::Serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string ExperimentConfig::Hash() const {
  std::string text;
  for (const auto& spec : Table()) {
    if (!spec.semantic) continue;
    text += std::string(spec.name) + " = " + Get(spec.name) + "\n";
  }
  return GitBlobSha1(text);
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

nlohmann::json RunManifest::ToJson() const {
  return {{"subcommand", subcommand},     {"config", config},
          {"config_hash", config_hash},   {"tool_version", tool_version},
          {"wall_seconds", wall_seconds}, {"outputs", outputs}};
}

std::string GitBlobSha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr ||
      EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += kHex[digest[k] >> 4];
    out += kHex[digest[k] & 15];
  }
  return out;
}

}  // namespace noregret
