// Copyright 2026 The crblea Authors.
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

#include "crblea/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "crblea/problems.hpp"

namespace crblea {

namespace {

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
  std::istringstream is(raw);
  T value{};
  is >> value;
  if (is.fail() || !(is >> std::ws).eof()) {
    throw ConfigurationError("config key '" + key + "': cannot parse '" + raw + "'");
  }
  return value;
}

using Setter = std::function<void(HarnessConfig&, const std::string& key, const std::string&)>;

template <typename T, typename Field>
Setter number(Field field) {
  return [field](HarnessConfig& cfg, const std::string& key, const std::string& raw) {
    field(cfg) = parse_value<T>(key, raw);
  };
}

void level_setters(std::map<std::string, Setter>& s, const std::string& section,
                   OptimizerConfig HarnessConfig::*level) {
  s[section + ".optimizer"] = [level](HarnessConfig& c, const std::string& key,
                                      const std::string& v) {
    try {
      (c.*level).kind = engine_from_string(v);
    } catch (const ConfigurationError& e) {
      throw ConfigurationError("config key '" + key + "': " + e.what());
    }
  };
  s[section + ".pop_size"] =
      number<int>([level](HarnessConfig& c) -> int& { return (c.*level).pop_size; });
  s[section + ".de_scale"] =
      number<double>([level](HarnessConfig& c) -> double& { return (c.*level).de_scale; });
  s[section + ".de_crossover"] =
      number<double>([level](HarnessConfig& c) -> double& { return (c.*level).de_crossover; });
  s[section + ".cma_sigma0"] =
      number<double>([level](HarnessConfig& c) -> double& { return (c.*level).cma_sigma0; });
}

Mode parse_mode(const std::string& key, const std::string& v) {
  try {
    return mode_from_string(v);
  } catch (const ConfigurationError& e) {
    throw ConfigurationError("config key '" + key + "': " + e.what());
  }
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> s;
    s["problem"] = [](HarnessConfig& c, const std::string&, const std::string& v) {
      c.problem = v;
    };
    s["m"] = number<int>([](HarnessConfig& c) -> int& { return c.m; });
    s["n"] = number<int>([](HarnessConfig& c) -> int& { return c.n; });
    s["mode"] = [](HarnessConfig& c, const std::string& k, const std::string& v) {
      c.mode = parse_mode(k, v);
    };
    s["variant_mode"] = [](HarnessConfig& c, const std::string& k, const std::string& v) {
      c.variant_mode = parse_mode(k, v);
    };
    s["runs"] = number<int>([](HarnessConfig& c) -> int& { return c.runs; });
    s["base_seed"] =
        number<std::uint64_t>([](HarnessConfig& c) -> std::uint64_t& { return c.base_seed; });
    s["output_dir"] = [](HarnessConfig& c, const std::string&, const std::string& v) {
      c.output_dir = v;
    };
    s["jobs"] = number<int>([](HarnessConfig& c) -> int& { return c.jobs; });
    level_setters(s, "upper", &HarnessConfig::upper);
    level_setters(s, "lower", &HarnessConfig::lower);

    auto& t = s;
    t["termination.fes_u_max"] = number<std::int64_t>(
        [](HarnessConfig& c) -> std::int64_t& { return c.termination.fes_u_max; });
    t["termination.fes_u_var_window"] = number<std::int64_t>(
        [](HarnessConfig& c) -> std::int64_t& { return c.termination.fes_u_var_window; });
    t["termination.upper_var_eps"] =
        number<double>([](HarnessConfig& c) -> double& { return c.termination.upper_var_eps; });
    t["termination.fes_l_max"] = number<std::int64_t>(
        [](HarnessConfig& c) -> std::int64_t& { return c.termination.fes_l_max; });
    t["termination.fes_l_var_window"] = number<std::int64_t>(
        [](HarnessConfig& c) -> std::int64_t& { return c.termination.fes_l_var_window; });
    t["termination.lower_var_eps"] =
        number<double>([](HarnessConfig& c) -> double& { return c.termination.lower_var_eps; });
    t["termination.target_acc"] =
        number<double>([](HarnessConfig& c) -> double& { return c.termination.target_acc; });

    t["termination.lower_signal"] = [](HarnessConfig& c, const std::string& k,
                                       const std::string& v) {
      if (v == "best_so_far") {
        c.termination.lower_signal = LowerSignal::BestSoFar;
      } else if (v == "generation_best") {
        c.termination.lower_signal = LowerSignal::GenerationBest;
      } else {
        throw ConfigurationError("config key '" + k +
                                 "': expected best_so_far or generation_best, got '" + v + "'");
      }
    };

    s["net.width"] = number<int>([](HarnessConfig& c) -> int& { return c.net.width; });
    s["net.epochs"] = number<int>([](HarnessConfig& c) -> int& { return c.net.epochs; });
    s["net.lr"] = number<double>([](HarnessConfig& c) -> double& { return c.net.lr; });
    s["net.early_stop_delta"] =
        number<double>([](HarnessConfig& c) -> double& { return c.net.early_stop_delta; });
    s["net.early_stop_window"] =
        number<int>([](HarnessConfig& c) -> int& { return c.net.early_stop_window; });
    s["net.init"] = [](HarnessConfig& c, const std::string& k, const std::string& v) {
      if (v == "fresh") {
        c.net.init = InitMode::Fresh;
      } else if (v == "warm") {
        c.net.init = InitMode::Warm;
      } else {
        throw ConfigurationError("config key '" + k + "': expected fresh or warm, got '" + v +
                                 "'");
      }
    };
    s["net.normalization"] = [](HarnessConfig& c, const std::string& k, const std::string& v) {
      if (v == "bounds") {
        c.net.frame = InputFrame::Bounds;
      } else if (v == "pool") {
        c.net.frame = InputFrame::Pool;
      } else {
        throw ConfigurationError("config key '" + k + "': expected bounds or pool, got '" + v +
                                 "'");
      }
    };
    s["net.psi_activation"] = [](HarnessConfig& c, const std::string& k, const std::string& v) {
      if (v == "relu") {
        c.net.psi_relu = true;
      } else if (v == "linear") {
        c.net.psi_relu = false;
      } else {
        throw ConfigurationError("config key '" + k + "': expected relu or linear, got '" + v +
                                 "'");
      }
    };
    return s;
  }();
  return table;
}

void apply(HarnessConfig& cfg, const boost::property_tree::ptree& tree, const std::string& prefix) {
  for (const auto& [name, child] : tree) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (!child.empty()) {
      apply(cfg, child, key);
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigurationError("unknown config key '" + key + "'");
    it->second(cfg, key, child.data());
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Nested: return "nested";
    case Mode::CR: return "cr";
    case Mode::CRNoNet: return "cr_no_net";
    case Mode::CRNoResample: return "cr_no_resample";
  }
  return "nested";
}

std::string to_string(LowerSignal signal) {
  return signal == LowerSignal::GenerationBest ? "generation_best" : "best_so_far";
}

Mode mode_from_string(const std::string& name) {
  if (name == "nested") return Mode::Nested;
  if (name == "cr") return Mode::CR;
  if (name == "cr_no_net") return Mode::CRNoNet;
  if (name == "cr_no_resample") return Mode::CRNoResample;
  throw ConfigurationError("unknown mode '" + name +
                           "' (expected nested, cr, cr_no_net or cr_no_resample)");
}

int upper_population_formula(int m, int n) {
  return 4 + static_cast<int>(std::floor(std::log(static_cast<double>(m + n))));
}

int lower_population_formula(int n) {
  return 4 + static_cast<int>(std::floor(std::log(static_cast<double>(n))));
}

int effective_upper_pop(const HarnessConfig& cfg) {
  return cfg.upper.pop_size > 0 ? cfg.upper.pop_size : upper_population_formula(cfg.m, cfg.n);
}

int effective_lower_pop(const HarnessConfig& cfg) {
  return cfg.lower.pop_size > 0 ? cfg.lower.pop_size : lower_population_formula(cfg.n);
}

int effective_width(const HarnessConfig& cfg) {
  return cfg.net.width > 0 ? cfg.net.width : std::max(8, 4 * (cfg.m + cfg.n));
}

void validate(const HarnessConfig& cfg) {
  if (cfg.m < 1) throw ConfigurationError("config key 'm': must be >= 1");
  if (cfg.n < 1) throw ConfigurationError("config key 'n': must be >= 1");
  if (cfg.runs < 1) throw ConfigurationError("config key 'runs': must be >= 1");
  if (cfg.jobs < 1) throw ConfigurationError("config key 'jobs': must be >= 1");
  const auto& t = cfg.termination;
  if (t.fes_u_max <= 0 || t.fes_u_var_window <= 0 || t.upper_var_eps <= 0.0 ||
      t.fes_l_max <= 0 || t.fes_l_var_window <= 0 || t.lower_var_eps <= 0.0 ||
      t.target_acc <= 0.0) {
    throw ConfigurationError("config section 'termination': every value must be positive");
  }
  if (cfg.net.epochs < 1) throw ConfigurationError("config key 'net.epochs': must be >= 1");
  if (!(cfg.net.lr > 0.0)) throw ConfigurationError("config key 'net.lr': must be > 0");
  if (cfg.net.width < 0) throw ConfigurationError("config key 'net.width': must be >= 0");
  for (const auto& [name, level, pop] :
       {std::tuple{"upper", cfg.upper, effective_upper_pop(cfg)},
        std::tuple{"lower", cfg.lower, effective_lower_pop(cfg)}}) {
    OptimizerConfig probe = level;
    probe.pop_size = pop;
    try {
      validate(probe);
    } catch (const ConfigurationError& e) {
      throw ConfigurationError(std::string("config section '") + name + "': " + e.what());
    }
  }
  try {
    (void)make_problem(cfg.problem, cfg.m, cfg.n);
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(std::string("config key 'problem': ") + e.what());
  }
}

HarnessConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  HarnessConfig cfg;
  apply(cfg, tree, "");
  validate(cfg);
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(path + ": " + e.what());
  }
}

std::string canonical_form(const HarnessConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  auto level = [&](const char* name, const OptimizerConfig& o, int pop) {
    os << name << ".optimizer=" << to_string(o.kind) << ";" << name << ".pop_size=" << pop << ";"
       << name << ".de_scale=" << o.de_scale << ";" << name << ".de_crossover=" << o.de_crossover
       << ";" << name << ".cma_sigma0=" << o.cma_sigma0 << ";";
  };
  os << "problem=" << cfg.problem << ";m=" << cfg.m << ";n=" << cfg.n
     << ";mode=" << to_string(cfg.mode) << ";";
  level("upper", cfg.upper, effective_upper_pop(cfg));
  level("lower", cfg.lower, effective_lower_pop(cfg));
  const auto& t = cfg.termination;
  os << "termination=" << t.fes_u_max << "," << t.fes_u_var_window << "," << t.upper_var_eps
     << "," << t.fes_l_max << "," << t.fes_l_var_window << "," << t.lower_var_eps << ","
     << t.target_acc << "," << to_string(t.lower_signal) << ";";
  os << "net=" << effective_width(cfg) << "," << cfg.net.epochs << "," << cfg.net.lr << ","
     << (cfg.net.init == InitMode::Fresh ? "fresh" : "warm") << ","
     << (cfg.net.psi_relu ? "relu" : "linear") << ","
     << (cfg.net.frame == InputFrame::Pool ? "pool" : "bounds") << "," << cfg.net.early_stop_delta << ","
     << cfg.net.early_stop_window << ";";
  return os.str();
}

std::string fingerprint(const HarnessConfig& cfg) {
  std::ostringstream os;
  os << std::hex << fnv1a(canonical_form(cfg));
  return os.str();
}

}  // namespace crblea
