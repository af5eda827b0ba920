#include "ude/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ude/rng.hpp"
#include "ude/run_record.hpp"

namespace ude {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* wanted) {
  throw ConfigError("key '" + key + "': expected " + wanted + ", got '" + value + "'");
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_string(text.str(), path);
}

ConfigMap ConfigMap::parse_string(const std::string& text, const std::string& origin) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (auto cut = line.find_first_of("#;"); cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty() || section.find('.') != std::string::npos) {
        throw ConfigError(where() + "invalid section name '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where() + "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where() + "empty key");
    if (section.empty()) {
      throw ConfigError(where() + "key '" + key + "' appears before any [section]");
    }
    map.entries_[section + "." + key] = value;
  }
  return map;
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  bad_value(key, it->second, "a number");
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second;
  if (!s.empty() && s.front() != '-') {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  bad_value(key, s, "a non-negative integer");
}

std::size_t ConfigMap::get_size(const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string v = lower(it->second);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_value(key, it->second, "a boolean");
}

std::vector<std::string> ConfigMap::get_list(const std::string& key) const {
  std::vector<std::string> items;
  auto it = entries_.find(key);
  if (it == entries_.end()) return items;
  std::string piece;
  std::istringstream in(it->second);
  while (std::getline(in, piece, ',')) {
    piece = trim(piece);
    if (!piece.empty()) items.push_back(piece);
  }
  return items;
}

namespace {

struct TokenDefaults {
  EngineKind kind;
  std::optional<SelectionPolicy> policy;  // pinned by the token name
  double lpsr_frac = 1.0;
};

std::optional<TokenDefaults> builtin_token(const std::string& token) {
  if (token == "de") return TokenDefaults{EngineKind::de, {}};
  if (token == "shade") return TokenDefaults{EngineKind::shade, {}};
  if (token == "lshade") return TokenDefaults{EngineKind::lshade, {}, 1.0};
  if (token == "lshade-half") return TokenDefaults{EngineKind::lshade, {}, 0.5};
  if (token == "lshade-double") return TokenDefaults{EngineKind::lshade, {}, 2.0};
  if (token == "ude") return TokenDefaults{EngineKind::ude, {}};
  if (token == "ude-t") return TokenDefaults{EngineKind::ude, SelectionPolicy::tournament};
  if (token == "ude-dpt") return TokenDefaults{EngineKind::ude, SelectionPolicy::dpt};
  if (token == "ushade") return TokenDefaults{EngineKind::ushade, {}};
  if (token == "ushade-t") {
    return TokenDefaults{EngineKind::ushade, SelectionPolicy::tournament};
  }
  if (token == "ushade-dpt") return TokenDefaults{EngineKind::ushade, SelectionPolicy::dpt};
  // The discard variant is evaluated with diversity-preserving tournaments in
  // the reference setup, so that is its default here too.
  if (token == "ushade-df") {
    return TokenDefaults{EngineKind::ushade_df, SelectionPolicy::dpt};
  }
  return std::nullopt;
}

EngineKind kind_from_name(const std::string& key, const std::string& name) {
  const std::string n = lower(name);
  if (n == "de") return EngineKind::de;
  if (n == "shade") return EngineKind::shade;
  if (n == "lshade") return EngineKind::lshade;
  if (n == "ude") return EngineKind::ude;
  if (n == "ushade") return EngineKind::ushade;
  if (n == "ushade-df" || n == "ushade_df") return EngineKind::ushade_df;
  bad_value(key, name, "an engine kind (de, shade, lshade, ude, ushade, ushade-df)");
}

SelectionPolicy policy_value(const ConfigMap& cfg, const std::string& key,
                             SelectionPolicy fallback) {
  if (!cfg.has(key)) return fallback;
  try {
    return selection_policy_from_name(cfg.get_string(key, ""));
  } catch (const std::invalid_argument&) {
    bad_value(key, cfg.get_string(key, ""), "a selection policy (uniform, T, DPT)");
  }
}

TMode t_mode_value(const ConfigMap& cfg, const std::string& key, TMode fallback) {
  if (!cfg.has(key)) return fallback;
  const std::string v = lower(cfg.get_string(key, ""));
  if (v == "p1") return TMode::fixed_p1;
  if (v == "absolute") return TMode::absolute;
  bad_value(key, cfg.get_string(key, ""), "a T mode (p1, absolute)");
}

const std::set<std::string>& token_section_keys() {
  static const std::set<std::string> keys = {
      "engine",  "pop",     "gensize", "F",       "C",
      "pbest",   "archive_mult", "H",  "policy",  "T",
      "t_mode",  "lpsr_target_frac", "min_pop", "freeze_history",
      "sigma_C", "gamma_F", "sigma_T", "T_min"};
  return keys;
}

void validate_keys(const ConfigMap& cfg, const std::vector<std::string>& tokens) {
  static const std::set<std::string> experiment_keys = {
      "algorithms", "trials", "seed", "stride", "workers", "out", "alpha", "rng"};
  static const std::set<std::string> objective_keys = {"function", "dimension",
                                                       "budget", "shift_seed"};
  static const std::set<std::string> selection_keys = {"policy", "gensize", "T",
                                                       "t_mode"};
  static const std::set<std::string> adaptation_keys = {"H", "sigma_C", "gamma_F",
                                                        "sigma_T", "T_min"};
  const std::set<std::string> token_set(tokens.begin(), tokens.end());
  for (const auto& [key, value] : cfg.entries()) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    const std::set<std::string>* allowed = nullptr;
    if (section == "experiment") {
      allowed = &experiment_keys;
    } else if (section == "objective") {
      allowed = &objective_keys;
    } else if (section == "selection") {
      allowed = &selection_keys;
    } else if (section == "adaptation") {
      allowed = &adaptation_keys;
    } else {
      // Algorithm section: a builtin token, a configured token, or a custom
      // definition carrying its own engine kind.
      if (!token_set.count(section) && !builtin_token(section) &&
          !cfg.has(section + ".engine")) {
        throw ConfigError("section [" + section +
                          "] matches no algorithm token; custom engines need "
                          "'engine = <kind>' in their section");
      }
      allowed = &token_section_keys();
    }
    if (!allowed->count(name)) throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

EngineConfig resolve_engine_token(const std::string& token, const ConfigMap& cfg) {
  if (token.empty() || token.find('.') != std::string::npos ||
      token.find_first_of(" \t/") != std::string::npos) {
    throw ConfigError("invalid algorithm token '" + token + "'");
  }
  EngineConfig e;
  e.token = token;
  std::optional<SelectionPolicy> pinned_policy;
  if (const auto builtin = builtin_token(token)) {
    e.kind = builtin->kind;
    pinned_policy = builtin->policy;
    e.lpsr_target_frac = builtin->lpsr_frac;
  } else {
    const std::string key = token + ".engine";
    if (!cfg.has(key)) {
      throw ConfigError("unknown algorithm token '" + token +
                        "'; custom tokens need 'engine = <kind>' in a [" + token +
                        "] section");
    }
    e.kind = kind_from_name(key, cfg.get_string(key, ""));
  }

  switch (e.kind) {
    case EngineKind::de:
      e.pbest = 0.11;
      break;
    case EngineKind::shade:
      e.pbest = 0.10;
      e.archive_mult = 2.0;
      break;
    case EngineKind::lshade:
      e.pbest = 0.11;
      e.archive_mult = 1.4;
      break;
    case EngineKind::ude:
    case EngineKind::ushade:
    case EngineKind::ushade_df:
      e.pbest = 0.11;
      break;
  }

  if (e.unbounded()) {
    e.policy = policy_value(cfg, "selection.policy", SelectionPolicy::tournament);
    if (pinned_policy) e.policy = *pinned_policy;
    e.gensize = cfg.get_size("selection.gensize", e.gensize);
    if (cfg.has("selection.T")) {
      e.t_mode = TMode::absolute;
      e.T_absolute = cfg.get_double("selection.T", 0.0);
    }
    e.t_mode = t_mode_value(cfg, "selection.t_mode", e.t_mode);
  }
  e.H = cfg.get_size("adaptation.H", e.H);
  e.adapt.sigma_C = cfg.get_double("adaptation.sigma_C", e.adapt.sigma_C);
  e.adapt.gamma_F = cfg.get_double("adaptation.gamma_F", e.adapt.gamma_F);
  e.adapt.sigma_T = cfg.get_double("adaptation.sigma_T", e.adapt.sigma_T);
  e.adapt.T_min = cfg.get_double("adaptation.T_min", e.adapt.T_min);

  const auto sec = [&](const char* k) { return token + "." + k; };
  e.pop_init = cfg.get_size(sec("pop"), e.pop_init);
  e.gensize = cfg.get_size(sec("gensize"), e.gensize);
  e.F = cfg.get_double(sec("F"), e.F);
  e.C = cfg.get_double(sec("C"), e.C);
  e.pbest = cfg.get_double(sec("pbest"), e.pbest);
  e.archive_mult = cfg.get_double(sec("archive_mult"), e.archive_mult);
  e.H = cfg.get_size(sec("H"), e.H);
  e.policy = policy_value(cfg, sec("policy"), e.policy);
  if (cfg.has(sec("T"))) {
    e.t_mode = TMode::absolute;
    e.T_absolute = cfg.get_double(sec("T"), 0.0);
  }
  e.t_mode = t_mode_value(cfg, sec("t_mode"), e.t_mode);
  e.lpsr_target_frac = cfg.get_double(sec("lpsr_target_frac"), e.lpsr_target_frac);
  e.min_pop = cfg.get_size(sec("min_pop"), e.min_pop);
  e.freeze_history = cfg.get_bool(sec("freeze_history"), e.freeze_history);
  e.adapt.sigma_C = cfg.get_double(sec("sigma_C"), e.adapt.sigma_C);
  e.adapt.gamma_F = cfg.get_double(sec("gamma_F"), e.adapt.gamma_F);
  e.adapt.sigma_T = cfg.get_double(sec("sigma_T"), e.adapt.sigma_T);
  e.adapt.T_min = cfg.get_double(sec("T_min"), e.adapt.T_min);
  return e;
}

void ExperimentPlan::validate() const {
  if (algorithms.empty()) throw ConfigError("plan has no algorithms");
  if (problems.empty()) throw ConfigError("plan has no problems");
  std::set<std::string> tokens;
  for (const auto& a : algorithms) {
    if (!tokens.insert(a.token).second) {
      throw ConfigError("duplicate algorithm token '" + a.token + "'");
    }
  }
  std::set<FunctionId> funcs;
  for (const auto p : problems) {
    if (!funcs.insert(p).second) {
      throw ConfigError("duplicate problem '" + function_name(p) + "'");
    }
  }
  if (trials == 0) throw ConfigError("trials must be at least 1");
  if (budget == 0) throw ConfigError("budget must be positive");
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (out_dir.empty()) throw ConfigError("output directory must not be empty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  for (const auto& a : algorithms) {
    try {
      a.validate(dimension);
    } catch (const std::invalid_argument& err) {
      throw ConfigError("algorithm '" + a.token + "': " + err.what());
    }
  }
}

std::uint64_t ExperimentPlan::resolved_stride() const {
  if (checkpoint_stride != 0) return checkpoint_stride;
  return std::max<std::uint64_t>(1, budget / 200);
}

std::string ExperimentPlan::canonical() const {
  std::ostringstream out;
  out << "plan-format 1\n";
  out << "rng mt19937_64\n";
  out << "dimension " << dimension << "\n";
  out << "budget " << budget << "\n";
  out << "base_seed " << base_seed << "\n";
  if (shift_seed) {
    out << "shift fixed " << *shift_seed << "\n";
  } else {
    out << "shift per-trial\n";
  }
  out << "stride " << resolved_stride() << "\n";
  out << "problems";
  for (const auto p : problems) out << ' ' << function_name(p);
  out << "\n";
  for (const auto& a : algorithms) {
    out << "algorithm " << a.token << " kind=" << engine_kind_name(a.kind)
        << " pop=" << a.resolved_pop_init(dimension) << " gensize=" << a.gensize
        << " F=" << format_double(a.F) << " C=" << format_double(a.C)
        << " pbest=" << format_double(a.pbest)
        << " archive=" << format_double(a.archive_mult)
        << " H=" << a.resolved_H(dimension)
        << " policy=" << selection_policy_name(a.policy)
        << " t_mode=" << (a.t_mode == TMode::absolute ? "absolute" : "p1")
        << " T=" << format_double(a.T_absolute)
        << " lpsr=" << format_double(a.lpsr_target_frac) << " min_pop=" << a.min_pop
        << " freeze=" << (a.freeze_history ? 1 : 0)
        << " gamma_F=" << format_double(a.adapt.gamma_F)
        << " sigma_C=" << format_double(a.adapt.sigma_C)
        << " sigma_T=" << format_double(a.adapt.sigma_T)
        << " T_min=" << format_double(a.adapt.T_min) << "\n";
  }
  return out.str();
}

std::string ExperimentPlan::hash() const {
  std::uint64_t state = fnv1a64(canonical());
  const std::uint64_t h = splitmix64_next(state);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentPlan plan_from_config(const ConfigMap& cfg, const PlanOverrides& overrides) {
  ExperimentPlan plan;
  const std::uint64_t trials = cfg.get_u64("experiment.trials", 51);
  if (trials > 0xFFFFFFFFULL) throw ConfigError("experiment.trials is out of range");
  plan.trials = static_cast<std::uint32_t>(trials);
  plan.base_seed = cfg.get_u64("experiment.seed", plan.base_seed);
  plan.workers = cfg.get_size("experiment.workers", plan.workers);
  plan.out_dir = cfg.get_string("experiment.out", plan.out_dir);
  plan.alpha = cfg.get_double("experiment.alpha", plan.alpha);
  plan.checkpoint_stride = cfg.get_u64("experiment.stride", plan.checkpoint_stride);
  const std::string rng = cfg.get_string("experiment.rng", "mt19937_64");
  if (rng != "mt19937_64") {
    throw ConfigError("experiment.rng: the only supported generator is mt19937_64");
  }

  plan.dimension = cfg.get_size("objective.dimension", plan.dimension);
  plan.budget = cfg.get_u64("objective.budget", plan.budget);
  if (cfg.has("objective.shift_seed")) {
    plan.shift_seed = cfg.get_u64("objective.shift_seed", 0);
  }
  std::vector<std::string> names = cfg.get_list("objective.function");
  if (names.empty()) names = {"sphere"};
  for (const auto& name : names) {
    try {
      plan.problems.push_back(function_from_name(name));
    } catch (const std::invalid_argument&) {
      bad_value("objective.function", name, "a known function name");
    }
  }

  if (overrides.trials) plan.trials = *overrides.trials;
  if (overrides.seed) plan.base_seed = *overrides.seed;
  if (overrides.workers) plan.workers = *overrides.workers;
  if (overrides.out_dir) plan.out_dir = *overrides.out_dir;
  if (overrides.budget) plan.budget = *overrides.budget;

  std::vector<std::string> tokens;
  if (overrides.engine) {
    tokens = {*overrides.engine};
  } else {
    tokens = cfg.get_list("experiment.algorithms");
  }
  if (tokens.empty()) {
    throw ConfigError(
        "no algorithms selected: set experiment.algorithms or pass --engine");
  }
  for (const auto& token : tokens) {
    plan.algorithms.push_back(resolve_engine_token(token, cfg));
  }

  validate_keys(cfg, tokens);
  plan.validate();
  return plan;
}

std::uint64_t trial_seed(const ExperimentPlan& plan, const std::string& token,
                         const std::string& problem, std::uint32_t trial) {
  return mix_seed({plan.base_seed, fnv1a64(token), fnv1a64(problem), trial});
}

std::uint64_t instance_shift_seed(const ExperimentPlan& plan,
                                  const std::string& problem, std::uint32_t trial) {
  if (plan.shift_seed) {
    return mix_seed({*plan.shift_seed, fnv1a64("instance"), fnv1a64(problem)});
  }
  return mix_seed({plan.base_seed, fnv1a64("instance"), fnv1a64(problem), trial});
}

}  // namespace ude
