#include "contagion/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"

namespace contagion {

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"model",
     {"alpha", "beta", "lambda0", "rho", "r", "eta", "horizon", "claim_dist",
      "ext_dist", "self_excitation", "unsafe_moments"}},
    {"contract", {"kind", "beta_m"}},
    {"premium", {"kind", "theta_i", "theta_r", "eta_i", "eta_r"}},
    {"grids",
     {"t_points", "lambda_min", "lambda_max", "lambda_points", "n_paths",
      "master_seed"}},
    {"run",
     {"sim_paths", "timechange_min_claims", "policy_u", "policy_tol",
      "max_iterations", "compare_tol", "probe_points", "check_u_points"}},
};

struct RawConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
  }

  const std::string& get(const std::string& section,
                         const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end() || !s->second.count(key))
      throw ConfigError("missing key " + section + "." + key);
    return s->second.at(key);
  }
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " +
                          std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      if (!kKnownKeys.count(section))
        throw ConfigError("unknown section [" + section + "]");
      raw.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value at line " +
                        std::to_string(line_no));
    if (section.empty())
      throw ConfigError("key outside any section at line " +
                        std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.at(section).count(key))
      throw ConfigError("unknown key " + section + "." + key);
    if (raw.sections[section].count(key))
      throw ConfigError("duplicate key " + section + "." + key);
    raw.sections[section][key] = value;
  }
  return raw;
}

double parse_number(const RawConfig& raw, const std::string& section,
                    const std::string& key) {
  const std::string& s = raw.get(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + section + "." + key + ": '" +
                      s + "'");
  }
}

double parse_number_or(const RawConfig& raw, const std::string& section,
                       const std::string& key, double fallback) {
  return raw.has(section, key) ? parse_number(raw, section, key) : fallback;
}

std::uint64_t parse_unsigned(const RawConfig& raw, const std::string& section,
                             const std::string& key, std::uint64_t fallback,
                             bool required = false) {
  if (!raw.has(section, key)) {
    if (required) throw ConfigError("missing key " + section + "." + key);
    return fallback;
  }
  const std::string& s = raw.get(section, key);
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + section + "." + key + ": '" +
                      s + "'");
  }
}

bool parse_bool(const RawConfig& raw, const std::string& section,
                const std::string& key, bool fallback) {
  if (!raw.has(section, key)) return fallback;
  const std::string& s = raw.get(section, key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("invalid boolean for " + section + "." + key + ": '" + s +
                    "'");
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

double word_number(const std::string& w, const std::string& what) {
  try {
    if (w == "inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    const double v = std::stod(w, &pos);
    if (pos != w.size()) throw std::invalid_argument(w);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + w + "' in " + what);
  }
}

MarkDistribution parse_distribution(const RawConfig& raw,
                                    const std::string& key,
                                    bool allow_unbounded) {
  const std::string spec = raw.get("model", key);
  const auto w = words(spec);
  const std::string what = "model." + key;
  if (w.empty()) throw ConfigError(what + " is empty");
  if (w[0] == "uniform") {
    if (w.size() != 3)
      throw ConfigError(what + ": expected 'uniform <a> <b>'");
    return MarkDistribution::uniform(word_number(w[1], what),
                                     word_number(w[2], what));
  }
  if (w[0] == "truncexp") {
    if (w.size() != 3)
      throw ConfigError(what + ": expected 'truncexp <rate> <cap>'");
    return MarkDistribution::truncated_exponential(word_number(w[1], what),
                                                   word_number(w[2], what),
                                                   allow_unbounded);
  }
  if (w[0] == "pointmass") {
    if (w.size() != 2)
      throw ConfigError(what + ": expected 'pointmass <z0>'");
    return MarkDistribution::point_mass(word_number(w[1], what));
  }
  throw ConfigError(what + ": unknown family '" + w[0] + "'");
}

SelfExcitation parse_excitation(const RawConfig& raw) {
  const std::string spec = raw.get("model", "self_excitation");
  const auto w = words(spec);
  if (w.empty()) throw ConfigError("model.self_excitation is empty");
  if (w[0] == "zero") {
    if (w.size() != 1)
      throw ConfigError("model.self_excitation: expected 'zero'");
    return SelfExcitation::zero();
  }
  if (w[0] == "constant") {
    if (w.size() != 2)
      throw ConfigError("model.self_excitation: expected 'constant <a>'");
    return SelfExcitation::constant(
        word_number(w[1], "model.self_excitation"));
  }
  if (w[0] == "linear") {
    if (w.size() != 2)
      throw ConfigError("model.self_excitation: expected 'linear <a>'");
    return SelfExcitation::linear(word_number(w[1], "model.self_excitation"));
  }
  throw ConfigError("model.self_excitation: unknown form '" + w[0] + "'");
}

}  // namespace

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> ScenarioConfig::t_grid() const {
  return linspace(0.0, model.horizon, t_points);
}

std::vector<double> ScenarioConfig::lambda_grid() const {
  return linspace(lambda_min, lambda_max, lambda_points);
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  const RawConfig raw = tokenize(text);
  ScenarioConfig cfg;
  cfg.config_hash = fnv1a_hash(text);

  cfg.model.alpha = parse_number(raw, "model", "alpha");
  cfg.model.beta = parse_number(raw, "model", "beta");
  cfg.model.lambda0 = parse_number(raw, "model", "lambda0");
  cfg.model.rho = parse_number(raw, "model", "rho");
  cfg.model.r = parse_number(raw, "model", "r");
  cfg.model.eta = parse_number(raw, "model", "eta");
  cfg.model.horizon = parse_number(raw, "model", "horizon");
  cfg.model.unsafe_moments = parse_bool(raw, "model", "unsafe_moments", false);
  cfg.model.claim_dist =
      parse_distribution(raw, "claim_dist", cfg.model.unsafe_moments);
  cfg.model.ext_dist =
      parse_distribution(raw, "ext_dist", cfg.model.unsafe_moments);
  cfg.model.excitation = parse_excitation(raw);
  cfg.model.validate();

  const std::string contract_kind = raw.get("contract", "kind");
  // Retentions at or above the claim support act as null reinsurance, so the
  // support max is an exact finite stand-in for the +inf control bound.
  const double u_cap = cfg.model.claim_dist.effective_support_max();
  if (contract_kind == "proportional") {
    if (raw.has("contract", "beta_m"))
      throw ConfigError("contract.beta_m is only valid for limited_xl");
    cfg.contract = RetentionContract::proportional();
  } else if (contract_kind == "excess_of_loss") {
    if (raw.has("contract", "beta_m"))
      throw ConfigError("contract.beta_m is only valid for limited_xl");
    cfg.contract = RetentionContract::excess_of_loss(u_cap);
  } else if (contract_kind == "limited_xl") {
    cfg.contract = RetentionContract::limited_xl(
        parse_number(raw, "contract", "beta_m"), u_cap);
  } else {
    throw ConfigError("invalid contract.kind: '" + contract_kind + "'");
  }

  const std::string premium_kind = raw.get("premium", "kind");
  auto reject = [&](const char* key) {
    if (raw.has("premium", key))
      throw ConfigError(std::string("premium.") + key +
                        " is not a parameter of premium.kind=" + premium_kind);
  };
  if (premium_kind == "evp") {
    reject("eta_i");
    reject("eta_r");
    cfg.principle = PremiumPrinciple::evp(parse_number(raw, "premium", "theta_i"),
                                          parse_number(raw, "premium", "theta_r"));
  } else if (premium_kind == "vpp") {
    reject("theta_i");
    reject("theta_r");
    cfg.principle = PremiumPrinciple::vpp(parse_number(raw, "premium", "eta_i"),
                                          parse_number(raw, "premium", "eta_r"));
  } else if (premium_kind == "mvp") {
    cfg.principle = PremiumPrinciple::mvp(parse_number(raw, "premium", "theta_i"),
                                          parse_number(raw, "premium", "eta_i"),
                                          parse_number(raw, "premium", "theta_r"),
                                          parse_number(raw, "premium", "eta_r"));
  } else {
    throw ConfigError("invalid premium.kind: '" + premium_kind + "'");
  }

  cfg.t_points = parse_unsigned(raw, "grids", "t_points", 0, true);
  cfg.lambda_min = parse_number(raw, "grids", "lambda_min");
  cfg.lambda_max = parse_number(raw, "grids", "lambda_max");
  cfg.lambda_points = parse_unsigned(raw, "grids", "lambda_points", 0, true);
  cfg.n_paths = parse_unsigned(raw, "grids", "n_paths", 0, true);
  cfg.master_seed = parse_unsigned(raw, "grids", "master_seed", 0, true);
  if (cfg.t_points < 2) throw ConfigError("grids.t_points must be >= 2");
  if (cfg.lambda_points < 2)
    throw ConfigError("grids.lambda_points must be >= 2");
  if (!(cfg.lambda_min > 0.0) || !(cfg.lambda_max > cfg.lambda_min))
    throw ConfigError("grids.lambda_min/lambda_max must satisfy 0 < min < max");
  if (cfg.n_paths == 0) throw ConfigError("grids.n_paths must be > 0");

  cfg.sim_paths = parse_unsigned(raw, "run", "sim_paths", cfg.sim_paths);
  cfg.timechange_min_claims = parse_unsigned(
      raw, "run", "timechange_min_claims", cfg.timechange_min_claims);
  if (raw.has("run", "policy_u")) {
    cfg.policy_u = parse_number(raw, "run", "policy_u");
    cfg.policy_u_set = true;
    cfg.contract.check_control(cfg.policy_u);
  }
  cfg.policy_tol = parse_number_or(raw, "run", "policy_tol", cfg.policy_tol);
  cfg.max_iterations = static_cast<int>(
      parse_unsigned(raw, "run", "max_iterations", cfg.max_iterations));
  cfg.compare_tol = parse_number_or(raw, "run", "compare_tol", cfg.compare_tol);
  cfg.probe_points =
      parse_unsigned(raw, "run", "probe_points", cfg.probe_points);
  cfg.check_u_points =
      parse_unsigned(raw, "run", "check_u_points", cfg.check_u_points);
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace contagion
