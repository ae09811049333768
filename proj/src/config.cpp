#include "addyn/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "addyn/errors.hpp"
#include "addyn/tabulated.hpp"

namespace addyn {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model",
       {"family", "sigma_b", "sigma_alpha", "sigma", "p", "K", "u_K", "epsilon", "lower",
        "upper", "lambda_table", "mu_table", "alpha_table"}},
      {"run", {"seed", "replicates", "workers", "out"}},
      {"simulate-ibm",
       {"t_end", "snapshots", "initial_trait", "initial_count", "log_events", "cluster_gap"}},
      {"simulate-pes", {"t_end", "initial_trait", "variant", "eta", "x_star"}},
      {"simulate-tss", {"t_end", "x0", "epsilon", "samples"}},
      {"canonical", {"t_end", "x0", "tol", "samples"}},
      {"analyze", {"grid"}},
      {"pip", {"lo", "hi", "resolution"}},
  };
  return keys;
}

std::string trim_quotes(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get_optional_double(key);
  return v ? *v : fallback;
}

std::optional<double> RunConfig::get_optional_double(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    return std::nullopt;
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + it->second + "' is not a number");
  }
}

long RunConfig::get_int(const std::string& key, long fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    return fallback;
  }
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + it->second + "' is not an integer");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    return fallback;
  }
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError("key '" + key + "': '" + it->second + "' is not a boolean");
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : values) {
    const std::string line = k + "=" + v + "\n";
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  RunConfig cfg;
  cfg.base_dir = base_dir;
  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    const auto sec = known.find(section);
    if (sec == known.end()) {
      if (body.empty()) {
        throw ConfigError("key '" + section + "' must appear inside a section");
      }
      throw ConfigError("unknown config section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!sec->second.count(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
      cfg.values[section + "." + key] = trim_quotes(node.get_value<std::string>());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

ModelSpec build_model(const RunConfig& cfg) {
  const std::string family = cfg.get_string("model.family", "gaussian_example");
  const double sigma = cfg.get_double("model.sigma", 0.01);
  const double p = cfg.get_double("model.p", 0.1);
  const long K = cfg.get_int("model.K", 1000);
  const double u_K = cfg.get_double("model.u_K", 1.0);
  const double epsilon = cfg.get_double("model.epsilon", 1.0);
  if (K < 1 || !(u_K > 0.0 && u_K <= 1.0) || !(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ConfigError("need K >= 1, u_K in (0, 1] and epsilon in (0, 1]");
  }
  try {
    if (family == "gaussian_example") {
      for (const char* k : {"model.lambda_table", "model.mu_table", "model.alpha_table",
                            "model.lower", "model.upper"}) {
        if (cfg.has(k)) {
          throw ConfigError(std::string("key '") + k + "' only applies to family = custom");
        }
      }
      GaussianExampleParams gp;
      gp.sigma_b = cfg.get_double("model.sigma_b", gp.sigma_b);
      gp.sigma_alpha = cfg.get_double("model.sigma_alpha", gp.sigma_alpha);
      gp.sigma = sigma;
      gp.p = p;
      gp.K = static_cast<int>(K);
      gp.u_K = u_K;
      gp.epsilon = epsilon;
      return make_gaussian_example(gp);
    }
    if (family == "custom") {
      auto resolve = [&](const char* key) {
        const std::string rel = cfg.get_string(key, "");
        if (rel.empty()) {
          throw ConfigError(std::string("family = custom needs '") + key + "'");
        }
        std::filesystem::path path(rel);
        return (path.is_absolute() ? path : std::filesystem::path(cfg.base_dir) / path).string();
      };
      CustomModelTables tables{load_curve_csv(resolve("model.lambda_table")),
                               load_curve_csv(resolve("model.mu_table")),
                               load_surface_csv(resolve("model.alpha_table"))};
      const TraitSpace space(cfg.get_double("model.lower", tables.birth.lower()),
                             cfg.get_double("model.upper", tables.birth.upper()));
      return make_tabulated_model(tables, space, p, sigma, static_cast<int>(K), u_K, epsilon);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  }
  throw ConfigError("unknown model family '" + family + "'");
}

}  // namespace addyn
