#include "btmdis/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "btmdis/errors.hpp"

namespace btm {

const std::vector<ConfigKey>& ToolkitConfig::registry() {
  static const std::vector<ConfigKey> keys = {
      // synthetic generator
      {"p", "96", "window length in samples"},
      {"n", "360", "number of training windows"},
      {"m", "300", "number of test windows"},
      {"c", "3", "number of load classes (last class is solar, sign -1)"},
      {"gamma", "0.7", "label purity: fraction of labeled windows that are pure"},
      {"seed", "1", "base RNG seed"},
      {"noise_sigma", "1.0", "measurement noise standard deviation (kW)"},
      {"load1_level", "30", "industrial class 1 amplitude scale (kW)"},
      {"load2_level", "40", "industrial class 2 amplitude scale (kW)"},
      {"solar_peak", "25", "solar bell peak (kW)"},
      {"solar_pos", "0.5", "solar bell peak position, fraction of window"},
      {"solar_width", "0.12", "solar bell width, fraction of window"},
      {"test_presence_prob", "0.65", "industrial presence probability in test windows (solar is always on)"},
      // deterministic training
      {"det_k", "4", "atoms per class for the deterministic dictionary"},
      {"det_lambda", "10", "group-sparsity weight, shared across classes"},
      {"det_lambda_d", "0.1", "incoherence penalty weight"},
      {"det_max_outer_iters", "150", "outer block-coordinate iterations"},
      {"det_inner_iters", "3", "proximal passes per coefficient update"},
      {"det_init", "data", "dictionary init: data (labeled windows) | random"},
      {"det_step_rule", "backtracking", "step size rule: fixed | backtracking"},
      {"det_fixed_step", "1e-3", "step size when det_step_rule=fixed"},
      {"det_tol", "1e-6", "relative objective-decrease stopping tolerance"},
      // deterministic disaggregation
      {"mu", "10", "l1 weight in the test-stage weight problem"},
      {"q", "360", "representative coefficient columns (>= n keeps every column)"},
      {"support_threshold", "1e-3", "block-norm cutoff for support binarization"},
      {"det_test_max_iters", "2000", "weight-solver iteration cap"},
      {"det_test_tol", "1e-9", "weight-solver objective tolerance"},
      // Bayesian training
      {"bayes_lambda_d", "1e-4", "atom prior precision"},
      {"bayes_init", "data", "chain init: data (labeled windows) | random"},
      {"bayes_a_eps", "1e-6", "Gamma shape for the noise precision"},
      {"bayes_b_eps", "1e-6", "Gamma rate for the noise precision"},
      {"bayes_a_s", "1e-6", "Gamma shape for slab precisions"},
      {"bayes_b_s", "1e-6", "Gamma rate for slab precisions"},
      {"bayes_a_pi", "1", "Beta shape a for atom-usage probabilities"},
      {"bayes_b_pi", "4", "Beta shape b for atom-usage probabilities"},
      {"bayes_a_y", "1", "Beta shape a for load-existence probabilities"},
      {"bayes_b_y", "2", "Beta shape b for load-existence probabilities"},
      {"bayes_k_init", "4", "initial atoms per class before pruning"},
      {"bayes_burn_in", "60", "burn-in sweeps"},
      {"bayes_n_collect", "25", "posterior snapshots to collect"},
      {"bayes_thin", "2", "sweeps between snapshots"},
      {"bayes_prune_threshold", "0.05", "minimum atom usage rate"},
      // Monte-Carlo test stage
      {"mc_l", "50", "Monte-Carlo sample count"},
      {"mc_inner_sweeps", "100", "Gibbs sweeps per Monte-Carlo sample"},
      {"band_k", "3", "confidence band width multiplier (3 = 99.7%)"},
      // bench harness
      {"bench_seeds", "5", "number of seeds averaged by bench"},
  };
  return keys;
}

ToolkitConfig::ToolkitConfig() {
  for (const auto& k : registry()) values_[k.name] = k.default_value;
}

ToolkitConfig ToolkitConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ToolkitConfig cfg;
  cfg.parse_text(ss.str(), path.string());
  return cfg;
}

void ToolkitConfig::parse_text(const std::string& text, const std::string& source_name) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << source_name << ":" << lineno << ": expected key=value, got '" << line << "'";
      throw_error(ErrorCode::Config, os.str());
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      s = (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    strip(key);
    strip(value);
    if (!values_.count(key)) {
      std::ostringstream os;
      os << source_name << ":" << lineno << ": unknown config key '" << key << "'";
      throw_error(ErrorCode::Config, os.str());
    }
    values_[key] = value;
  }
}

void ToolkitConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw_error(ErrorCode::Config, "unknown config key '" + key + "'");
  }
  it->second = value;
}

const std::string& ToolkitConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw_error(ErrorCode::Config, "unknown config key '" + key + "'");
  }
  return it->second;
}

double ToolkitConfig::get_double(const std::string& key) const {
  const std::string& s = get(key);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw_error(ErrorCode::Config, "config key '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

int ToolkitConfig::get_int(const std::string& key) const {
  double v = get_double(key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw_error(ErrorCode::Config, "config key '" + key + "' is not an integer");
  }
  return i;
}

std::uint64_t ToolkitConfig::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw_error(ErrorCode::Config, "config key '" + key + "' is not an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::string ToolkitConfig::dump() const {
  std::ostringstream os;
  for (const auto& k : registry()) os << k.name << "=" << values_.at(k.name) << "\n";
  return os.str();
}

}  // namespace btm
