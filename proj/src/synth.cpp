#include "btmdis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "btmdis/rng.hpp"

namespace btm {

namespace {

constexpr int kVariantsPerClass = 3;

double class_level(const GeneratorConfig& cfg, int c) {
  if (c == 0) return cfg.load1_level;
  if (c == 1) return cfg.load2_level;
  return 10.0 * (c + 1);
}

std::vector<LoadClassSpec> make_specs(const GeneratorConfig& cfg) {
  std::vector<LoadClassSpec> specs;
  const int c_count = cfg.shape.num_classes;
  for (int c = 0; c < c_count; ++c) {
    LoadClassSpec s;
    if (c == c_count - 1) {
      s.name = "solar";
      s.sign = -1;
    } else {
      s.name = "load_" + std::to_string(c + 1);
      s.sign = +1;
    }
    s.initial_atoms = 1;
    specs.push_back(std::move(s));
  }
  return specs;
}

/// Draws one per-window realization of class c: variant pick + amplitude jitter.
Vector draw_instance(const GeneratorConfig& cfg, int c, Rng& rng) {
  const int c_count = cfg.shape.num_classes;
  std::uniform_int_distribution<int> pick(0, kVariantsPerClass - 1);
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  int v = pick(rng);
  double a = jitter(rng);
  if (c == c_count - 1) {
    auto tpl = cfg.solar_templates.at(v % cfg.solar_templates.size());
    return a * solar_pattern(cfg.shape.window_length, tpl);
  }
  return a * industrial_pattern(c, v, cfg.shape.window_length, class_level(cfg, c));
}

}  // namespace

Vector industrial_pattern(int load_class, int variant, int window_length, double level) {
  Vector out(window_length);
  if (load_class % 2 == 0) {
    // square-wave duty cycle; period and phase vary per variant
    int period = std::max(4, window_length / (4 + 2 * variant));
    int phase = variant * 3;
    for (int t = 0; t < window_length; ++t) {
      int pos = (t + phase) % period;
      out[t] = (pos < period / 2) ? level : 0.0;
    }
  } else {
    // multi-level step profile over six segments
    static const double kSteps[kVariantsPerClass][6] = {
        {0.1, 0.9, 0.2, 1.0, 0.15, 0.6},
        {0.7, 0.1, 1.0, 0.2, 0.9, 0.15},
        {0.15, 1.0, 0.1, 0.55, 1.0, 0.25},
    };
    for (int t = 0; t < window_length; ++t) {
      int seg = std::min(5, 6 * t / window_length);
      out[t] = level * kSteps[variant % kVariantsPerClass][seg];
    }
  }
  return out;
}

Vector solar_pattern(int window_length, const SolarTemplate& tpl) {
  Vector out(window_length);
  const double pos = tpl.pos_frac * window_length;
  const double sigma = std::max(1e-6, tpl.width_frac * window_length);
  for (int t = 0; t < window_length; ++t) {
    double z = (t - pos) / sigma;
    out[t] = tpl.peak_kw * std::exp(-0.5 * z * z);
  }
  return out;
}

GeneratorConfig GeneratorConfig::from_toolkit(const ToolkitConfig& cfg) {
  GeneratorConfig g;
  g.shape.window_length = cfg.get_int("p");
  g.shape.train_windows = cfg.get_int("n");
  g.shape.test_windows = cfg.get_int("m");
  g.shape.num_classes = cfg.get_int("c");
  g.gamma = cfg.get_double("gamma");
  g.seed = cfg.get_u64("seed");
  g.noise_sigma = cfg.get_double("noise_sigma");
  g.load1_level = cfg.get_double("load1_level");
  g.load2_level = cfg.get_double("load2_level");
  g.test_presence_prob = cfg.get_double("test_presence_prob");
  const double peak = cfg.get_double("solar_peak");
  const double pos = cfg.get_double("solar_pos");
  const double width = cfg.get_double("solar_width");
  g.solar_templates = {
      {0.8 * peak, pos - 0.05, 0.9 * width},
      {peak, pos, width},
      {1.2 * peak, pos + 0.05, 1.1 * width},
  };
  return g;
}

void GeneratorConfig::validate() const {
  shape.validate();
  if (gamma < 0.0 || gamma > 1.0) {
    throw_error(ErrorCode::InvalidConfig, "gamma must lie in [0,1]");
  }
  if (noise_sigma < 0.0) {
    throw_error(ErrorCode::InvalidConfig, "noise_sigma must be >= 0");
  }
  if (shape.test_windows < 1) {
    throw_error(ErrorCode::InvalidConfig, "need at least one test window");
  }
  if (solar_templates.empty()) {
    throw_error(ErrorCode::InvalidConfig, "need at least one solar template");
  }
}

SolarTemplate GeneratorConfig::ood_solar() const {
  double max_pos = 0.0;
  double max_width = 0.0;
  double peak = 0.0;
  for (const auto& t : solar_templates) {
    max_pos = std::max(max_pos, t.pos_frac);
    max_width = std::max(max_width, t.width_frac);
    peak = std::max(peak, t.peak_kw);
  }
  SolarTemplate ood;
  ood.peak_kw = peak;
  ood.pos_frac = max_pos + 0.30;  // >= 25% of the window away from every template
  ood.width_frac = 1.5 * max_width;
  return ood;
}

SyntheticData generate_dataset(const GeneratorConfig& config) {
  config.validate();
  const int P = config.shape.window_length;
  const int N = config.shape.train_windows;
  const int M = config.shape.test_windows;
  const int C = config.shape.num_classes;
  auto specs = make_specs(config);

  // --- training set ---
  // round-robin single labels, exact per-class purity counts
  std::vector<int> labeled_class(N);
  for (int j = 0; j < N; ++j) labeled_class[j] = j % C;

  std::vector<char> pure(N, 0);
  for (int c = 0; c < C; ++c) {
    std::vector<int> members;
    for (int j = 0; j < N; ++j) {
      if (labeled_class[j] == c) members.push_back(j);
    }
    Rng shuffle_rng(derive_seed(config.seed, 3, c));
    std::shuffle(members.begin(), members.end(), shuffle_rng);
    auto n_pure = static_cast<std::size_t>(
        std::llround(config.gamma * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < n_pure && i < members.size(); ++i) pure[members[i]] = 1;
  }

  WindowedSeries train_windows;
  train_windows.values = Matrix::Zero(P, N);
  GroundTruth train_truth;
  train_truth.per_class.assign(C, Matrix::Zero(P, N));
  PartialLabelMatrix train_labels;
  train_labels.entries.assign(C, std::vector<Label>(N, Label::Unknown));

  for (int j = 0; j < N; ++j) {
    Rng rng(derive_seed(config.seed, 1, static_cast<std::uint64_t>(j)));
    const int lc = labeled_class[j];
    const int solar = C - 1;
    std::vector<char> present(C, 0);
    present[lc] = 1;
    if (!pure[j]) {
      // solar generates whenever the sun is up, so every impure window has
      // it; industrial loads switch on and off independently
      present[solar] = 1;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      bool any_other = (lc != solar);
      for (int c = 0; c < solar; ++c) {
        if (c == lc) continue;
        if (u(rng) < 0.6) {
          present[c] = 1;
          any_other = true;
        }
      }
      if (!any_other) {
        std::uniform_int_distribution<int> pick(0, solar - 1);
        present[pick(rng)] = 1;
      }
    }
    for (int c = 0; c < C; ++c) {
      if (present[c]) train_truth.per_class[c].col(j) = draw_instance(config, c, rng);
    }
    Vector agg = Vector::Zero(P);
    for (int c = 0; c < C; ++c) {
      agg += static_cast<double>(specs[c].sign) * train_truth.per_class[c].col(j);
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < P; ++t) agg[t] += config.noise_sigma * noise(rng);
    train_windows.values.col(j) = agg;
    train_labels.entries[lc][j] = Label::Present;
  }

  // --- test set: unlabeled windows with random class subsets ---
  WindowedSeries test_windows;
  test_windows.values = Matrix::Zero(P, M);
  GroundTruth test_truth;
  test_truth.per_class.assign(C, Matrix::Zero(P, M));
  PartialLabelMatrix test_labels;
  test_labels.entries.assign(C, std::vector<Label>(M, Label::Unknown));

  for (int j = 0; j < M; ++j) {
    Rng rng(derive_seed(config.seed, 2, static_cast<std::uint64_t>(j)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<char> present(C, 0);
    present[C - 1] = 1;  // solar is always generating
    for (int c = 0; c < C - 1; ++c) {
      if (u(rng) < config.test_presence_prob) present[c] = 1;
    }
    for (int c = 0; c < C; ++c) {
      if (present[c]) test_truth.per_class[c].col(j) = draw_instance(config, c, rng);
    }
    Vector agg = Vector::Zero(P);
    for (int c = 0; c < C; ++c) {
      agg += static_cast<double>(specs[c].sign) * test_truth.per_class[c].col(j);
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < P; ++t) agg[t] += config.noise_sigma * noise(rng);
    test_windows.values.col(j) = agg;
  }

  SyntheticData out{
      validate_dataset(std::move(train_windows), std::move(train_labels), specs),
      std::move(train_truth),
      validate_dataset(std::move(test_windows), std::move(test_labels), specs,
                       /*require_labels=*/false),
      std::move(test_truth),
  };
  return out;
}

CaseWindow make_case(const GeneratorConfig& config, const SyntheticData& data,
                     const CaseSpec& spec, int base_test_window) {
  if (spec.case_id < 1 || spec.case_id > 5) {
    throw_error(ErrorCode::InvalidCase, "case_id must be 1..5, got " +
                                            std::to_string(spec.case_id));
  }
  const int P = config.shape.window_length;
  const int C = config.shape.num_classes;
  if (base_test_window < 0 || base_test_window >= data.test.windows.num_windows()) {
    throw_error(ErrorCode::InvalidCase, "base test window out of range");
  }

  CaseWindow cw;
  cw.truth.assign(C, Vector::Zero(P));
  for (int c = 0; c < C; ++c) {
    cw.truth[c] = data.test_truth.per_class[c].col(base_test_window);
  }
  cw.aggregate = data.test.windows.values.col(base_test_window);

  Rng rng(derive_seed(spec.base_seed, 40, static_cast<std::uint64_t>(spec.case_id)));
  std::normal_distribution<double> noise(0.0, 1.0);

  switch (spec.case_id) {
    case 1:
      break;
    case 2:
      for (int t = 0; t < P; ++t) cw.aggregate[t] += 4.0 * noise(rng);
      break;
    case 3:
      for (int t = 0; t < P; ++t) cw.aggregate[t] += 6.0 * noise(rng);
      break;
    case 4: {
      Vector solar = solar_pattern(P, config.ood_solar());
      for (int c = 0; c < C; ++c) cw.truth[c].setZero();
      cw.truth[C - 1] = solar;
      cw.aggregate = -solar;
      for (int t = 0; t < P; ++t) cw.aggregate[t] += config.noise_sigma * noise(rng);
      break;
    }
    case 5: {
      Vector solar = solar_pattern(P, config.ood_solar());
      cw.truth[C - 1] = solar;
      Vector agg = Vector::Zero(P);
      for (int c = 0; c < C - 1; ++c) agg += cw.truth[c];
      agg -= solar;
      for (int t = 0; t < P; ++t) agg[t] += config.noise_sigma * noise(rng);
      cw.aggregate = agg;
      break;
    }
  }
  return cw;
}

}  // namespace btm
