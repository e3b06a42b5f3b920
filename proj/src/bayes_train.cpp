#include "btmdis/bayes_train.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "btmdis/csv.hpp"

namespace btm::bayes {

namespace {

constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

double logit(double p) {
  p = clamp_prob(p);
  return std::log(p) - std::log1p(-p);
}

double sigmoid(double x) {
  // log-space stable
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double sample_gamma(Rng& rng, double shape, double rate) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  double v = g(rng);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw_error(ErrorCode::NumericalUnderflow, "gamma draw underflowed");
  }
  return v;
}

double sample_beta(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  double x = ga(rng);
  double y = gb(rng);
  return clamp_prob(x / (x + y));
}

}  // namespace

BayesHyper BayesHyper::from_toolkit(const ToolkitConfig& cfg) {
  BayesHyper h;
  h.lambda_d = cfg.get_double("bayes_lambda_d");
  const std::string& init = cfg.get("bayes_init");
  if (init == "data") {
    h.init = BayesInit::Data;
  } else if (init == "random") {
    h.init = BayesInit::Random;
  } else {
    throw_error(ErrorCode::Config, "bayes_init must be data or random");
  }
  h.a_eps = cfg.get_double("bayes_a_eps");
  h.b_eps = cfg.get_double("bayes_b_eps");
  h.a_s = cfg.get_double("bayes_a_s");
  h.b_s = cfg.get_double("bayes_b_s");
  h.a_pi = cfg.get_double("bayes_a_pi");
  h.b_pi = cfg.get_double("bayes_b_pi");
  h.a_y = cfg.get_double("bayes_a_y");
  h.b_y = cfg.get_double("bayes_b_y");
  h.k_init = cfg.get_int("bayes_k_init");
  h.burn_in = cfg.get_int("bayes_burn_in");
  h.n_collect = cfg.get_int("bayes_n_collect");
  h.thin = cfg.get_int("bayes_thin");
  h.prune_threshold = cfg.get_double("bayes_prune_threshold");
  h.seed = cfg.get_u64("seed");
  return h;
}

void BayesHyper::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw_error(ErrorCode::InvalidConfig, std::string(name) + " must be > 0");
    }
  };
  positive(lambda_d, "lambda_d");
  positive(a_eps, "a_eps");
  positive(b_eps, "b_eps");
  positive(a_s, "a_s");
  positive(b_s, "b_s");
  positive(a_pi, "a_pi");
  positive(b_pi, "b_pi");
  positive(a_y, "a_y");
  positive(b_y, "b_y");
  if (k_init < 1) throw_error(ErrorCode::InvalidConfig, "k_init must be >= 1");
  if (burn_in < 1 || n_collect < 1) {
    throw_error(ErrorCode::InvalidConfig, "burn_in and n_collect must be >= 1");
  }
  if (thin < 1) throw_error(ErrorCode::InvalidConfig, "thin must be >= 1");
  if (prune_threshold < 0.0 || prune_threshold >= 1.0) {
    throw_error(ErrorCode::InvalidConfig, "prune_threshold must lie in [0,1)");
  }
}

GibbsState init_state(const ValidatedDataset& dataset, const BayesHyper& hyper) {
  hyper.validate();
  const int p = dataset.windows.window_length();
  const int n = dataset.windows.num_windows();
  const int c_count = static_cast<int>(dataset.specs.size());

  GibbsState st;
  st.global_rng.seed(derive_seed(hyper.seed, 11));
  st.column_rng.reserve(n);
  for (int j = 0; j < n; ++j) {
    st.column_rng.emplace_back(hash_column(hyper.seed, dataset.windows.values.col(j)));
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double atom_sd = 1.0 / std::sqrt(hyper.lambda_d);
  st.gamma_eps = hyper.a_eps / hyper.b_eps;
  for (int c = 0; c < c_count; ++c) {
    std::vector<int> picks;
    if (hyper.init == BayesInit::Data) {
      picks = select_init_windows(dataset.windows.values, dataset.labels, c, hyper.k_init);
    }
    Matrix atoms(p, hyper.k_init);
    for (int k = 0; k < hyper.k_init; ++k) {
      if (!picks.empty()) {
        // start the chain at a likely-pure window labeled Present for this
        // class; the stationary distribution is unchanged, the basin is not
        atoms.col(k) = dataset.windows.values.col(picks[static_cast<std::size_t>(k)]);
      } else {
        for (int t = 0; t < p; ++t) atoms(t, k) = atom_sd * gauss(st.global_rng);
      }
    }
    st.atoms.push_back(std::move(atoms));
    st.gamma_s.push_back(hyper.a_s / hyper.b_s);
    Vector pi(hyper.k_init);
    for (int k = 0; k < hyper.k_init; ++k) {
      pi[k] = sample_beta(st.global_rng, hyper.a_pi, hyper.b_pi);
    }
    st.pi_z.push_back(std::move(pi));
    st.pi_y.push_back(sample_beta(st.global_rng, hyper.a_y, hyper.b_y));
    st.z.push_back(Matrix::Zero(hyper.k_init, n));
    st.s.push_back(Matrix::Zero(hyper.k_init, n));
    st.y.emplace_back(n, 0);
  }

  // Warm start. The y flips mix very slowly under the conditional sampler (a
  // class that is off only re-enters through a lucky prior draw of its
  // coefficients), so the initial attribution effectively decides which
  // posterior mode the chain explores. Greedy matching pursuit over the atom
  // pool: every labeled class first claims its best-matching atom, then
  // further classes switch on while doing so still removes at least 5% of the
  // remaining energy; finish with a joint least-squares refit over the
  // attached atoms so the first atom resample sees honest coefficients.
  constexpr double kAttachGain = 0.95;
  const double slab_sd0 = 1.0 / std::sqrt(st.gamma_s[0]);
  for (int j = 0; j < n; ++j) {
    Rng& rng = st.column_rng[j];
    for (int c = 0; c < c_count; ++c) {
      for (int k = 0; k < hyper.k_init; ++k) st.s[c](k, j) = slab_sd0 * gauss(rng);
      st.y[c][j] = (dataset.labels.at(c, j) == Label::Present) ? 1 : 0;
    }
    if (hyper.init != BayesInit::Data) continue;

    Vector r = dataset.windows.values.col(j);
    std::vector<std::pair<int, int>> attached;
    auto best_atom = [&](int c, int* k_out) {
      int best = -1;
      double best_gain = 0.0;
      for (int k = 0; k < hyper.k_init; ++k) {
        const double d2 = st.atoms[c].col(k).squaredNorm();
        if (d2 <= 0.0) continue;
        const double pr = st.atoms[c].col(k).dot(r);
        if (pr * pr / d2 > best_gain) {
          best_gain = pr * pr / d2;
          best = k;
        }
      }
      *k_out = best;
      return best_gain;
    };
    auto attach = [&](int c, int k) {
      const double coef = st.atoms[c].col(k).dot(r) / st.atoms[c].col(k).squaredNorm();
      st.z[c](k, j) = 1.0;
      st.s[c](k, j) = coef;
      r -= st.atoms[c].col(k) * coef;
      attached.emplace_back(c, k);
    };
    for (int c = 0; c < c_count; ++c) {
      if (!st.y[c][j]) continue;
      int k;
      if (best_atom(c, &k) > 0.0 && k >= 0) attach(c, k);
    }
    for (;;) {
      const double r2 = r.squaredNorm();
      if (r2 <= 0.0) break;
      int best_c = -1, best_k = -1;
      double best_kept = kAttachGain;
      for (int c = 0; c < c_count; ++c) {
        if (st.y[c][j] || dataset.labels.at(c, j) != Label::Unknown) continue;
        int k;
        const double gain = best_atom(c, &k);
        if (k >= 0 && 1.0 - gain / r2 < best_kept) {
          best_kept = 1.0 - gain / r2;
          best_c = c;
          best_k = k;
        }
      }
      if (best_c < 0) break;
      st.y[best_c][j] = 1;
      attach(best_c, best_k);
    }
    if (!attached.empty()) {
      const auto na = static_cast<int>(attached.size());
      Matrix basis(p, na);
      for (int i = 0; i < na; ++i) {
        basis.col(i) = st.atoms[attached[i].first].col(attached[i].second);
      }
      Vector coef = (basis.transpose() * basis + 1e-9 * Matrix::Identity(na, na))
                        .ldlt()
                        .solve(basis.transpose() * dataset.windows.values.col(j));
      for (int i = 0; i < na; ++i) {
        st.s[attached[i].first](attached[i].second, j) = coef[i];
      }
    }
  }

  st.residual = dataset.windows.values;
  for (int c = 0; c < c_count; ++c) {
    Matrix w = st.z[c].cwiseProduct(st.s[c]);
    for (int j = 0; j < n; ++j) {
      if (!st.y[c][j]) w.col(j).setZero();
    }
    st.residual -= st.atoms[c] * w;
  }
  return st;
}

double conditional_z_logodds(const GibbsState& state, const ValidatedDataset& dataset,
                             int c, int k, int j) {
  if (c < 0 || c >= state.num_classes() || k < 0 || k >= state.atoms_in(c) || j < 0 ||
      j >= dataset.windows.num_windows()) {
    throw_error(ErrorCode::IndexOutOfRange, "conditional_z_logodds: index out of range");
  }
  const double prior = logit(state.pi_z[c][k]);
  if (!state.y[c][j]) return prior;
  const double s_val = state.s[c](k, j);
  if (s_val == 0.0) return prior;
  const auto d = state.atoms[c].col(k);
  const Vector r_plus =
      state.residual.col(j) + d * (s_val * state.z[c](k, j));
  return prior + state.gamma_eps *
                     (s_val * d.dot(r_plus) - 0.5 * s_val * s_val * d.squaredNorm());
}

double log_likelihood(const GibbsState& state) {
  const double np = static_cast<double>(state.residual.size());
  return 0.5 * np * (std::log(state.gamma_eps) - std::log(2.0 * std::numbers::pi)) -
         0.5 * state.gamma_eps * state.residual.squaredNorm();
}

void gibbs_sweep(GibbsState& state, const ValidatedDataset& dataset, const BayesHyper& hyper) {
  const int p = dataset.windows.window_length();
  const int n = dataset.windows.num_windows();
  const int c_count = state.num_classes();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // --- atoms ---
  for (int c = 0; c < c_count; ++c) {
    const int kc = state.atoms_in(c);
    for (int k = 0; k < kc; ++k) {
      Vector w(n);
      for (int j = 0; j < n; ++j) {
        w[j] = state.y[c][j] ? state.z[c](k, j) * state.s[c](k, j) : 0.0;
      }
      const double sum_w2 = w.squaredNorm();
      const double prec = hyper.lambda_d + state.gamma_eps * sum_w2;
      const Vector d_old = state.atoms[c].col(k);
      const Vector rhs = state.gamma_eps * (state.residual * w + d_old * sum_w2);
      const double sd = 1.0 / std::sqrt(prec);
      Vector d_new(p);
      for (int t = 0; t < p; ++t) d_new[t] = rhs[t] / prec + sd * gauss(state.global_rng);
      if (sum_w2 > 0.0) {
        state.residual.noalias() += (d_old - d_new) * w.transpose();
      }
      state.atoms[c].col(k) = d_new;
    }
  }

  // per-class atom norms, fixed for the rest of the sweep
  std::vector<Vector> atom_norm2(c_count);
  for (int c = 0; c < c_count; ++c) {
    atom_norm2[c] = state.atoms[c].colwise().squaredNorm();
  }

  // --- s ---
  for (int j = 0; j < n; ++j) {
    Rng& rng = state.column_rng[j];
    auto r_j = state.residual.col(j);
    for (int c = 0; c < c_count; ++c) {
      const int kc = state.atoms_in(c);
      const bool active_class = state.y[c][j] != 0;
      for (int k = 0; k < kc; ++k) {
        const double u = gauss(rng);
        const double s_old = state.s[c](k, j);
        if (active_class && state.z[c](k, j) != 0.0) {
          const auto d = state.atoms[c].col(k);
          const double dk2 = atom_norm2[c][k];
          const double prec = state.gamma_s[c] + state.gamma_eps * dk2;
          const double mean = state.gamma_eps * (d.dot(r_j) + dk2 * s_old) / prec;
          const double s_new = mean + u / std::sqrt(prec);
          r_j -= d * (s_new - s_old);
          state.s[c](k, j) = s_new;
        } else {
          state.s[c](k, j) = u / std::sqrt(state.gamma_s[c]);
        }
      }
    }
  }

  // --- z ---
  for (int j = 0; j < n; ++j) {
    Rng& rng = state.column_rng[j];
    auto r_j = state.residual.col(j);
    for (int c = 0; c < c_count; ++c) {
      const int kc = state.atoms_in(c);
      for (int k = 0; k < kc; ++k) {
        const double u = unif(rng);
        const double lo = conditional_z_logodds(state, dataset, c, k, j);
        const double z_new = (u < sigmoid(lo)) ? 1.0 : 0.0;
        const double z_old = state.z[c](k, j);
        if (z_new != z_old && state.y[c][j]) {
          r_j -= state.atoms[c].col(k) * (state.s[c](k, j) * (z_new - z_old));
        }
        state.z[c](k, j) = z_new;
      }
    }
  }

  // --- y (unclamped entries only) ---
  for (int j = 0; j < n; ++j) {
    Rng& rng = state.column_rng[j];
    auto r_j = state.residual.col(j);
    for (int c = 0; c < c_count; ++c) {
      if (dataset.labels.at(c, j) != Label::Unknown) continue;
      const double u = unif(rng);
      const Vector g = state.atoms[c] * state.z[c].col(j).cwiseProduct(state.s[c].col(j));
      const char y_old = state.y[c][j];
      const Vector r_plus = r_j + static_cast<double>(y_old) * g;
      const double lo = logit(state.pi_y[c]) +
                        state.gamma_eps * (g.dot(r_plus) - 0.5 * g.squaredNorm());
      const char y_new = (u < sigmoid(lo)) ? 1 : 0;
      r_j = r_plus - static_cast<double>(y_new) * g;
      state.y[c][j] = y_new;
    }
  }

  // --- precisions ---
  state.gamma_eps = sample_gamma(state.global_rng, hyper.a_eps + 0.5 * p * n,
                                 hyper.b_eps + 0.5 * state.residual.squaredNorm());
  for (int c = 0; c < c_count; ++c) {
    state.gamma_s[c] =
        sample_gamma(state.global_rng, hyper.a_s + 0.5 * state.atoms_in(c) * n,
                     hyper.b_s + 0.5 * state.s[c].squaredNorm());
  }

  // --- probabilities ---
  for (int c = 0; c < c_count; ++c) {
    for (int k = 0; k < state.atoms_in(c); ++k) {
      const double ones = state.z[c].row(k).sum();
      state.pi_z[c][k] = sample_beta(state.global_rng, hyper.a_pi + ones,
                                     hyper.b_pi + n - ones);
    }
    double y_ones = 0.0;
    for (int j = 0; j < n; ++j) y_ones += state.y[c][j];
    state.pi_y[c] =
        sample_beta(state.global_rng, hyper.a_y + y_ones, hyper.b_y + n - y_ones);
  }
}

void prune_atoms(GibbsState& state, std::vector<Vector>& usage, const BayesHyper& hyper) {
  const int c_count = state.num_classes();
  for (int c = 0; c < c_count; ++c) {
    const int kc = state.atoms_in(c);
    std::vector<int> keep;
    for (int k = 0; k < kc; ++k) {
      if (!(usage[c][k] < hyper.prune_threshold)) keep.push_back(k);
    }
    if (keep.empty()) {
      int best = 0;
      for (int k = 1; k < kc; ++k) {
        if (usage[c][k] > usage[c][best]) best = k;
      }
      keep.push_back(best);
    }
    if (static_cast<int>(keep.size()) == kc) continue;

    const int nk = static_cast<int>(keep.size());
    Matrix atoms(state.atoms[c].rows(), nk);
    Matrix z(nk, state.z[c].cols());
    Matrix s(nk, state.s[c].cols());
    Vector pi(nk), new_usage(nk);
    for (int i = 0; i < nk; ++i) {
      atoms.col(i) = state.atoms[c].col(keep[i]);
      z.row(i) = state.z[c].row(keep[i]);
      s.row(i) = state.s[c].row(keep[i]);
      pi[i] = state.pi_z[c][keep[i]];
      new_usage[i] = usage[c][keep[i]];
    }
    // dropped atoms leave their (small) contribution in the residual; rebuild
    state.atoms[c] = std::move(atoms);
    state.z[c] = std::move(z);
    state.s[c] = std::move(s);
    state.pi_z[c] = std::move(pi);
    usage[c] = std::move(new_usage);
  }
}

PosteriorSummary train_bayes(const ValidatedDataset& dataset, const BayesHyper& hyper) {
  GibbsState st = init_state(dataset, hyper);
  const int n = dataset.windows.num_windows();
  const int c_count = st.num_classes();

  PosteriorSummary summary;
  summary.class_specs = dataset.specs;
  summary.window_length = dataset.windows.window_length();

  std::vector<Vector> usage(c_count);
  for (int c = 0; c < c_count; ++c) usage[c] = Vector::Zero(st.atoms_in(c));
  const int usage_start = hyper.burn_in / 2;
  int usage_sweeps = 0;

  const auto t0 = std::chrono::steady_clock::now();
  int total_sweeps = 0;
  for (int sweep = 0; sweep < hyper.burn_in; ++sweep) {
    gibbs_sweep(st, dataset, hyper);
    ++total_sweeps;
    summary.loglik_trace.push_back(log_likelihood(st));
    if (sweep >= usage_start) {
      for (int c = 0; c < c_count; ++c) usage[c] += st.z[c].rowwise().sum() / n;
      ++usage_sweeps;
    }
  }
  for (int c = 0; c < c_count; ++c) usage[c] /= std::max(1, usage_sweeps);

  prune_atoms(st, usage, hyper);
  // residual must match the pruned model exactly
  st.residual = dataset.windows.values;
  for (int c = 0; c < c_count; ++c) {
    Matrix w = st.z[c].cwiseProduct(st.s[c]);
    for (int j = 0; j < n; ++j) {
      if (!st.y[c][j]) w.col(j).setZero();
    }
    st.residual -= st.atoms[c] * w;
  }

  summary.atom_usage = usage;
  for (int c = 0; c < c_count; ++c) summary.final_k.push_back(st.atoms_in(c));

  for (int t = 0; t < hyper.n_collect; ++t) {
    for (int i = 0; i < hyper.thin; ++i) {
      gibbs_sweep(st, dataset, hyper);
      ++total_sweeps;
      summary.loglik_trace.push_back(log_likelihood(st));
    }
    Snapshot snap;
    snap.atoms = st.atoms;
    snap.gamma_s = st.gamma_s;
    snap.pi_z = st.pi_z;
    snap.pi_y = st.pi_y;
    snap.gamma_eps = st.gamma_eps;
    summary.collected_samples.push_back(std::move(snap));
  }
  const auto t1 = std::chrono::steady_clock::now();
  summary.seconds_per_sweep =
      std::chrono::duration<double>(t1 - t0).count() / std::max(1, total_sweeps);
  return summary;
}

void write_bayes_model(const PosteriorSummary& posterior, const std::filesystem::path& dir,
                       const std::string& meta) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + dir.string());

  const int c_count = static_cast<int>(posterior.class_specs.size());
  int k_max = 0;
  for (int k : posterior.final_k) k_max = std::max(k_max, k);

  for (std::size_t t = 0; t < posterior.collected_samples.size(); ++t) {
    const auto& snap = posterior.collected_samples[t];
    fs::path sdir = dir / ("snapshot_" + std::to_string(t));
    fs::create_directories(sdir, ec);
    for (int c = 0; c < c_count; ++c) {
      csv::write_matrix(sdir / ("dict_" + std::to_string(c) + ".csv"), snap.atoms[c],
                        csv::index_header(static_cast<int>(snap.atoms[c].cols()), "atom"));
    }
    Matrix gamma(1, 1 + c_count);
    gamma(0, 0) = snap.gamma_eps;
    for (int c = 0; c < c_count; ++c) gamma(0, 1 + c) = snap.gamma_s[c];
    std::vector<std::string> gh = {"gamma_eps"};
    for (int c = 0; c < c_count; ++c) gh.push_back("gamma_s_" + std::to_string(c));
    csv::write_matrix(sdir / "gamma.csv", gamma, gh);

    // row per class: pi_y then pi_z entries, zero-padded to the widest class
    Matrix pi = Matrix::Zero(c_count, 1 + k_max);
    for (int c = 0; c < c_count; ++c) {
      pi(c, 0) = snap.pi_y[c];
      for (int k = 0; k < posterior.final_k[c]; ++k) pi(c, 1 + k) = snap.pi_z[c][k];
    }
    std::vector<std::string> ph = {"pi_y"};
    for (int k = 0; k < k_max; ++k) ph.push_back("pi_z_" + std::to_string(k));
    csv::write_matrix(sdir / "pi.csv", pi, ph);
  }

  int k_init_max = 0;
  for (const auto& u : posterior.atom_usage) {
    k_init_max = std::max(k_init_max, static_cast<int>(u.size()));
  }
  Matrix usage = Matrix::Zero(c_count, k_init_max);
  for (int c = 0; c < c_count; ++c) {
    for (int k = 0; k < posterior.atom_usage[c].size(); ++k) {
      usage(c, k) = posterior.atom_usage[c][k];
    }
  }
  csv::write_matrix(dir / "usage.csv", usage, csv::index_header(k_init_max, "atom"));

  std::ofstream cls(dir / "classes.csv");
  cls << "name,sign,initial_atoms\n";
  for (const auto& s : posterior.class_specs) {
    cls << s.name << ',' << s.sign << ',' << s.initial_atoms << '\n';
  }

  std::ofstream m(dir / "meta.txt");
  if (!m) throw_error(ErrorCode::Io, "cannot write meta.txt in " + dir.string());
  m << meta;
  m << "snapshots=" << posterior.collected_samples.size() << "\n";
  m << "final_k=";
  for (std::size_t c = 0; c < posterior.final_k.size(); ++c) {
    if (c) m << ' ';
    m << posterior.final_k[c];
  }
  m << "\n";
  m << "seconds_per_sweep=" << csv::format_value(posterior.seconds_per_sweep) << "\n";
  if (!posterior.loglik_trace.empty()) {
    m << "loglik_first=" << csv::format_value(posterior.loglik_trace.front()) << "\n";
    m << "loglik_last=" << csv::format_value(posterior.loglik_trace.back()) << "\n";
  }
}

PosteriorSummary read_bayes_model(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir / "classes.csv")) {
    throw_error(ErrorCode::MissingData, "no Bayesian model in " + dir.string());
  }
  PosteriorSummary posterior;
  std::ifstream cls(dir / "classes.csv");
  std::string line;
  std::getline(cls, line);
  while (std::getline(cls, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    LoadClassSpec s;
    std::string field;
    std::getline(ss, s.name, ',');
    std::getline(ss, field, ',');
    s.sign = std::stoi(field);
    std::getline(ss, field, ',');
    s.initial_atoms = std::stoi(field);
    posterior.class_specs.push_back(std::move(s));
  }
  const int c_count = static_cast<int>(posterior.class_specs.size());

  for (std::size_t t = 0;; ++t) {
    fs::path sdir = dir / ("snapshot_" + std::to_string(t));
    if (!fs::exists(sdir)) break;
    Snapshot snap;
    for (int c = 0; c < c_count; ++c) {
      snap.atoms.push_back(csv::read_matrix(sdir / ("dict_" + std::to_string(c) + ".csv")));
    }
    Matrix gamma = csv::read_matrix(sdir / "gamma.csv");
    snap.gamma_eps = gamma(0, 0);
    for (int c = 0; c < c_count; ++c) snap.gamma_s.push_back(gamma(0, 1 + c));
    Matrix pi = csv::read_matrix(sdir / "pi.csv");
    for (int c = 0; c < c_count; ++c) {
      snap.pi_y.push_back(pi(c, 0));
      const int kc = static_cast<int>(snap.atoms[c].cols());
      Vector pz(kc);
      for (int k = 0; k < kc; ++k) pz[k] = pi(c, 1 + k);
      snap.pi_z.push_back(std::move(pz));
    }
    posterior.collected_samples.push_back(std::move(snap));
  }
  if (posterior.collected_samples.empty()) {
    throw_error(ErrorCode::EmptyPosterior, "no snapshots in " + dir.string());
  }
  posterior.window_length =
      static_cast<int>(posterior.collected_samples.front().atoms.front().rows());
  for (int c = 0; c < c_count; ++c) {
    posterior.final_k.push_back(
        static_cast<int>(posterior.collected_samples.front().atoms[c].cols()));
  }
  Matrix usage = csv::read_matrix(dir / "usage.csv");
  for (int c = 0; c < c_count; ++c) {
    posterior.atom_usage.push_back(usage.row(c).transpose());
  }
  return posterior;
}

}  // namespace btm::bayes
