#include "btmdis/det_train.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "btmdis/csv.hpp"
#include "btmdis/rng.hpp"

namespace btm::det {

namespace {

constexpr double kDescentSlack = 1e-10;
constexpr int kMaxBacktracks = 60;

Matrix assemble_reconstruction(const DictionaryBank& D, const CoefficientMatrix& A) {
  Matrix recon = Matrix::Zero(D.window_length(), A.num_windows());
  for (int c = 0; c < D.num_classes(); ++c) recon += D.blocks[c] * A.blocks[c];
  return recon;
}

double largest_eigenvalue(const Matrix& sym) {
  if (sym.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

CoefficientMatrix apply_coefficient_update(const DictionaryBank& D,
                                           const CoefficientMatrix& A, const Matrix& grad,
                                           const PartialLabelMatrix& labels,
                                           const DetTrainConfig& cfg, double step) {
  CoefficientMatrix out = A;
  const int n = A.num_windows();
  int row = 0;
  for (int c = 0; c < A.num_classes(); ++c) {
    const int kc = A.atoms(c);
    const double tau = step * cfg.lambda_for(c);
    const double sign = D.class_specs.at(c).sign;
    for (int j = 0; j < n; ++j) {
      Vector v = A.blocks[c].col(j) - step * grad.block(row, j, kc, 1);
      switch (labels.at(c, j)) {
        case Label::Absent:
          v.setZero();
          break;
        case Label::Unknown:
          v = group_prox(v, tau);
          break;
        case Label::Present:
          break;
      }
      // sign constraint: clip entries with sign*a < 0
      for (int k = 0; k < kc; ++k) {
        if (sign * v[k] < 0.0) v[k] = 0.0;
      }
      out.blocks[c].col(j) = v;
    }
    row += kc;
  }
  return out;
}

DictionaryBank apply_dictionary_update(const DictionaryBank& D, const Matrix& grad,
                                       double step) {
  DictionaryBank out = D;
  int col = 0;
  for (int c = 0; c < D.num_classes(); ++c) {
    const int kc = D.atoms(c);
    for (int k = 0; k < kc; ++k) {
      out.blocks[c].col(k) =
          project_atom(D.blocks[c].col(k) - step * grad.col(col + k));
    }
    col += kc;
  }
  return out;
}

}  // namespace

DetTrainConfig DetTrainConfig::from_toolkit(const ToolkitConfig& cfg) {
  DetTrainConfig d;
  d.lambda_sparsity = {cfg.get_double("det_lambda")};
  d.lambda_incoherence = cfg.get_double("det_lambda_d");
  d.max_outer_iters = cfg.get_int("det_max_outer_iters");
  d.inner_iters = cfg.get_int("det_inner_iters");
  const std::string& rule = cfg.get("det_step_rule");
  if (rule == "fixed") {
    d.step_rule = StepRule::Fixed;
  } else if (rule == "backtracking") {
    d.step_rule = StepRule::Backtracking;
  } else {
    throw_error(ErrorCode::Config, "det_step_rule must be fixed or backtracking");
  }
  const std::string& init = cfg.get("det_init");
  if (init == "data") {
    d.init_rule = InitRule::Data;
  } else if (init == "random") {
    d.init_rule = InitRule::Random;
  } else {
    throw_error(ErrorCode::Config, "det_init must be data or random");
  }
  d.fixed_step = cfg.get_double("det_fixed_step");
  d.tol_objective = cfg.get_double("det_tol");
  d.atoms_per_class = cfg.get_int("det_k");
  d.seed = cfg.get_u64("seed");
  return d;
}

double DetTrainConfig::lambda_for(int c) const {
  if (lambda_sparsity.empty()) return 0.0;
  if (static_cast<std::size_t>(c) < lambda_sparsity.size()) return lambda_sparsity[c];
  return lambda_sparsity.front();
}

void DetTrainConfig::validate() const {
  for (double l : lambda_sparsity) {
    if (l < 0.0) throw_error(ErrorCode::InvalidConfig, "lambda_sparsity must be >= 0");
  }
  if (lambda_incoherence < 0.0) {
    throw_error(ErrorCode::InvalidConfig, "lambda_incoherence must be >= 0");
  }
  if (tol_objective <= 0.0) {
    throw_error(ErrorCode::InvalidConfig, "tol_objective must be > 0");
  }
  if (atoms_per_class < 1) {
    throw_error(ErrorCode::InvalidConfig, "atoms_per_class must be >= 1");
  }
}

IncoherenceWeights IncoherenceWeights::for_bank(const DictionaryBank& bank) {
  const int k_total = bank.total_atoms();
  IncoherenceWeights w;
  w.theta = Matrix::Ones(k_total, k_total);
  int offset = 0;
  for (int c = 0; c < bank.num_classes(); ++c) {
    const int kc = bank.atoms(c);
    w.theta.block(offset, offset, kc, kc).setZero();
    offset += kc;
  }
  return w;
}

Vector group_prox(const Vector& v, double tau) {
  const double nrm = v.norm();
  if (nrm <= tau) return Vector::Zero(v.size());
  return (1.0 - tau / nrm) * v;
}

Vector project_atom(Vector atom) {
  atom = atom.cwiseMax(0.0);
  const double nrm = atom.norm();
  if (nrm > 1.0) atom /= nrm;
  return atom;
}

double objective_value(const WindowedSeries& X, const DictionaryBank& D,
                       const CoefficientMatrix& A, const PartialLabelMatrix& labels,
                       const DetTrainConfig& cfg) {
  if (D.window_length() != X.window_length() || A.num_windows() != X.num_windows() ||
      D.num_classes() != A.num_classes()) {
    throw_error(ErrorCode::DimensionMismatch, "objective_value: inconsistent shapes");
  }
  for (int c = 0; c < D.num_classes(); ++c) {
    if (D.atoms(c) != A.atoms(c)) {
      throw_error(ErrorCode::DimensionMismatch,
                  "objective_value: atom count mismatch in class " + std::to_string(c));
    }
  }
  double obj = (X.values - assemble_reconstruction(D, A)).squaredNorm();
  for (int c = 0; c < A.num_classes(); ++c) {
    const double lam = cfg.lambda_for(c);
    if (lam == 0.0) continue;
    for (int j = 0; j < A.num_windows(); ++j) {
      if (labels.at(c, j) != Label::Present) obj += lam * A.blocks[c].col(j).norm();
    }
  }
  if (cfg.lambda_incoherence > 0.0 && D.num_classes() > 1) {
    const Matrix d = D.stacked();
    const Matrix theta = IncoherenceWeights::for_bank(D).theta;
    obj += cfg.lambda_incoherence * (d * theta * d.transpose()).trace();
  }
  return obj;
}

Matrix reconstruction_gradient_coeffs(const WindowedSeries& X, const DictionaryBank& D,
                                      const CoefficientMatrix& A) {
  const Matrix residual = assemble_reconstruction(D, A) - X.values;
  Matrix grad(A.total_atoms(), A.num_windows());
  int row = 0;
  for (int c = 0; c < D.num_classes(); ++c) {
    grad.middleRows(row, D.atoms(c)) = 2.0 * D.blocks[c].transpose() * residual;
    row += D.atoms(c);
  }
  return grad;
}

Matrix smooth_gradient_dictionary(const WindowedSeries& X, const DictionaryBank& D,
                                  const CoefficientMatrix& A, double lambda_incoherence,
                                  const IncoherenceWeights& theta) {
  const Matrix residual = assemble_reconstruction(D, A) - X.values;
  Matrix grad = 2.0 * residual * A.stacked().transpose();
  if (lambda_incoherence > 0.0) grad += 2.0 * lambda_incoherence * D.stacked() * theta.theta;
  return grad;
}

CoefficientMatrix coefficient_step(const WindowedSeries& X, const DictionaryBank& D,
                                   const CoefficientMatrix& A, const PartialLabelMatrix& labels,
                                   const DetTrainConfig& cfg) {
  const Matrix grad = reconstruction_gradient_coeffs(X, D, A);

  if (cfg.step_rule == StepRule::Fixed) {
    auto next = apply_coefficient_update(D, A, grad, labels, cfg, cfg.fixed_step);
    double before = objective_value(X, D, A, labels, cfg);
    double after = objective_value(X, D, next, labels, cfg);
    if (after > before + kDescentSlack) {
      throw_error(ErrorCode::StepDiverged,
                  "coefficient_step: objective increased under fixed step");
    }
    return next;
  }

  const Matrix gram = D.stacked().transpose() * D.stacked();
  const double lips = 2.0 * largest_eigenvalue(gram);
  double step = (lips > 0.0) ? 1.0 / lips : 1.0;
  const double before = objective_value(X, D, A, labels, cfg);
  for (int bt = 0; bt < kMaxBacktracks; ++bt) {
    auto next = apply_coefficient_update(D, A, grad, labels, cfg, step);
    if (objective_value(X, D, next, labels, cfg) <= before + 1e-12) return next;
    step *= 0.5;
  }
  return A;  // no acceptable step; keep the iterate (trace stays monotone)
}

DictionaryBank dictionary_step(const WindowedSeries& X, const DictionaryBank& D,
                               const CoefficientMatrix& A, const DetTrainConfig& cfg,
                               const IncoherenceWeights& theta) {
  const Matrix grad = smooth_gradient_dictionary(X, D, A, cfg.lambda_incoherence, theta);
  // labels only enter the coefficient penalty, which is constant here; an
  // all-present matrix makes objective_value usable for line search
  PartialLabelMatrix all_present;
  all_present.entries.assign(D.num_classes(),
                             std::vector<Label>(A.num_windows(), Label::Present));

  if (cfg.step_rule == StepRule::Fixed) {
    auto next = apply_dictionary_update(D, grad, cfg.fixed_step);
    double before = objective_value(X, D, A, all_present, cfg);
    double after = objective_value(X, next, A, all_present, cfg);
    if (after > before + kDescentSlack) {
      throw_error(ErrorCode::StepDiverged,
                  "dictionary_step: objective increased under fixed step");
    }
    return next;
  }

  const double lips = 2.0 * (largest_eigenvalue(A.stacked() * A.stacked().transpose()) +
                             cfg.lambda_incoherence * largest_eigenvalue(theta.theta));
  double step = (lips > 0.0) ? 1.0 / lips : 1.0;
  const double before = objective_value(X, D, A, all_present, cfg);
  for (int bt = 0; bt < kMaxBacktracks; ++bt) {
    auto next = apply_dictionary_update(D, grad, step);
    if (objective_value(X, next, A, all_present, cfg) <= before + 1e-12) return next;
    step *= 0.5;
  }
  return D;
}

DetModel train(const WindowedSeries& X, const PartialLabelMatrix& labels,
               const std::vector<LoadClassSpec>& specs, const DetTrainConfig& cfg) {
  cfg.validate();
  const int p = X.window_length();

  DetModel model;
  model.dictionary.class_specs = specs;
  Rng rng(derive_seed(cfg.seed, 10));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    std::vector<int> picks;
    if (cfg.init_rule == InitRule::Data) {
      picks = select_init_windows(X.values, labels, static_cast<int>(c), cfg.atoms_per_class);
    }
    Matrix block(p, cfg.atoms_per_class);
    for (int k = 0; k < cfg.atoms_per_class; ++k) {
      Vector atom(p);
      if (!picks.empty()) {
        // seed each atom with a likely-pure window labeled Present for this
        // class; the class sign flips generator windows to consumption shape
        atom = static_cast<double>(specs[c].sign) *
               X.values.col(picks[static_cast<std::size_t>(k)]);
      } else {
        for (int t = 0; t < p; ++t) atom[t] = std::abs(gauss(rng));
      }
      block.col(k) = project_atom(std::move(atom));
    }
    model.dictionary.blocks.push_back(std::move(block));
    model.coefficients.blocks.push_back(Matrix::Zero(cfg.atoms_per_class, X.num_windows()));
  }

  const auto theta = IncoherenceWeights::for_bank(model.dictionary);
  double obj = objective_value(X, model.dictionary, model.coefficients, labels, cfg);
  model.trace.push_back(obj);

  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    for (int inner = 0; inner < std::max(1, cfg.inner_iters); ++inner) {
      model.coefficients =
          coefficient_step(X, model.dictionary, model.coefficients, labels, cfg);
    }
    model.dictionary = dictionary_step(X, model.dictionary, model.coefficients, cfg, theta);
    double next = objective_value(X, model.dictionary, model.coefficients, labels, cfg);
    model.trace.push_back(next);
    double denom = std::max(std::abs(obj), 1e-12);
    if ((obj - next) / denom < cfg.tol_objective) {
      obj = next;
      break;
    }
    obj = next;
  }
  model.dictionary.check_invariants();
  model.coefficients.check_sign_feasibility(specs);
  return model;
}

void write_det_model(const DetModel& model, const std::filesystem::path& dir,
                     const std::string& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + dir.string());
  for (int c = 0; c < model.dictionary.num_classes(); ++c) {
    csv::write_matrix(dir / ("dict_" + std::to_string(c) + ".csv"),
                      model.dictionary.blocks[c],
                      csv::index_header(model.dictionary.atoms(c), "atom"));
    csv::write_matrix(dir / ("coef_" + std::to_string(c) + ".csv"),
                      model.coefficients.blocks[c],
                      csv::index_header(model.coefficients.num_windows(), "w"));
  }
  std::ofstream cls(dir / "classes.csv");
  cls << "name,sign,initial_atoms\n";
  for (const auto& s : model.dictionary.class_specs) {
    cls << s.name << ',' << s.sign << ',' << s.initial_atoms << '\n';
  }
  std::ofstream m(dir / "meta.txt");
  if (!m) throw_error(ErrorCode::Io, "cannot write meta.txt in " + dir.string());
  m << meta;
  m << "final_objective=" << csv::format_value(model.trace.back()) << "\n";
  m << "objective_trace=";
  for (std::size_t i = 0; i < model.trace.size(); ++i) {
    if (i) m << ' ';
    m << csv::format_value(model.trace[i]);
  }
  m << "\n";
}

DetModel read_det_model(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "classes.csv")) {
    throw_error(ErrorCode::MissingData, "no deterministic model in " + dir.string());
  }
  DetModel model;
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
    model.dictionary.class_specs.push_back(std::move(s));
  }
  const int c_count = static_cast<int>(model.dictionary.class_specs.size());
  for (int c = 0; c < c_count; ++c) {
    model.dictionary.blocks.push_back(
        csv::read_matrix(dir / ("dict_" + std::to_string(c) + ".csv")));
    model.coefficients.blocks.push_back(
        csv::read_matrix(dir / ("coef_" + std::to_string(c) + ".csv")));
  }
  model.trace.push_back(0.0);
  return model;
}

}  // namespace btm::det
