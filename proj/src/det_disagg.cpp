#include "btmdis/det_disagg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>

namespace btm::det {

namespace {

constexpr double kSmoothEps = 1e-8;

double smooth_fidelity(const Vector& residual) {
  return std::sqrt(residual.squaredNorm() + kSmoothEps * kSmoothEps);
}

}  // namespace

Matrix RepresentativeSet::stacked() const {
  int k_total = 0;
  for (const auto& b : blocks) k_total += static_cast<int>(b.rows());
  Matrix out(k_total, count());
  int row = 0;
  for (const auto& b : blocks) {
    out.middleRows(row, static_cast<int>(b.rows())) = b;
    row += static_cast<int>(b.rows());
  }
  return out;
}

DetTestConfig DetTestConfig::from_toolkit(const ToolkitConfig& cfg) {
  DetTestConfig d;
  d.mu = cfg.get_double("mu");
  d.q = cfg.get_int("q");
  d.support_threshold = cfg.get_double("support_threshold");
  d.max_iters = cfg.get_int("det_test_max_iters");
  d.tol = cfg.get_double("det_test_tol");
  return d;
}

void DetTestConfig::validate() const {
  if (mu < 0.0) throw_error(ErrorCode::InvalidConfig, "mu must be >= 0");
  if (q < 1) throw_error(ErrorCode::InvalidConfig, "q must be >= 1");
}

RepresentativeSet select_representatives(const CoefficientMatrix& A_hat,
                                         const DetTestConfig& cfg) {
  cfg.validate();
  const int n = A_hat.num_windows();
  const int c_count = A_hat.num_classes();
  if (n == 0 || A_hat.stacked().cwiseAbs().maxCoeff() == 0.0) {
    throw_error(ErrorCode::EmptyCoefficients, "no nonzero coefficient columns");
  }

  // binarized per-class support pattern of each column
  std::vector<std::string> pattern(n);
  for (int j = 0; j < n; ++j) {
    std::string pat(c_count, '0');
    for (int c = 0; c < c_count; ++c) {
      if (A_hat.blocks[c].col(j).norm() > cfg.support_threshold) pat[c] = '1';
    }
    pattern[j] = std::move(pat);
  }

  std::map<std::string, std::vector<int>> groups;
  for (int j = 0; j < n; ++j) groups[pattern[j]].push_back(j);

  // rank by frequency; ties by lexicographically smallest pattern via map order
  std::vector<const std::pair<const std::string, std::vector<int>>*> ranked;
  for (const auto& g : groups) ranked.push_back(&g);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto* a, const auto* b) {
                     return a->second.size() > b->second.size();
                   });

  RepresentativeSet reps;
  reps.blocks.resize(c_count);
  for (int c = 0; c < c_count; ++c) {
    reps.blocks[c] = Matrix(A_hat.atoms(c), 0);
  }

  if (cfg.q >= n) {
    // saturation: all columns in index order
    for (int c = 0; c < c_count; ++c) reps.blocks[c] = A_hat.blocks[c];
    reps.source_indices.resize(n);
    for (int j = 0; j < n; ++j) reps.source_indices[j] = j;
    return reps;
  }

  const Matrix full = A_hat.stacked();
  std::vector<int> chosen;
  // walk patterns repeatedly, taking each pattern's medoid, then 2nd-closest
  // column, until q columns are selected
  std::map<std::string, std::vector<int>> remaining;
  for (const auto* g : ranked) {
    // order each group by summed distance to the group (medoid first), ties
    // by lowest column index
    const auto& members = g->second;
    std::vector<std::pair<double, int>> scored;
    for (int j : members) {
      double dist = 0.0;
      for (int k : members) dist += (full.col(j) - full.col(k)).norm();
      scored.emplace_back(dist, j);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<int> ordered;
    for (const auto& s : scored) ordered.push_back(s.second);
    remaining[g->first] = std::move(ordered);
  }
  std::size_t depth = 0;
  while (static_cast<int>(chosen.size()) < cfg.q) {
    bool took_any = false;
    for (const auto* g : ranked) {
      if (static_cast<int>(chosen.size()) >= cfg.q) break;
      const auto& ordered = remaining[g->first];
      if (depth < ordered.size()) {
        chosen.push_back(ordered[depth]);
        took_any = true;
      }
    }
    if (!took_any) break;
    ++depth;
  }

  for (int j : chosen) {
    for (int c = 0; c < c_count; ++c) {
      reps.blocks[c].conservativeResize(Eigen::NoChange, reps.blocks[c].cols() + 1);
      reps.blocks[c].col(reps.blocks[c].cols() - 1) = A_hat.blocks[c].col(j);
    }
    reps.source_indices.push_back(j);
  }
  return reps;
}

double weight_objective(const Vector& x_test, const Matrix& basis, const Vector& w,
                        double mu) {
  return smooth_fidelity(x_test - basis * w) + mu * w.lpNorm<1>();
}

Vector solve_weights(const Vector& x_test, const DictionaryBank& D_hat,
                     const RepresentativeSet& reps, const DetTestConfig& cfg) {
  const Matrix basis = D_hat.stacked() * reps.stacked();  // P x q
  if (basis.rows() != x_test.size()) {
    throw_error(ErrorCode::DimensionMismatch, "solve_weights: window length mismatch");
  }
  const int q = static_cast<int>(basis.cols());
  const auto shrink = [&](Vector v, double thr) {
    for (int i = 0; i < q; ++i) {
      double x = v[i];
      v[i] = (x > thr) ? x - thr : ((x < -thr) ? x + thr : 0.0);
    }
    return v;
  };

  // monotone FISTA: the accepted iterate sequence is non-increasing in
  // objective, the extrapolated point only drives the prox step
  Vector w = Vector::Zero(q);
  Vector w_prev = w;
  Vector y = w;
  double obj = weight_objective(x_test, basis, w, cfg.mu);
  double t_momentum = 1.0;
  double step = 1.0;
  {
    double bnorm = basis.norm();  // Frobenius bounds the spectral norm
    if (bnorm > 0.0) step = 1.0 / bnorm;
  }

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Vector residual_y = x_test - basis * y;
    const double fy = smooth_fidelity(residual_y);
    const Vector grad = -(basis.transpose() * residual_y) / fy;
    double t = step * 2.0;  // allow the step to grow back
    Vector z;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector cand = shrink(y - t * grad, t * cfg.mu);
      const Vector diff = cand - y;
      const double f_cand = smooth_fidelity(x_test - basis * cand);
      if (f_cand <= fy + grad.dot(diff) + diff.squaredNorm() / (2.0 * t) + 1e-15) {
        z = std::move(cand);
        step = t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const double z_obj = weight_objective(x_test, basis, z, cfg.mu);
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    Vector w_next = (z_obj <= obj) ? z : w;
    const double next_obj = std::min(z_obj, obj);
    y = w_next + (t_momentum / next_momentum) * (z - w_next) +
        ((t_momentum - 1.0) / next_momentum) * (w_next - w_prev);
    const double decrease = obj - next_obj;
    w_prev = w;
    w = std::move(w_next);
    obj = next_obj;
    t_momentum = next_momentum;
    if (decrease < cfg.tol * std::max(1.0, std::abs(obj)) && iter > 50) break;
  }
  return w;
}

DisaggregationEstimate reconstruct_loads(const DictionaryBank& D_hat,
                                         const RepresentativeSet& reps, const Vector& w) {
  DisaggregationEstimate est;
  est.method_tag = MethodTag::Deterministic;
  for (int c = 0; c < D_hat.num_classes(); ++c) {
    const double sign = D_hat.class_specs.at(c).sign;
    est.per_load.push_back(sign * (D_hat.blocks[c] * (reps.blocks[c] * w)));
  }
  return est;
}

}  // namespace btm::det
