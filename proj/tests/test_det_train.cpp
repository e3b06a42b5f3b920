#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "btmdis/det_train.hpp"
#include "btmdis/rng.hpp"
#include "btmdis/synth.hpp"
#include "test_util.hpp"

using namespace btm;
using btmtest::small_gen;

namespace {

det::DetTrainConfig base_cfg() {
  det::DetTrainConfig cfg;
  cfg.lambda_sparsity = {1.0};
  cfg.lambda_incoherence = 0.1;
  cfg.atoms_per_class = 2;
  cfg.max_outer_iters = 40;
  cfg.seed = 1;
  return cfg;
}

/// Random instance with feasible dictionary atoms and positive coefficients.
struct RandomInstance {
  WindowedSeries X;
  DictionaryBank D;
  CoefficientMatrix A;
  PartialLabelMatrix labels;
};

RandomInstance random_instance(int p, int n, int c_count, int k_per, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RandomInstance inst;
  inst.X.values = Matrix::NullaryExpr(p, n, [&]() { return gauss(rng); });
  for (int c = 0; c < c_count; ++c) {
    Matrix d = Matrix::NullaryExpr(p, k_per, [&]() { return unif(rng); });
    for (int k = 0; k < k_per; ++k) d.col(k) = det::project_atom(d.col(k));
    inst.D.blocks.push_back(d);
    inst.D.class_specs.push_back({"load_" + std::to_string(c), +1, k_per});
    inst.A.blocks.push_back(Matrix::NullaryExpr(k_per, n, [&]() { return unif(rng); }));
  }
  inst.labels.entries.assign(c_count, std::vector<Label>(n, Label::Unknown));
  for (int j = 0; j < n; ++j) inst.labels.entries[j % c_count][j] = Label::Present;
  return inst;
}

}  // namespace

TEST_CASE("objective with zero data and coefficients is the incoherence term only") {
  auto inst = random_instance(5, 3, 2, 2, 3);
  inst.X.values.setZero();
  for (auto& b : inst.A.blocks) b.setZero();
  auto cfg = base_cfg();
  cfg.lambda_sparsity = {0.0};
  cfg.lambda_incoherence = 0.7;
  auto theta = det::IncoherenceWeights::for_bank(inst.D);
  Matrix d = inst.D.stacked();
  double expected = 0.7 * (d * theta.theta * d.transpose()).trace();
  CHECK(det::objective_value(inst.X, inst.D, inst.A, inst.labels, cfg) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("scalar instance objective evaluates by hand") {
  WindowedSeries x;
  x.values = Matrix::Constant(1, 1, 2.0);
  DictionaryBank d;
  d.blocks = {Matrix::Constant(1, 1, 1.0)};
  d.class_specs = {{"load_1", +1, 1}};
  CoefficientMatrix a;
  a.blocks = {Matrix::Constant(1, 1, 1.0)};
  PartialLabelMatrix labels;
  labels.entries = {{Label::Present}};
  auto cfg = base_cfg();
  cfg.lambda_sparsity = {3.0};  // known-present block carries no group penalty
  cfg.lambda_incoherence = 1.0;  // single class: no cross-class pairs
  CHECK(det::objective_value(x, d, a, labels, cfg) == doctest::Approx(1.0));
}

TEST_CASE("identical atoms in different classes cost their squared inner product twice") {
  WindowedSeries x;
  x.values = Matrix::Zero(2, 1);
  DictionaryBank d;
  Vector atom(2);
  atom << 1.0, 0.0;
  d.blocks = {atom, atom};
  d.class_specs = {{"load_1", +1, 1}, {"load_2", +1, 1}};
  CoefficientMatrix a;
  a.blocks = {Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  PartialLabelMatrix labels;
  labels.entries = {{Label::Present}, {Label::Present}};
  auto cfg = base_cfg();
  cfg.lambda_sparsity = {0.0};
  cfg.lambda_incoherence = 1.0;
  CHECK(det::objective_value(x, d, a, labels, cfg) == doctest::Approx(2.0));
}

TEST_CASE("group soft-threshold closed form") {
  Vector v(2);
  v << 3.0, 4.0;
  CHECK(det::group_prox(v, 5.0).cwiseAbs().maxCoeff() == 0.0);
  Vector r = det::group_prox(v, 2.5);
  CHECK(r[0] == doctest::Approx(1.5));
  CHECK(r[1] == doctest::Approx(2.0));
}

TEST_CASE("group soft-threshold matches a search oracle") {
  Rng rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    Vector v = Vector::NullaryExpr(3, [&]() { return gauss(rng); });
    double tau = 0.2 + 0.4 * rep / 10.0;
    // the minimizer of 0.5||w-v||^2 + tau||w|| lies on the segment [0, v], so
    // search the scale t where the objective reduces to
    // 0.5 (1-t)^2 ||v||^2 + tau t ||v||; extended precision keeps the
    // comparison-based search meaningful below sqrt(double epsilon)
    const long double s = static_cast<long double>(v.norm());
    auto g = [&](long double t) {
      return 0.5L * (1.0L - t) * (1.0L - t) * s * s + static_cast<long double>(tau) * t * s;
    };
    long double lo = 0.0L, hi = 1.0L;
    for (int it = 0; it < 200; ++it) {
      long double m1 = lo + (hi - lo) / 3.0L, m2 = hi - (hi - lo) / 3.0L;
      if (g(m1) < g(m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    Vector oracle = static_cast<double>(0.5L * (lo + hi)) * v;
    CHECK((det::group_prox(v, tau) - oracle).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("known-absent blocks are hard-zeroed by the coefficient step") {
  auto inst = random_instance(6, 4, 2, 2, 5);
  inst.labels.entries[0][1] = Label::Absent;
  auto cfg = base_cfg();
  auto a_next = det::coefficient_step(inst.X, inst.D, inst.A, inst.labels, cfg);
  CHECK(a_next.blocks[0].col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coefficient gradient matches central finite differences") {
  auto cfg = base_cfg();
  cfg.lambda_sparsity = {0.0};
  cfg.lambda_incoherence = 0.0;
  const double h = 1e-6;
  for (int rep = 0; rep < 20; ++rep) {
    auto inst = random_instance(5, 4, 2, 2, 100 + rep);
    Matrix grad = det::reconstruction_gradient_coeffs(inst.X, inst.D, inst.A);
    double max_rel = 0.0;
    int row = rep % grad.rows();
    int col = (rep * 7) % grad.cols();
    // locate the block owning this stacked row
    int c = 0, local = row;
    while (local >= inst.A.blocks[c].rows()) local -= static_cast<int>(inst.A.blocks[c++].rows());
    auto perturbed = [&](double delta) {
      auto a2 = inst.A;
      a2.blocks[c](local, col) += delta;
      return det::objective_value(inst.X, inst.D, a2, inst.labels, cfg);
    };
    double fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
    double rel = std::abs(fd - grad(row, col)) /
                 std::max(1.0, std::max(std::abs(fd), std::abs(grad(row, col))));
    max_rel = std::max(max_rel, rel);
    CHECK(max_rel < 1e-5);
  }
}

TEST_CASE("dictionary gradient matches central finite differences") {
  auto cfg = base_cfg();
  cfg.lambda_sparsity = {0.0};
  cfg.lambda_incoherence = 0.3;
  const double h = 1e-6;
  for (int rep = 0; rep < 20; ++rep) {
    auto inst = random_instance(5, 4, 2, 2, 200 + rep);
    auto theta = det::IncoherenceWeights::for_bank(inst.D);
    Matrix grad = det::smooth_gradient_dictionary(inst.X, inst.D, inst.A,
                                                  cfg.lambda_incoherence, theta);
    int row = (rep * 3) % grad.rows();
    int col = rep % grad.cols();
    int c = 0, local = col;
    while (local >= inst.D.blocks[c].cols()) local -= static_cast<int>(inst.D.blocks[c++].cols());
    auto perturbed = [&](double delta) {
      auto d2 = inst.D;
      d2.blocks[c](row, local) += delta;
      return det::objective_value(inst.X, d2, inst.A, inst.labels, cfg);
    };
    double fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
    double rel = std::abs(fd - grad(row, col)) /
                 std::max(1.0, std::max(std::abs(fd), std::abs(grad(row, col))));
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("incoherence gradient is 2 lambda D theta when reconstruction vanishes") {
  auto inst = random_instance(5, 3, 2, 2, 9);
  inst.X.values.setZero();
  for (auto& b : inst.A.blocks) b.setZero();
  auto theta = det::IncoherenceWeights::for_bank(inst.D);
  Matrix grad = det::smooth_gradient_dictionary(inst.X, inst.D, inst.A, 0.4, theta);
  Matrix expected = 2.0 * 0.4 * inst.D.stacked() * theta.theta;
  CHECK((grad - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("atom projection clips negatives before rescaling") {
  Vector v(2);
  v << -0.5, 2.0;
  Vector r = det::project_atom(v);
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(1.0));

  Vector inside(2);
  inside << 0.3, 0.4;
  CHECK((det::project_atom(inside) - inside).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("incoherence weights are one across classes and zero within") {
  auto inst = random_instance(4, 2, 2, 2, 13);
  auto theta = det::IncoherenceWeights::for_bank(inst.D);
  REQUIRE(theta.theta.rows() == 4);
  CHECK(theta.theta.block(0, 0, 2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(theta.theta.block(2, 2, 2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(theta.theta.block(0, 2, 2, 2).minCoeff() == 1.0);
}

TEST_CASE("training objective trace is monotone non-increasing") {
  auto data = generate_dataset(small_gen(32, 36, 6, 3, 0.7, 2));
  auto cfg = base_cfg();
  cfg.atoms_per_class = 3;
  cfg.max_outer_iters = 30;
  auto model = det::train(data.train.windows, data.train.labels, data.train.specs, cfg);
  REQUIRE(model.trace.size() >= 2);
  for (std::size_t i = 1; i < model.trace.size(); ++i) {
    CHECK(model.trace[i] <= model.trace[i - 1] + 1e-10);
  }
  model.dictionary.check_invariants();
}

TEST_CASE("zero outer iterations return the initialization with its objective") {
  auto data = generate_dataset(small_gen(16, 12, 4, 3, 0.7, 2));
  auto cfg = base_cfg();
  cfg.max_outer_iters = 0;
  auto model = det::train(data.train.windows, data.train.labels, data.train.specs, cfg);
  REQUIRE(model.trace.size() == 1);
  CHECK(model.trace[0] ==
        doctest::Approx(det::objective_value(data.train.windows, model.dictionary,
                                             model.coefficients, data.train.labels, cfg)));
}

TEST_CASE("pure noiseless data is reconstructed almost exactly") {
  auto gen = small_gen(48, 36, 6, 3, 1.0, 8, /*noise_sigma=*/0.0);
  auto data = generate_dataset(gen);
  auto cfg = base_cfg();
  cfg.atoms_per_class = 8;
  cfg.lambda_sparsity = {0.001};
  cfg.lambda_incoherence = 0.01;
  cfg.max_outer_iters = 400;
  auto model = det::train(data.train.windows, data.train.labels, data.train.specs, cfg);
  Matrix recon = Matrix::Zero(48, 36);
  for (int c = 0; c < 3; ++c) {
    recon += model.dictionary.blocks[c] * model.coefficients.blocks[c];
  }
  double rel = (data.train.windows.values - recon).squaredNorm() /
               data.train.windows.values.squaredNorm();
  CHECK(rel < 1e-2);
}

TEST_CASE("model round-trips through its on-disk form") {
  auto data = generate_dataset(small_gen(16, 12, 4, 3, 0.7, 2));
  auto cfg = base_cfg();
  cfg.max_outer_iters = 5;
  auto model = det::train(data.train.windows, data.train.labels, data.train.specs, cfg);
  btmtest::TempDir tmp("btm_det_model");
  det::write_det_model(model, tmp.path, "method=det\n");
  auto back = det::read_det_model(tmp.path);
  CHECK((back.dictionary.stacked() - model.dictionary.stacked()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((back.coefficients.stacked() - model.coefficients.stacked()).cwiseAbs().maxCoeff() <
        1e-12);
}
