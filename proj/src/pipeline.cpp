#include "btmdis/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "btmdis/csv.hpp"
#include "btmdis/metrics.hpp"
#include "btmdis/parallel.hpp"
#include "btmdis/rng.hpp"
#include "btmdis/svg_report.hpp"

namespace btm::pipeline {

namespace fs = std::filesystem;

namespace {

fs::path resolve_dataset_dir(const fs::path& dir, const char* preferred) {
  if (fs::exists(dir / preferred / "windows.csv")) return dir / preferred;
  return dir;
}

GroundTruth require_truth(const DatasetOnDisk& ds, const fs::path& dir) {
  if (!ds.truth) {
    throw_error(ErrorCode::MissingData, "no truth/ directory under " + dir.string());
  }
  return *ds.truth;
}

std::string two_line_meta(const ToolkitConfig& cfg, const char* method) {
  std::ostringstream os;
  os << "method=" << method << "\n" << cfg.dump();
  return os.str();
}

void write_wide_csv(const fs::path& path, const Matrix& values_pm,
                    const std::string& prefix) {
  // P x M internal -> M rows x P columns on disk
  csv::write_matrix(path, values_pm.transpose(),
                    csv::index_header(static_cast<int>(values_pm.rows()), prefix));
}

struct EstimateOnDisk {
  bool bayesian = false;
  std::vector<Matrix> per_class;  // P x M
  Matrix u;                       // M x C, bayesian only
};

EstimateOnDisk read_estimates(const fs::path& est_dir, int c_count) {
  EstimateOnDisk est;
  if (fs::exists(est_dir / "mean_0.csv")) {
    est.bayesian = true;
    for (int c = 0; c < c_count; ++c) {
      est.per_class.push_back(
          csv::read_matrix(est_dir / ("mean_" + std::to_string(c) + ".csv")).transpose());
    }
    Matrix unc = csv::read_matrix(est_dir / "uncertainty.csv");
    est.u = unc.leftCols(c_count);
  } else if (fs::exists(est_dir / "load_0.csv")) {
    for (int c = 0; c < c_count; ++c) {
      est.per_class.push_back(
          csv::read_matrix(est_dir / ("load_" + std::to_string(c) + ".csv")).transpose());
    }
  } else {
    throw_error(ErrorCode::MissingData, "no estimates in " + est_dir.string());
  }
  return est;
}

}  // namespace

void run_gen(const ToolkitConfig& cfg, const fs::path& out_dir) {
  auto gen = GeneratorConfig::from_toolkit(cfg);
  SyntheticData data = generate_dataset(gen);
  write_dataset(data.train, data.train_truth, out_dir / "train");
  write_dataset(data.test, data.test_truth, out_dir / "test");
}

void run_train_det(const ToolkitConfig& cfg, const fs::path& data_dir,
                   const fs::path& model_dir) {
  auto ds = read_dataset(resolve_dataset_dir(data_dir, "train"));
  auto det_cfg = det::DetTrainConfig::from_toolkit(cfg);
  auto model = det::train(ds.data.windows, ds.data.labels, ds.data.specs, det_cfg);
  det::write_det_model(model, model_dir, two_line_meta(cfg, "det"));
}

void run_train_bayes(const ToolkitConfig& cfg, const fs::path& data_dir,
                     const fs::path& model_dir) {
  auto ds = read_dataset(resolve_dataset_dir(data_dir, "train"));
  auto hyper = bayes::BayesHyper::from_toolkit(cfg);
  auto posterior = bayes::train_bayes(ds.data, hyper);
  bayes::write_bayes_model(posterior, model_dir, two_line_meta(cfg, "bayes"));
}

std::vector<Matrix> det_disagg_all(const det::DetModel& model, const Matrix& test_windows,
                                   const det::DetTestConfig& cfg) {
  const int m = static_cast<int>(test_windows.cols());
  const int c_count = model.dictionary.num_classes();
  auto reps = det::select_representatives(model.coefficients, cfg);
  std::vector<Matrix> out(c_count);
  for (int c = 0; c < c_count; ++c) {
    out[c] = Matrix::Zero(model.dictionary.window_length(), m);
  }
  parallel_for(m, [&](int j) {
    Vector w = det::solve_weights(test_windows.col(j), model.dictionary, reps, cfg);
    auto est = det::reconstruct_loads(model.dictionary, reps, w);
    for (int c = 0; c < c_count; ++c) out[c].col(j) = est.per_load[c];
  });
  return out;
}

void run_disagg_det(const ToolkitConfig& cfg, const fs::path& model_dir,
                    const fs::path& data_dir, const fs::path& out_dir) {
  auto model = det::read_det_model(model_dir);
  auto ds = read_dataset(resolve_dataset_dir(data_dir, "test"));
  auto test_cfg = det::DetTestConfig::from_toolkit(cfg);
  auto est = det_disagg_all(model, ds.data.windows.values, test_cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + out_dir.string());
  for (std::size_t c = 0; c < est.size(); ++c) {
    write_wide_csv(out_dir / ("load_" + std::to_string(c) + ".csv"), est[c], "t");
  }
  // sign feasibility is reported, not enforced
  double worst = 0.0;
  for (const auto& e : est) worst = std::min(worst, e.minCoeff());
  std::ofstream meta(out_dir / "meta.txt");
  meta << two_line_meta(cfg, "det");
  meta << "l2_smoothing_eps=1e-08\n";
  meta << "min_per_load_estimate=" << csv::format_value(worst) << "\n";
}

BayesDisaggAll bayes_disagg_all(const bayes::PosteriorSummary& posterior,
                                const bayes::BayesHyper& hyper, const bayes::McConfig& mc,
                                const Matrix& test_windows, double band_k) {
  const int m = static_cast<int>(test_windows.cols());
  const int c_count = static_cast<int>(posterior.class_specs.size());
  const int p = posterior.window_length;
  BayesDisaggAll out;
  out.mean.assign(c_count, Matrix::Zero(p, m));
  out.band_lo.assign(c_count, Matrix::Zero(p, m));
  out.band_hi.assign(c_count, Matrix::Zero(p, m));
  out.u = Matrix::Zero(m, c_count);
  out.u_all = Vector::Zero(m);
  parallel_for(m, [&](int j) {
    bayes::McConfig window_mc = mc;
    window_mc.seed = derive_seed(mc.seed, 30, static_cast<std::uint64_t>(j));
    auto est = bayes::disaggregate_window(test_windows.col(j), posterior, hyper, window_mc,
                                          band_k);
    for (int c = 0; c < c_count; ++c) {
      out.mean[c].col(j) = est.mean[c];
      out.band_lo[c].col(j) = est.band_lo[c];
      out.band_hi[c].col(j) = est.band_hi[c];
      out.u(j, c) = est.u_per_load[c];
    }
    out.u_all[j] = est.u_all;
  });
  return out;
}

void run_disagg_bayes(const ToolkitConfig& cfg, const fs::path& model_dir,
                      const fs::path& data_dir, const fs::path& out_dir) {
  auto posterior = bayes::read_bayes_model(model_dir);
  auto ds = read_dataset(resolve_dataset_dir(data_dir, "test"));
  auto hyper = bayes::BayesHyper::from_toolkit(cfg);
  auto mc = bayes::McConfig::from_toolkit(cfg);
  const double band_k = cfg.get_double("band_k");
  auto all = bayes_disagg_all(posterior, hyper, mc, ds.data.windows.values, band_k);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + out_dir.string());
  const int c_count = static_cast<int>(posterior.class_specs.size());
  for (int c = 0; c < c_count; ++c) {
    write_wide_csv(out_dir / ("mean_" + std::to_string(c) + ".csv"), all.mean[c], "t");
    write_wide_csv(out_dir / ("band_lo_" + std::to_string(c) + ".csv"), all.band_lo[c], "t");
    write_wide_csv(out_dir / ("band_hi_" + std::to_string(c) + ".csv"), all.band_hi[c], "t");
  }
  Matrix unc(all.u.rows(), c_count + 1);
  unc.leftCols(c_count) = all.u;
  unc.col(c_count) = all.u_all;
  std::vector<std::string> header;
  for (int c = 0; c < c_count; ++c) header.push_back("u_" + std::to_string(c + 1));
  header.push_back("u_all");
  csv::write_matrix(out_dir / "uncertainty.csv", unc, header);
  std::ofstream meta(out_dir / "meta.txt");
  meta << two_line_meta(cfg, "bayes");
}

void run_eval(const ToolkitConfig& cfg, const fs::path& est_dir, const fs::path& data_dir,
              const fs::path& out_csv) {
  (void)cfg;
  auto dir = resolve_dataset_dir(data_dir, "test");
  auto ds = read_dataset(dir);
  auto truth = require_truth(ds, dir);
  const int c_count = static_cast<int>(truth.per_class.size());
  auto est = read_estimates(est_dir, c_count);
  for (int c = 0; c < c_count; ++c) {
    if (est.per_class[c].rows() != truth.per_class[c].rows() ||
        est.per_class[c].cols() != truth.per_class[c].cols()) {
      throw_error(ErrorCode::DimensionMismatch,
                  "eval: estimate/truth shape mismatch for class " + std::to_string(c));
    }
  }

  std::ofstream out(out_csv);
  if (!out) throw_error(ErrorCode::Io, "cannot write " + out_csv.string());
  out << "method,load,rmse,wrmse,ter\n";
  const char* method = est.bayesian ? "bayes" : "det";
  for (int c = 0; c < c_count; ++c) {
    double r = metrics::rmse_c(est.per_class[c], truth.per_class[c]);
    out << method << ",load_" << c << ',' << csv::format_value(r) << ',';
    if (est.bayesian) {
      std::vector<double> u(est.u.rows());
      for (int j = 0; j < est.u.rows(); ++j) u[j] = est.u(j, c);
      out << csv::format_value(metrics::wrmse_c(est.per_class[c], truth.per_class[c], u));
    }
    out << ",\n";
  }
  out << method << ",overall,,," << csv::format_value(metrics::ter(est.per_class, truth.per_class))
      << "\n";
}

void run_report(const ToolkitConfig& cfg, const fs::path& data_dir, const fs::path& est_dir,
                const fs::path& out_dir, int max_windows) {
  (void)cfg;
  auto dir = resolve_dataset_dir(data_dir, "test");
  auto ds = read_dataset(dir);
  auto truth = require_truth(ds, dir);
  const int c_count = static_cast<int>(truth.per_class.size());
  auto est = read_estimates(est_dir, c_count);

  std::vector<Matrix> lo(c_count), hi(c_count);
  if (est.bayesian) {
    for (int c = 0; c < c_count; ++c) {
      lo[c] = csv::read_matrix(est_dir / ("band_lo_" + std::to_string(c) + ".csv")).transpose();
      hi[c] = csv::read_matrix(est_dir / ("band_hi_" + std::to_string(c) + ".csv")).transpose();
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + out_dir.string());
  const int m = std::min<int>(max_windows, static_cast<int>(truth.per_class[0].cols()));
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < c_count; ++c) {
      report::SeriesPlot plot;
      plot.title = "window " + std::to_string(j) + ", load " + std::to_string(c + 1);
      plot.truth = truth.per_class[c].col(j);
      plot.estimate = est.per_class[c].col(j);
      if (est.bayesian) {
        plot.band_lo = lo[c].col(j);
        plot.band_hi = hi[c].col(j);
      }
      report::write_plot(plot, out_dir / ("window_" + std::to_string(j) + "_load_" +
                                          std::to_string(c + 1) + ".svg"));
    }
  }
}

BenchResult run_bench(const ToolkitConfig& base_cfg, const fs::path& out_dir) {
  const int n_seeds = base_cfg.get_int("bench_seeds");
  const std::uint64_t base_seed = base_cfg.get_u64("seed");
  const double band_k = base_cfg.get_double("band_k");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw_error(ErrorCode::Io, "cannot create " + out_dir.string());

  BenchResult result;
  result.seeds = n_seeds;
  int c_count = 0;

  std::vector<std::vector<double>> rmse_det_acc, rmse_bayes_acc, rmse_base_acc, wrmse_acc;
  std::ostringstream meta;
  std::ostringstream cases_csv;
  double sweep_seconds_acc = 0.0;

  for (int si = 0; si < n_seeds; ++si) {
    ToolkitConfig cfg = base_cfg;
    cfg.set("seed", std::to_string(base_seed + si));
    auto gen = GeneratorConfig::from_toolkit(cfg);
    SyntheticData data = generate_dataset(gen);
    c_count = gen.shape.num_classes;
    const Matrix& test_x = data.test.windows.values;
    const int m = static_cast<int>(test_x.cols());

    std::vector<Matrix> truth(c_count);
    for (int c = 0; c < c_count; ++c) truth[c] = data.test_truth.per_class[c];

    // --- deterministic engine ---
    auto test_cfg = det::DetTestConfig::from_toolkit(cfg);
    auto det_cfg = det::DetTrainConfig::from_toolkit(cfg);
    auto best_model =
        det::train(data.train.windows, data.train.labels, data.train.specs, det_cfg);
    auto det_est = det_disagg_all(best_model, test_x, test_cfg);

    // --- Bayesian engine ---
    auto hyper = bayes::BayesHyper::from_toolkit(cfg);
    auto mc = bayes::McConfig::from_toolkit(cfg);
    auto posterior = bayes::train_bayes(data.train, hyper);
    sweep_seconds_acc += posterior.seconds_per_sweep;
    auto bayes_est = bayes_disagg_all(posterior, hyper, mc, test_x, band_k);

    // --- naive proportional baseline: split by class mean energy share ---
    std::vector<double> share(c_count, 0.0);
    double mass = 0.0;
    for (int c = 0; c < c_count; ++c) {
      share[c] = data.train_truth.per_class[c].cwiseAbs().sum();
      mass += share[c];
    }
    std::vector<Matrix> base_est(c_count);
    for (int c = 0; c < c_count; ++c) {
      share[c] /= mass;
      base_est[c] = share[c] * static_cast<double>(data.train.specs[c].sign) * test_x;
    }

    // --- metrics ---
    std::vector<double> rd(c_count), rb(c_count), rn(c_count), wb(c_count);
    for (int c = 0; c < c_count; ++c) {
      rd[c] = metrics::rmse_c(det_est[c], truth[c]);
      rb[c] = metrics::rmse_c(bayes_est.mean[c], truth[c]);
      rn[c] = metrics::rmse_c(base_est[c], truth[c]);
      std::vector<double> u(m);
      for (int j = 0; j < m; ++j) u[j] = std::max(bayes_est.u(j, c), 1e-12);
      wb[c] = metrics::wrmse_c(bayes_est.mean[c], truth[c], u);
    }
    rmse_det_acc.push_back(rd);
    rmse_bayes_acc.push_back(rb);
    rmse_base_acc.push_back(rn);
    wrmse_acc.push_back(wb);
    result.ter_det_seed.push_back(metrics::ter(det_est, truth));
    result.ter_bayes_seed.push_back(metrics::ter(bayes_est.mean, truth));
    result.ter_base_seed.push_back(metrics::ter(base_est, truth));

    // --- Cases 1-5 ---
    int base_window = -1;
    for (int j = 0; j < m; ++j) {
      bool all_present = true;
      for (int c = 0; c < c_count; ++c) {
        if (truth[c].col(j).lpNorm<1>() <= 0.0) all_present = false;
      }
      if (all_present) {
        base_window = j;
        break;
      }
    }
    if (base_window < 0) base_window = 0;

    auto reps = det::select_representatives(best_model.coefficients, test_cfg);
    std::array<double, 5> u_cases{};
    for (int case_id = 1; case_id <= 5; ++case_id) {
      CaseSpec spec{case_id, derive_seed(base_seed + si, 50)};
      CaseWindow cw = make_case(gen, data, spec, base_window);

      bayes::McConfig case_mc = mc;
      case_mc.seed = derive_seed(mc.seed, 31, static_cast<std::uint64_t>(case_id));
      auto best = bayes::disaggregate_window(cw.aggregate, posterior, hyper, case_mc, band_k);
      u_cases[case_id - 1] = best.u_all;

      Vector w = det::solve_weights(cw.aggregate, best_model.dictionary, reps, test_cfg);
      auto dest = det::reconstruct_loads(best_model.dictionary, reps, w);
      std::vector<Matrix> ct(c_count), cb(c_count), cd(c_count);
      for (int c = 0; c < c_count; ++c) {
        ct[c] = cw.truth[c];
        cb[c] = best.mean[c];
        cd[c] = dest.per_load[c];
      }
      double ter_b = metrics::ter(cb, ct);
      double ter_d = metrics::ter(cd, ct);
      cases_csv << (base_seed + si) << ',' << case_id;
      for (int c = 0; c < c_count; ++c) {
        cases_csv << ',' << csv::format_value(best.u_per_load[c]);
      }
      cases_csv << ',' << csv::format_value(best.u_all) << ','
                << csv::format_value(ter_b) << ',' << csv::format_value(ter_d) << '\n';
    }
    result.u_all_cases.push_back(u_cases);

    meta << "seed " << (base_seed + si) << ": bayes final_k=";
    for (std::size_t c = 0; c < posterior.final_k.size(); ++c) {
      if (c) meta << '/';
      meta << posterior.final_k[c];
    }
    meta << "\n";
  }

  auto average = [&](const std::vector<std::vector<double>>& acc) {
    std::vector<double> avg(c_count, 0.0);
    for (const auto& v : acc) {
      for (int c = 0; c < c_count; ++c) avg[c] += v[c];
    }
    for (int c = 0; c < c_count; ++c) avg[c] /= static_cast<double>(acc.size());
    return avg;
  };
  result.rmse_det = average(rmse_det_acc);
  result.rmse_bayes = average(rmse_bayes_acc);
  result.rmse_base = average(rmse_base_acc);
  result.wrmse_bayes = average(wrmse_acc);
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  result.ter_det = mean_of(result.ter_det_seed);
  result.ter_bayes = mean_of(result.ter_bayes_seed);
  result.ter_base = mean_of(result.ter_base_seed);
  result.bayes_seconds_per_sweep = sweep_seconds_acc / n_seeds;

  // --- outputs ---
  {
    std::ofstream out(out_dir / "metrics.csv");
    out << "metric,b_eds,d_eds,baseline\n";
    for (int c = 0; c < c_count; ++c) {
      out << "rmse_" << (c + 1) << ',' << csv::format_value(result.rmse_bayes[c]) << ','
          << csv::format_value(result.rmse_det[c]) << ','
          << csv::format_value(result.rmse_base[c]) << '\n';
    }
    for (int c = 0; c < c_count; ++c) {
      out << "wrmse_" << (c + 1) << ',' << csv::format_value(result.wrmse_bayes[c])
          << ",,\n";
    }
    out << "ter," << csv::format_value(result.ter_bayes) << ','
        << csv::format_value(result.ter_det) << ',' << csv::format_value(result.ter_base)
        << '\n';
  }
  {
    std::ofstream out(out_dir / "cases.csv");
    out << "seed,case";
    for (int c = 0; c < c_count; ++c) out << ",u_" << (c + 1);
    out << ",u_all,b_eds_ter,d_eds_ter\n";
    out << cases_csv.str();
  }
  {
    std::ofstream out(out_dir / "bench_meta.txt");
    out << meta.str();
    out << "bayes_seconds_per_sweep=" << result.bayes_seconds_per_sweep << "\n";
  }
  return result;
}

}  // namespace pipeline
