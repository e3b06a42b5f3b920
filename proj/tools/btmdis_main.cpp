#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "btmdis.h"

namespace {

// exit codes: 2 config, 3 I/O, 4 solver, 5 missing or inconsistent model/data
int exit_code(btm_status st, bool model_stage) {
  switch (st) {
    case BTM_OK:
      return 0;
    case BTM_ERR_CONFIG:
      return 2;
    case BTM_ERR_IO:
      return model_stage ? 5 : 3;
    case BTM_ERR_DATA:
      return 5;
    case BTM_ERR_SOLVER:
      return 4;
    default:
      return 1;
  }
}

int fail(btm_status st, bool model_stage) {
  std::cerr << "error: " << btm_last_error() << "\n";
  return exit_code(st, model_stage);
}

struct ConfigHandle {
  btm_config* cfg = nullptr;

  ConfigHandle() : cfg(btm_config_create()) {}
  ~ConfigHandle() { btm_config_free(cfg); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct CommonOpts {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value configuration file");
  const size_t n = btm_config_key_count();
  for (size_t i = 0; i < n; ++i) {
    std::string name = btm_config_key_name(i);
    std::string help = std::string(btm_config_key_help(i)) +
                       " [default: " + btm_config_key_default(i) + "]";
    cmd->add_option_function<std::string>(
        "--" + name, [&opts, name](const std::string& v) { opts.overrides[name] = v; }, help);
  }
}

int load_config(const CommonOpts& opts, btm_config* cfg) {
  if (!opts.config_path.empty()) {
    btm_status st = btm_config_load(cfg, opts.config_path.c_str());
    if (st != BTM_OK) return exit_code(st == BTM_ERR_IO ? BTM_ERR_IO : BTM_ERR_CONFIG, false);
  }
  for (const auto& [key, value] : opts.overrides) {
    if (btm_config_set(cfg, key.c_str(), value.c_str()) != BTM_OK) return 2;
  }
  return 0;
}

std::string cfg_value(const btm_config* cfg, const char* key) {
  char buf[256];
  if (btm_config_get(cfg, key, buf, sizeof(buf)) != BTM_OK) return "?";
  return buf;
}

void print_meta_lines(const std::string& path, const std::vector<std::string>& prefixes) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& p : prefixes) {
      if (line.rfind(p, 0) == 0 && line.size() < 400) std::cout << line << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"substation energy disaggregation toolkit"};
  app.require_subcommand(1);

  CommonOpts gen_o, td_o, tb_o, dd_o, db_o, ev_o, rp_o, bn_o;
  std::string gen_out, td_data, td_out, tb_data, tb_out;
  std::string dd_model, dd_data, dd_out, db_model, db_data, db_out;
  std::string ev_est, ev_data, ev_out = "metrics.csv";
  std::string rp_data, rp_est, rp_out;
  int rp_max = 8;
  std::string bn_out;

  auto* gen = app.add_subcommand("gen", "generate a synthetic substation dataset");
  gen->add_option("--out", gen_out, "output directory")->required();
  add_config_options(gen, gen_o);

  auto* train_det = app.add_subcommand("train-det", "train the deterministic engine");
  train_det->add_option("--data", td_data, "dataset directory")->required();
  train_det->add_option("--out", td_out, "model output directory")->required();
  add_config_options(train_det, td_o);

  auto* train_bayes = app.add_subcommand("train-bayes", "train the Bayesian engine");
  train_bayes->add_option("--data", tb_data, "dataset directory")->required();
  train_bayes->add_option("--out", tb_out, "model output directory")->required();
  add_config_options(train_bayes, tb_o);

  auto* disagg_det = app.add_subcommand("disagg-det", "deterministic disaggregation");
  disagg_det->add_option("--model", dd_model, "trained model directory")->required();
  disagg_det->add_option("--data", dd_data, "dataset directory")->required();
  disagg_det->add_option("--out", dd_out, "estimate output directory")->required();
  add_config_options(disagg_det, dd_o);

  auto* disagg_bayes = app.add_subcommand("disagg-bayes", "Bayesian disaggregation");
  disagg_bayes->add_option("--model", db_model, "trained model directory")->required();
  disagg_bayes->add_option("--data", db_data, "dataset directory")->required();
  disagg_bayes->add_option("--out", db_out, "estimate output directory")->required();
  add_config_options(disagg_bayes, db_o);

  auto* eval = app.add_subcommand("eval", "score estimates against ground truth");
  eval->add_option("--est", ev_est, "estimate directory")->required();
  eval->add_option("--data", ev_data, "dataset directory with truth/")->required();
  eval->add_option("--out", ev_out, "metrics CSV path");
  add_config_options(eval, ev_o);

  auto* report = app.add_subcommand("report", "render truth/estimate SVG plots");
  report->add_option("--data", rp_data, "dataset directory with truth/")->required();
  report->add_option("--est", rp_est, "estimate directory")->required();
  report->add_option("--out", rp_out, "plot output directory")->required();
  report->add_option("--max-windows", rp_max, "cap on plotted windows");
  add_config_options(report, rp_o);

  auto* bench = app.add_subcommand("bench", "full benchmark protocol, both engines");
  bench->add_option("--out", bn_out, "benchmark output directory")->required();
  add_config_options(bench, bn_o);

  CLI11_PARSE(app, argc, argv);

  ConfigHandle handle;
  if (!handle.cfg) {
    std::cerr << "error: out of memory\n";
    return 1;
  }

  auto timed = [](auto&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    btm_status st = fn();
    auto t1 = std::chrono::steady_clock::now();
    double sec = std::chrono::duration<double>(t1 - t0).count();
    return std::pair<btm_status, double>{st, sec};
  };

  if (gen->parsed()) {
    if (int rc = load_config(gen_o, handle.cfg)) return rc;
    btm_status st = btm_generate(handle.cfg, gen_out.c_str());
    if (st != BTM_OK) return fail(st, false);
    std::cout << "generated " << gen_out << ": P=" << cfg_value(handle.cfg, "p")
              << " N=" << cfg_value(handle.cfg, "n") << " M=" << cfg_value(handle.cfg, "m")
              << " C=" << cfg_value(handle.cfg, "c")
              << " purity=" << cfg_value(handle.cfg, "gamma") << "\n";
    return 0;
  }
  if (train_det->parsed()) {
    if (int rc = load_config(td_o, handle.cfg)) return rc;
    auto [st, sec] = timed(
        [&] { return btm_train_det(handle.cfg, td_data.c_str(), td_out.c_str()); });
    if (st != BTM_OK) return fail(st, st == BTM_ERR_SOLVER ? false : true);
    print_meta_lines(td_out + "/meta.txt", {"final_objective"});
    std::printf("wall_clock_seconds=%.3f\n", sec);
    return 0;
  }
  if (train_bayes->parsed()) {
    if (int rc = load_config(tb_o, handle.cfg)) return rc;
    auto [st, sec] = timed(
        [&] { return btm_train_bayes(handle.cfg, tb_data.c_str(), tb_out.c_str()); });
    if (st != BTM_OK) return fail(st, st == BTM_ERR_SOLVER ? false : true);
    print_meta_lines(tb_out + "/meta.txt",
                     {"loglik_first", "loglik_last", "seconds_per_sweep"});
    std::printf("wall_clock_seconds=%.3f\n", sec);
    return 0;
  }
  if (disagg_det->parsed()) {
    if (int rc = load_config(dd_o, handle.cfg)) return rc;
    btm_status st =
        btm_disagg_det(handle.cfg, dd_model.c_str(), dd_data.c_str(), dd_out.c_str());
    if (st != BTM_OK) return fail(st, true);
    std::cout << "estimates written to " << dd_out << "\n";
    return 0;
  }
  if (disagg_bayes->parsed()) {
    if (int rc = load_config(db_o, handle.cfg)) return rc;
    btm_status st =
        btm_disagg_bayes(handle.cfg, db_model.c_str(), db_data.c_str(), db_out.c_str());
    if (st != BTM_OK) return fail(st, true);
    std::cout << "estimates and uncertainty written to " << db_out << "\n";
    return 0;
  }
  if (eval->parsed()) {
    if (int rc = load_config(ev_o, handle.cfg)) return rc;
    btm_status st = btm_eval(handle.cfg, ev_est.c_str(), ev_data.c_str(), ev_out.c_str());
    if (st != BTM_OK) return fail(st, true);
    std::ifstream in(ev_out);
    std::cout << in.rdbuf();
    return 0;
  }
  if (report->parsed()) {
    if (int rc = load_config(rp_o, handle.cfg)) return rc;
    btm_status st =
        btm_report(handle.cfg, rp_data.c_str(), rp_est.c_str(), rp_out.c_str(), rp_max);
    if (st != BTM_OK) return fail(st, true);
    std::cout << "plots written to " << rp_out << "\n";
    return 0;
  }
  if (bench->parsed()) {
    if (int rc = load_config(bn_o, handle.cfg)) return rc;
    auto [st, sec] = timed([&] { return btm_bench(handle.cfg, bn_out.c_str()); });
    if (st != BTM_OK) return fail(st, true);
    std::ifstream in(bn_out + "/metrics.csv");
    std::cout << in.rdbuf();
    std::printf("wall_clock_seconds=%.3f\n", sec);
    return 0;
  }
  return 1;
}
