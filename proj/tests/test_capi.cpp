#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

#include <btmdis.h>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           (tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Config {
  btm_config* cfg = btm_config_create();
  ~Config() { btm_config_free(cfg); }
};

}  // namespace

TEST_CASE("version string is present") {
  REQUIRE(btm_version() != nullptr);
  CHECK(std::strlen(btm_version()) > 0);
}

TEST_CASE("config set/get round-trips and rejects unknown keys") {
  Config c;
  REQUIRE(c.cfg != nullptr);
  CHECK(btm_config_set(c.cfg, "p", "48") == BTM_OK);
  char buf[32];
  CHECK(btm_config_get(c.cfg, "p", buf, sizeof buf) == BTM_OK);
  CHECK(std::string(buf) == "48");

  CHECK(btm_config_set(c.cfg, "definitely_not_a_key", "1") == BTM_ERR_CONFIG);
  CHECK(std::strlen(btm_last_error()) > 0);
}

TEST_CASE("registry introspection names every key with a default and help") {
  size_t n = btm_config_key_count();
  CHECK(n > 20);
  bool saw_gamma = false;
  for (size_t i = 0; i < n; ++i) {
    REQUIRE(btm_config_key_name(i) != nullptr);
    REQUIRE(btm_config_key_default(i) != nullptr);
    REQUIRE(btm_config_key_help(i) != nullptr);
    if (std::string(btm_config_key_name(i)) == "gamma") saw_gamma = true;
  }
  CHECK(saw_gamma);
  CHECK(btm_config_key_name(n) == nullptr);
}

TEST_CASE("a truncated get buffer fails cleanly") {
  Config c;
  char tiny[2];
  CHECK(btm_config_get(c.cfg, "noise_sigma", tiny, sizeof tiny) != BTM_OK);
}

TEST_CASE("generation writes train and test directories") {
  Config c;
  btm_config_set(c.cfg, "p", "16");
  btm_config_set(c.cfg, "n", "12");
  btm_config_set(c.cfg, "m", "6");
  TempDir tmp("btm_capi_gen");
  fs::path out = tmp.path / "data";
  REQUIRE(btm_generate(c.cfg, out.c_str()) == BTM_OK);
  CHECK(fs::exists(out / "train" / "windows.csv"));
  CHECK(fs::exists(out / "train" / "labels.csv"));
  CHECK(fs::exists(out / "test" / "windows.csv"));
  CHECK(fs::exists(out / "train" / "truth" / "load_0.csv"));
}

TEST_CASE("a full small pipeline runs through the shared library") {
  Config c;
  btm_config_set(c.cfg, "p", "32");
  btm_config_set(c.cfg, "n", "24");
  btm_config_set(c.cfg, "m", "6");
  btm_config_set(c.cfg, "det_max_outer_iters", "15");
  btm_config_set(c.cfg, "bayes_burn_in", "10");
  btm_config_set(c.cfg, "bayes_n_collect", "4");
  btm_config_set(c.cfg, "bayes_thin", "1");
  btm_config_set(c.cfg, "mc_l", "5");
  btm_config_set(c.cfg, "mc_inner_sweeps", "20");
  TempDir tmp("btm_capi_pipe");
  fs::path data = tmp.path / "data";
  REQUIRE(btm_generate(c.cfg, data.c_str()) == BTM_OK);

  fs::path dmodel = tmp.path / "det_model";
  REQUIRE(btm_train_det(c.cfg, (data / "train").c_str(), dmodel.c_str()) == BTM_OK);
  fs::path dest = tmp.path / "det_est";
  REQUIRE(btm_disagg_det(c.cfg, dmodel.c_str(), (data / "test").c_str(), dest.c_str()) ==
          BTM_OK);
  fs::path dmetrics = tmp.path / "det_metrics.csv";
  REQUIRE(btm_eval(c.cfg, dest.c_str(), (data / "test").c_str(), dmetrics.c_str()) == BTM_OK);
  CHECK(fs::exists(dmetrics));

  fs::path bmodel = tmp.path / "bayes_model";
  REQUIRE(btm_train_bayes(c.cfg, (data / "train").c_str(), bmodel.c_str()) == BTM_OK);
  fs::path best = tmp.path / "bayes_est";
  REQUIRE(btm_disagg_bayes(c.cfg, bmodel.c_str(), (data / "test").c_str(), best.c_str()) ==
          BTM_OK);
  CHECK(fs::exists(best / "uncertainty.csv"));

  fs::path plots = tmp.path / "plots";
  REQUIRE(btm_report(c.cfg, (data / "test").c_str(), best.c_str(), plots.c_str(), 1) ==
          BTM_OK);
  CHECK(fs::exists(plots / "window_0_load_1.svg"));
}

TEST_CASE("missing inputs surface as I/O or data errors, not crashes") {
  Config c;
  TempDir tmp("btm_capi_err");
  fs::path nowhere = tmp.path / "does_not_exist";
  btm_status st = btm_train_det(c.cfg, nowhere.c_str(), (tmp.path / "m").c_str());
  CHECK(st != BTM_OK);
  CHECK(std::strlen(btm_last_error()) > 0);

  st = btm_disagg_bayes(c.cfg, nowhere.c_str(), nowhere.c_str(),
                        (tmp.path / "o").c_str());
  CHECK(st != BTM_OK);
}

TEST_CASE("null arguments are rejected") {
  Config c;
  CHECK(btm_config_set(nullptr, "p", "1") != BTM_OK);
  CHECK(btm_config_set(c.cfg, nullptr, "1") != BTM_OK);
  CHECK(btm_generate(nullptr, "x") != BTM_OK);
  CHECK(btm_generate(c.cfg, nullptr) != BTM_OK);
}
