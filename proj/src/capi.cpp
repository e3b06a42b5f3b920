#include "btmdis.h"

#include <cstring>
#include <string>

#include "btmdis/config.hpp"
#include "btmdis/errors.hpp"
#include "btmdis/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

btm_status status_for(btm::ErrorCode code) {
  using EC = btm::ErrorCode;
  switch (code) {
    case EC::Config:
    case EC::InvalidConfig:
    case EC::InvalidCase:
      return BTM_ERR_CONFIG;
    case EC::Io:
    case EC::Format:
    case EC::MissingData:
      return BTM_ERR_IO;
    case EC::DimensionMismatch:
    case EC::NonFiniteValue:
    case EC::FullyUnknownColumn:
    case EC::IndexOutOfRange:
    case EC::ZeroTruth:
    case EC::NonPositiveUncertainty:
      return BTM_ERR_DATA;
    case EC::StepDiverged:
    case EC::EmptyCoefficients:
    case EC::EmptyPosterior:
    case EC::NumericalUnderflow:
    case EC::NegativeVariance:
    case EC::NonFinite:
      return BTM_ERR_SOLVER;
  }
  return BTM_ERR_INTERNAL;
}

template <typename Fn>
btm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BTM_OK;
  } catch (const btm::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BTM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BTM_ERR_INTERNAL;
  }
}

const btm::ToolkitConfig& unwrap(const btm_config* cfg) {
  return *reinterpret_cast<const btm::ToolkitConfig*>(cfg);
}

btm::ToolkitConfig& unwrap(btm_config* cfg) {
  return *reinterpret_cast<btm::ToolkitConfig*>(cfg);
}

}  // namespace

extern "C" {

const char* btm_version(void) { return "0.1.0"; }

const char* btm_last_error(void) { return g_last_error.c_str(); }

btm_config* btm_config_create(void) {
  try {
    return reinterpret_cast<btm_config*>(new btm::ToolkitConfig());
  } catch (...) {
    return nullptr;
  }
}

btm_status btm_config_load(btm_config* cfg, const char* path) {
  if (!cfg || !path) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { unwrap(cfg) = btm::ToolkitConfig::load(path); });
}

btm_status btm_config_set(btm_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { unwrap(cfg).set(key, value); });
}

btm_status btm_config_get(const btm_config* cfg, const char* key, char* buf, size_t buf_len) {
  if (!cfg || !key || !buf || buf_len == 0) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] {
    const std::string& v = unwrap(cfg).get(key);
    if (v.size() + 1 > buf_len) {
      btm::throw_error(btm::ErrorCode::Config, "buffer too small for key " + std::string(key));
    }
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

void btm_config_free(btm_config* cfg) {
  delete reinterpret_cast<btm::ToolkitConfig*>(cfg);
}

size_t btm_config_key_count(void) { return btm::ToolkitConfig::registry().size(); }

const char* btm_config_key_name(size_t index) {
  const auto& reg = btm::ToolkitConfig::registry();
  return index < reg.size() ? reg[index].name.c_str() : nullptr;
}

const char* btm_config_key_default(size_t index) {
  const auto& reg = btm::ToolkitConfig::registry();
  return index < reg.size() ? reg[index].default_value.c_str() : nullptr;
}

const char* btm_config_key_help(size_t index) {
  const auto& reg = btm::ToolkitConfig::registry();
  return index < reg.size() ? reg[index].help.c_str() : nullptr;
}

btm_status btm_generate(const btm_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { btm::pipeline::run_gen(unwrap(cfg), out_dir); });
}

btm_status btm_train_det(const btm_config* cfg, const char* data_dir, const char* model_dir) {
  if (!cfg || !data_dir || !model_dir) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { btm::pipeline::run_train_det(unwrap(cfg), data_dir, model_dir); });
}

btm_status btm_train_bayes(const btm_config* cfg, const char* data_dir, const char* model_dir) {
  if (!cfg || !data_dir || !model_dir) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { btm::pipeline::run_train_bayes(unwrap(cfg), data_dir, model_dir); });
}

btm_status btm_disagg_det(const btm_config* cfg, const char* model_dir, const char* data_dir,
                          const char* out_dir) {
  if (!cfg || !model_dir || !data_dir || !out_dir) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded(
      [&] { btm::pipeline::run_disagg_det(unwrap(cfg), model_dir, data_dir, out_dir); });
}

btm_status btm_disagg_bayes(const btm_config* cfg, const char* model_dir, const char* data_dir,
                            const char* out_dir) {
  if (!cfg || !model_dir || !data_dir || !out_dir) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded(
      [&] { btm::pipeline::run_disagg_bayes(unwrap(cfg), model_dir, data_dir, out_dir); });
}

btm_status btm_eval(const btm_config* cfg, const char* est_dir, const char* data_dir,
                    const char* out_csv) {
  if (!cfg || !est_dir || !data_dir || !out_csv) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { btm::pipeline::run_eval(unwrap(cfg), est_dir, data_dir, out_csv); });
}

btm_status btm_report(const btm_config* cfg, const char* data_dir, const char* est_dir,
                      const char* out_dir, int max_windows) {
  if (!cfg || !data_dir || !est_dir || !out_dir || max_windows <= 0) {
    g_last_error = "null or non-positive argument";
    return BTM_ERR_CONFIG;
  }
  return guarded(
      [&] { btm::pipeline::run_report(unwrap(cfg), data_dir, est_dir, out_dir, max_windows); });
}

btm_status btm_bench(const btm_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) {
    g_last_error = "null argument";
    return BTM_ERR_CONFIG;
  }
  return guarded([&] { btm::pipeline::run_bench(unwrap(cfg), out_dir); });
}

}  // extern "C"
