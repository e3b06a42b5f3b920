#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "btmdis/config.hpp"
#include "btmdis/synth.hpp"

namespace btmtest {

/// Generator setup for a small synthetic instance.
inline btm::GeneratorConfig small_gen(int p, int n, int m, int c, double gamma,
                                      std::uint64_t seed,
                                      double noise_sigma = 1.0) {
  btm::ToolkitConfig cfg;
  cfg.set("p", std::to_string(p));
  cfg.set("n", std::to_string(n));
  cfg.set("m", std::to_string(m));
  cfg.set("c", std::to_string(c));
  cfg.set("gamma", std::to_string(gamma));
  cfg.set("seed", std::to_string(seed));
  cfg.set("noise_sigma", std::to_string(noise_sigma));
  return btm::GeneratorConfig::from_toolkit(cfg);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace btmtest
