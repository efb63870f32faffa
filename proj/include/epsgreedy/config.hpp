#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "epsgreedy/core.hpp"
#include "epsgreedy/environments.hpp"
#include "epsgreedy/policies.hpp"

namespace epsgreedy {

enum class EnvKind { kCodebook, kLinear, kMnist, kGap };

EnvKind parse_env_kind(std::string_view name);
std::string_view env_kind_name(EnvKind kind) noexcept;

struct EnvSpec {
  EnvKind kind = EnvKind::kCodebook;
  std::string images_path;
  std::string labels_path;
  std::size_t pool_factor = 4;
  double gap = 1.0;
  /// Digit at each codebook position; the default puts digit d at angle
  /// 2 pi d / 10 + 0.1.
  CodebookEnv::Layout codebook_layout = CodebookEnv::kDefaultLayout;
};

/// Ten distinct digits, e.g. "9074381652".
CodebookEnv::Layout parse_codebook_layout(std::string_view text);

/// Builds the environment for an experiment. The linear environment's weights
/// come from a stream of the base seed, so every replicate of an experiment
/// faces the same arms.
std::unique_ptr<Environment> make_environment(const EnvSpec& spec, const ExperimentConfig& config);

struct LoadedConfig {
  ExperimentConfig config;
  EnvSpec env;
  PolicyKind policy = PolicyKind::kDeepEpsGreedy;
};

/// Flat `key = value` lines; `#` starts a comment. Missing keys keep their
/// defaults. Throws ConfigurationError with the line number for malformed
/// lines, unknown keys, and bad values.
LoadedConfig parse_config(std::string_view text);
LoadedConfig load_config(const std::filesystem::path& path);

}  // namespace epsgreedy
