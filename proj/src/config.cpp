#include "epsgreedy/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "epsgreedy/errors.hpp"
#include "epsgreedy/mnist.hpp"

namespace epsgreedy {

EnvKind parse_env_kind(std::string_view name) {
  if (name == "codebook") return EnvKind::kCodebook;
  if (name == "linear") return EnvKind::kLinear;
  if (name == "mnist") return EnvKind::kMnist;
  if (name == "gap") return EnvKind::kGap;
  throw InvalidArgument("unknown environment '" + std::string(name) + "'");
}

std::string_view env_kind_name(EnvKind kind) noexcept {
  switch (kind) {
    case EnvKind::kCodebook: return "codebook";
    case EnvKind::kLinear: return "linear";
    case EnvKind::kMnist: return "mnist";
    case EnvKind::kGap: return "gap";
  }
  return "unknown";
}

CodebookEnv::Layout parse_codebook_layout(std::string_view text) {
  CodebookEnv::Layout layout{};
  std::array<bool, CodebookEnv::kDigits> seen{};
  if (text.size() != layout.size()) throw InvalidArgument("codebook layout needs 10 digits");
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const char ch = text[k];
    if (ch < '0' || ch > '9' || seen[static_cast<std::size_t>(ch - '0')]) {
      throw InvalidArgument("codebook layout must be a permutation of 0..9");
    }
    seen[static_cast<std::size_t>(ch - '0')] = true;
    layout[k] = ch - '0';
  }
  return layout;
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec,
                                              const ExperimentConfig& config) {
  switch (spec.kind) {
    case EnvKind::kCodebook:
      return std::make_unique<CodebookEnv>(config.num_actions, config.noise_sigma,
                                           spec.codebook_layout);
    case EnvKind::kLinear: {
      Rng setup(config.rng_seed, Stream::kEnvSetup);
      return std::make_unique<LinearEnv>(config.context_dim, config.num_actions,
                                         config.noise_sigma, setup);
    }
    case EnvKind::kGap:
      return std::make_unique<ConstantGapEnv>(config.num_actions, spec.gap, config.noise_sigma);
    case EnvKind::kMnist: {
      if (spec.images_path.empty() || spec.labels_path.empty()) {
        throw ConfigurationError("mnist environment needs images_path and labels_path");
      }
      const auto images = load_idx_images(spec.images_path);
      const auto labels = load_idx_labels(spec.labels_path);
      return std::make_unique<MnistEnv>(images, labels, spec.pool_factor, config.num_actions,
                                        config.noise_sigma);
    }
  }
  throw InvalidArgument("unhandled environment kind");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidArgument("cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

std::vector<std::size_t> parse_widths(std::string_view text) {
  std::vector<std::size_t> widths;
  while (!text.empty()) {
    const auto comma = text.find(',');
    widths.push_back(parse_number<std::size_t>(trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (widths.empty()) throw InvalidArgument("empty width list");
  return widths;
}

using Setter = std::function<void(LoadedConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"total_steps", [](LoadedConfig& c, std::string_view v) { c.config.total_steps = parse_number<std::int64_t>(v); }},
      {"context_dim", [](LoadedConfig& c, std::string_view v) { c.config.context_dim = parse_number<std::size_t>(v); }},
      {"num_actions", [](LoadedConfig& c, std::string_view v) { c.config.num_actions = parse_number<std::size_t>(v); }},
      {"epsilon_exponent", [](LoadedConfig& c, std::string_view v) { c.config.epsilon_exponent = parse_number<double>(v); }},
      {"retrain_period", [](LoadedConfig& c, std::string_view v) { c.config.retrain_period = parse_number<std::int64_t>(v); }},
      {"train_epochs", [](LoadedConfig& c, std::string_view v) { c.config.train_epochs = parse_number<std::int64_t>(v); }},
      {"learning_rate", [](LoadedConfig& c, std::string_view v) { c.config.learning_rate = parse_number<double>(v); }},
      {"batch_size", [](LoadedConfig& c, std::string_view v) { c.config.batch_size = parse_number<std::size_t>(v); }},
      {"noise_sigma", [](LoadedConfig& c, std::string_view v) { c.config.noise_sigma = parse_number<double>(v); }},
      {"rng_seed", [](LoadedConfig& c, std::string_view v) { c.config.rng_seed = parse_number<std::uint64_t>(v); }},
      {"hidden_widths", [](LoadedConfig& c, std::string_view v) { c.config.hidden_widths = parse_widths(v); }},
      {"deep_hidden_widths", [](LoadedConfig& c, std::string_view v) { c.config.deep_hidden_widths = parse_widths(v); }},
      {"ridge", [](LoadedConfig& c, std::string_view v) { c.config.ridge = parse_number<double>(v); }},
      {"linucb_alpha", [](LoadedConfig& c, std::string_view v) { c.config.linucb_alpha = parse_number<double>(v); }},
      {"env", [](LoadedConfig& c, std::string_view v) { c.env.kind = parse_env_kind(v); }},
      {"policy", [](LoadedConfig& c, std::string_view v) { c.policy = parse_policy_kind(v); }},
      {"images_path", [](LoadedConfig& c, std::string_view v) { c.env.images_path = std::string(v); }},
      {"labels_path", [](LoadedConfig& c, std::string_view v) { c.env.labels_path = std::string(v); }},
      {"pool_factor", [](LoadedConfig& c, std::string_view v) { c.env.pool_factor = parse_number<std::size_t>(v); }},
      {"gap", [](LoadedConfig& c, std::string_view v) { c.env.gap = parse_number<double>(v); }},
      {"codebook_layout", [](LoadedConfig& c, std::string_view v) { c.env.codebook_layout = parse_codebook_layout(v); }},
  };
  return table;
}

}  // namespace

LoadedConfig parse_config(std::string_view text) {
  LoadedConfig loaded;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    auto line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto where = "config line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigurationError(where + "expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigurationError(where + "unknown key '" + std::string(key) + "'");
    }
    if (value.empty()) throw ConfigurationError(where + "missing value for '" + std::string(key) + "'");
    try {
      it->second(loaded, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigurationError(where + std::string(key) + ": " + e.what());
    }
  }
  try {
    loaded.config.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace epsgreedy
