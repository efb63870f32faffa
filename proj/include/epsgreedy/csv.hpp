#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epsgreedy/harness.hpp"

namespace epsgreedy {

inline constexpr std::string_view kRunCsvHeader =
    "t,action,branch,epsilon,reward,normalized_reward,optimal_mean,instant_regret,"
    "cumulative_regret";
inline constexpr std::string_view kSummaryCsvHeader =
    "t,mean_normalized_reward,stderr_normalized_reward,mean_regret,stderr_regret,replicates";

/// One row of a run CSV. `action` is 1-based.
struct RunRow {
  std::int64_t t = 0;
  std::size_t action = 0;
  std::string branch;
  double epsilon = 0.0;
  double reward = 0.0;
  double normalized_reward = 0.0;
  double optimal_mean = 0.0;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
};

struct RunTable {
  std::vector<RunRow> rows;
  std::optional<std::string> error;
};

struct SummaryRow {
  std::int64_t t = 0;
  double mean_normalized_reward = 0.0;
  double stderr_normalized_reward = 0.0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  std::size_t replicates = 0;
};

/// Reals are written with 17 significant digits so they round-trip exactly.
/// A diverged run ends with a `# error: ...` line.
void write_run_csv(const RunResult& result, std::ostream& out);
void write_summary_csv(const ReplicateSummary& summary, std::ostream& out);
void emit_csv(const RunResult& result, const std::filesystem::path& path);
void emit_csv(const ReplicateSummary& summary, const std::filesystem::path& path);

RunTable read_run_csv(std::istream& in);
std::vector<SummaryRow> read_summary_csv(std::istream& in);
RunTable load_run_csv(const std::filesystem::path& path);
std::vector<SummaryRow> load_summary_csv(const std::filesystem::path& path);

/// Normalized regret trace from either CSV kind: cumulative_regret / t for a
/// run file, mean_regret for a summary file.
std::vector<double> load_regret_trace(const std::filesystem::path& path);

std::string format_real(double value);

}  // namespace epsgreedy
