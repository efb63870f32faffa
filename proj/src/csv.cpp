#include "epsgreedy/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "epsgreedy/errors.hpp"

namespace epsgreedy {

std::string format_real(double value) {
  char buffer[32];
  const int n = std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(n));
}

void write_run_csv(const RunResult& result, std::ostream& out) {
  out << kRunCsvHeader << '\n';
  double cumulative = 0.0;
  const auto& records = result.history.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    cumulative += r.instant_regret;
    out << r.t << ',' << r.action + 1 << ',' << branch_name(r.branch) << ','
        << format_real(r.epsilon) << ',' << format_real(r.reward) << ','
        << format_real(result.normalized_reward[i]) << ',' << format_real(r.optimal_mean) << ','
        << format_real(r.instant_regret) << ',' << format_real(cumulative) << '\n';
  }
  if (result.error) out << "# error: " << *result.error << '\n';
}

void write_summary_csv(const ReplicateSummary& summary, std::ostream& out) {
  out << kSummaryCsvHeader << '\n';
  for (std::size_t i = 0; i < summary.mean_normalized_reward.size(); ++i) {
    out << i + 1 << ',' << format_real(summary.mean_normalized_reward[i]) << ','
        << format_real(summary.stderr_normalized_reward[i]) << ','
        << format_real(summary.mean_regret[i]) << ',' << format_real(summary.stderr_regret[i])
        << ',' << summary.replicates << '\n';
  }
  for (const auto& failure : summary.failures) out << "# error: " << failure << '\n';
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

template <typename T>
T field_as(std::string_view text, std::size_t line_no) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("csv line " + std::to_string(line_no) + ": bad field '" +
                      std::string(text) + "'");
  }
  return value;
}

/// Calls `row` for each data line after checking the header.
template <typename RowFn, typename CommentFn>
void read_table(std::istream& in, std::string_view header, std::size_t columns, RowFn row,
                CommentFn comment) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError("csv: unexpected header '" + line + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      comment(std::string_view(line));
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != columns) {
      throw FormatError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " fields");
    }
    row(fields, line_no);
  }
}

}  // namespace

void emit_csv(const RunResult& result, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_run_csv(result, out);
  finish(out, path);
}

void emit_csv(const ReplicateSummary& summary, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_summary_csv(summary, out);
  finish(out, path);
}

RunTable read_run_csv(std::istream& in) {
  RunTable table;
  read_table(
      in, kRunCsvHeader, 9,
      [&](const std::vector<std::string_view>& f, std::size_t n) {
        RunRow row;
        row.t = field_as<std::int64_t>(f[0], n);
        row.action = field_as<std::size_t>(f[1], n);
        row.branch = std::string(f[2]);
        row.epsilon = field_as<double>(f[3], n);
        row.reward = field_as<double>(f[4], n);
        row.normalized_reward = field_as<double>(f[5], n);
        row.optimal_mean = field_as<double>(f[6], n);
        row.instant_regret = field_as<double>(f[7], n);
        row.cumulative_regret = field_as<double>(f[8], n);
        table.rows.push_back(std::move(row));
      },
      [&](std::string_view comment) {
        constexpr std::string_view kPrefix = "# error: ";
        if (comment.starts_with(kPrefix)) table.error = std::string(comment.substr(kPrefix.size()));
      });
  return table;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::vector<SummaryRow> rows;
  read_table(
      in, kSummaryCsvHeader, 6,
      [&](const std::vector<std::string_view>& f, std::size_t n) {
        rows.push_back({field_as<std::int64_t>(f[0], n), field_as<double>(f[1], n),
                        field_as<double>(f[2], n), field_as<double>(f[3], n),
                        field_as<double>(f[4], n), field_as<std::size_t>(f[5], n)});
      },
      [](std::string_view) {});
  return rows;
}

RunTable load_run_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_run_csv(in);
}

std::vector<SummaryRow> load_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_summary_csv(in);
}

std::vector<double> load_regret_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  in.seekg(0);
  std::vector<double> trace;
  if (header == kRunCsvHeader) {
    for (const auto& row : read_run_csv(in).rows) {
      trace.push_back(row.cumulative_regret / static_cast<double>(row.t));
    }
  } else if (header == kSummaryCsvHeader) {
    for (const auto& row : read_summary_csv(in)) trace.push_back(row.mean_regret);
  } else {
    throw FormatError(path.string() + ": not a run or summary CSV");
  }
  return trace;
}

}  // namespace epsgreedy
