#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainhydro/numeric.hpp"

namespace chainhydro {

/// One long-format result row: (experiment_id, N, seed, t, quantity, value).
struct CsvRow {
  std::string experiment_id;
  int n = 0;
  std::uint64_t seed = 0;
  double t = 0.0;
  std::string quantity;
  double value = 0.0;
};

/// Full-precision decimal rendering used in every emitted file.
std::string format_double(double v);

/// Appending CSV writer. The header carries `schema=1` and a timestamp line;
/// everything after those two lines is a deterministic function of the rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  void write(const CsvRow& row);
  void write(const std::vector<CsvRow>& rows);
  void flush();

 private:
  struct Impl;
  Impl* impl_;
};

struct SummaryEntry {
  std::string quantity;
  int n = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  int count = 0;
};

struct SlopeEntry {
  std::string quantity;
  LinearFit fit;  // log(mean) vs log(N)
};

void write_summary_csv(const std::string& path,
                       const std::vector<SummaryEntry>& entries,
                       const std::vector<SlopeEntry>& slopes);

/// Self-contained log-log SVG: per-N points plus the fitted power law.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<std::pair<double, double>>& points,
                      const LinearFit& fit);

}  // namespace chainhydro
