#include "chainhydro/output.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace chainhydro {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("CsvWriter: cannot open " + path);
  }
  std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  impl_->out << "# schema=1\n";
  impl_->out << "# generated_at=" << stamp << "\n";
  impl_->out << "experiment_id,n,seed,t,quantity,value\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::write(const CsvRow& row) {
  impl_->out << row.experiment_id << ',' << row.n << ',' << row.seed << ','
             << format_double(row.t) << ',' << row.quantity << ','
             << format_double(row.value) << '\n';
}

void CsvWriter::write(const std::vector<CsvRow>& rows) {
  for (const auto& r : rows) write(r);
  flush();
}

void CsvWriter::flush() { impl_->out.flush(); }

void write_summary_csv(const std::string& path,
                       const std::vector<SummaryEntry>& entries,
                       const std::vector<SlopeEntry>& slopes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "# schema=1\n";
  out << "record,quantity,n,mean,stderr,count,slope,slope_stderr\n";
  for (const auto& e : entries)
    out << "per_n," << e.quantity << ',' << e.n << ',' << format_double(e.mean)
        << ',' << format_double(e.stderr_mean) << ',' << e.count << ",,\n";
  for (const auto& s : slopes)
    out << "slope," << s.quantity << ",,,,," << format_double(s.fit.slope) << ','
        << format_double(s.fit.slope_stderr) << '\n';
}

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<std::pair<double, double>>& points,
                      const LinearFit& fit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_loglog_svg: cannot open " + path);

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) continue;
    const double lx = std::log10(x), ly = std::log10(y);
    logs.emplace_back(lx, ly);
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    ymin = std::min(ymin, ly);
    ymax = std::max(ymax, ly);
  }
  if (logs.size() < 2) {
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='480'>"
        << "<text x='20' y='40'>" << title << ": too few positive points"
        << "</text></svg>\n";
    return;
  }
  const double padx = 0.08 * std::max(xmax - xmin, 0.1);
  const double pady = 0.08 * std::max(ymax - ymin, 0.1);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  const double w = 640, h = 480, ml = 80, mr = 20, mt = 40, mb = 60;
  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double ly) { return h - mb - (ly - ymin) / (ymax - ymin) * (h - mt - mb); };

  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
      << h << "' viewBox='0 0 " << w << ' ' << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>"
      << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
      << "' y2='" << h - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << h - mb << "' stroke='black'/>\n";

  for (int d = static_cast<int>(std::ceil(xmin)); d <= std::floor(xmax); ++d) {
    out << "<line x1='" << px(d) << "' y1='" << h - mb << "' x2='" << px(d)
        << "' y2='" << mt << "' stroke='#dddddd'/>\n";
    out << "<text x='" << px(d) << "' y='" << h - mb + 18
        << "' text-anchor='middle' font-size='12'>1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= std::floor(ymax); ++d) {
    out << "<line x1='" << ml << "' y1='" << py(d) << "' x2='" << w - mr
        << "' y2='" << py(d) << "' stroke='#dddddd'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << py(d) + 4
        << "' text-anchor='end' font-size='12'>1e" << d << "</text>\n";
  }

  // Fitted power law over the data span (fit is in natural logs).
  const double lx0 = xmin + padx / 2, lx1 = xmax - padx / 2;
  const double ln10 = std::log(10.0);
  auto fit_ly = [&](double lx) {
    return (fit.intercept + fit.slope * (lx * ln10)) / ln10;
  };
  out << "<line x1='" << px(lx0) << "' y1='" << py(fit_ly(lx0)) << "' x2='"
      << px(lx1) << "' y2='" << py(fit_ly(lx1))
      << "' stroke='#c04040' stroke-dasharray='6 4'/>\n";

  for (const auto& [lx, ly] : logs)
    out << "<circle cx='" << px(lx) << "' cy='" << py(ly)
        << "' r='4' fill='#3050c0'/>\n";

  out << "<text x='" << w - mr << "' y='" << mt + 14
      << "' text-anchor='end' font-size='12'>slope " << format_double(fit.slope)
      << "</text>\n";
  out << "</svg>\n";
}

}  // namespace chainhydro
