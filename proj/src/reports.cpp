#include "mixlab/reports.hpp"

#include "mixlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mixlab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_correlation_csv(const CorrelationReport& report, const std::string& path,
                           const OutputStamp& stamp) {
  auto out = open_out(path);
  out << "# mixlab-csv/1 version=" << stamp.version << " config=" << stamp.config_hash << "\n";
  out << "n,value_num,value_den,err_num,err_den\n";
  for (const auto& e : report.entries) {
    out << e.n.str() << "," << numerator(e.value).str() << "," << denominator(e.value).str() << ","
        << numerator(e.error).str() << "," << denominator(e.error).str() << "\n";
  }
}

void write_correlation_summary(const CorrelationReport& report,
                               const std::vector<std::string>& verdict_lines,
                               const std::string& path, const OutputStamp& stamp) {
  auto out = open_out(path);
  out << "mixlab correlation summary (version " << stamp.version << ", config "
      << stamp.config_hash << ")\n";
  out << "atoms: " << report.atom_a << " x " << report.atom_b << "\n";
  out << "set: " << report.set_description << "\n";
  out << "height: " << report.height.str() << "\n";
  out << "mu(X) raw: " << rational_to_string(report.mu_x) << "\n";
  out << "mu(A): " << rational_to_string(report.mu_a) << " (" << fmt(to_double(report.mu_a))
      << ")\n";
  out << "mu(B): " << rational_to_string(report.mu_b) << " (" << fmt(to_double(report.mu_b))
      << ")\n";
  out << "target product: " << fmt(to_double(report.product)) << "\n";
  out << "entries: " << report.entries.size() << "\n";
  if (!report.truncation_note.empty()) out << "note: " << report.truncation_note << "\n";
  if (!report.assumptions.empty()) out << "assumptions: " << report.assumptions << "\n";
  if (report.entries.empty()) out << "verdict: vacuous (no indices in window)\n";
  auto bands = band_statistics(report);
  if (!bands.empty()) {
    out << "band sup-deviations (n in [h_j, h_{j+1})):\n";
    for (const auto& b : bands) {
      out << "  band " << b.band << " [" << b.lo.str() << ", " << b.hi.str()
          << "]: " << fmt(to_double(b.sup_deviation)) << " over " << b.samples << " samples\n";
    }
  }
  for (const auto& line : verdict_lines) out << line << "\n";
}

void write_decay_svg(const CorrelationReport& report, const std::string& path,
                     const OutputStamp& stamp) {
  auto out = open_out(path);
  const int width = 800, height = 420, ml = 60, mr = 20, mt = 20, mb = 40;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
  out << "<!-- mixlab " << stamp.version << " config=" << stamp.config_hash << " -->\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\" stroke=\"none\"/>\n";
  if (report.entries.empty()) {
    out << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
        << "\" text-anchor=\"middle\">empty report</text>\n</svg>\n";
    return;
  }
  const double floor_dev = 1e-12;
  double nmin = to_double(Rational(report.entries.front().n));
  double nmax = to_double(Rational(report.entries.back().n));
  if (nmax <= nmin) nmax = nmin + 1;
  double dmin = 0, dmax = -12;  // log10 scale; dev clamped at 1e-12
  for (const auto& e : report.entries) {
    double d = std::log10(std::max(to_double(e.deviation), floor_dev));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax <= dmin) dmax = dmin + 1;
  auto X = [&](double n) { return ml + (n - nmin) / (nmax - nmin) * (width - ml - mr); };
  auto Y = [&](double d) { return height - mb - (d - dmin) / (dmax - dmin) * (height - mt - mb); };
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-size=\"12\">n</text>\n";
  out << "<text x=\"14\" y=\"" << (mt + height - mb) / 2
      << "\" font-size=\"12\" transform=\"rotate(-90 14 " << (mt + height - mb) / 2
      << ")\" text-anchor=\"middle\">log10 |deviation|</text>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
  for (const auto& e : report.entries) {
    double n = to_double(Rational(e.n));
    double d = std::log10(std::max(to_double(e.deviation), floor_dev));
    out << fmt(X(n)) << "," << fmt(Y(d)) << " ";
  }
  out << "\"/>\n";
  // stage-height gridlines inside the plotted range
  for (const auto& h : report.stage_heights) {
    double n = to_double(Rational(h));
    if (n < nmin || n > nmax) continue;
    out << "<line x1=\"" << fmt(X(n)) << "\" y1=\"" << mt << "\" x2=\"" << fmt(X(n)) << "\" y2=\""
        << height - mb << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace mixlab
