#include "tqm/report.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace tqm::report {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string transaction_log_csv(std::span<const scenarios::LogRow> rows) {
  std::string out = "trial,chosen,outcome,energy,momentum\n";
  for (const scenarios::LogRow& r : rows) {
    out += std::to_string(r.trial);
    out += ',';
    out += r.chosen;
    out += ',';
    out += r.outcome;
    out += ',';
    out += format_real(r.energy);
    out += ',';
    out += format_real(r.momentum);
    out += '\n';
  }
  return out;
}

std::string field_csv(std::span<const wavefield::FieldSample> samples) {
  std::string out = "x,t,re,im,abs\n";
  for (const wavefield::FieldSample& s : samples) {
    out += format_real(s.x);
    out += ',';
    out += format_real(s.t);
    out += ',';
    out += format_real(s.value.real());
    out += ',';
    out += format_real(s.value.imag());
    out += ',';
    out += format_real(std::abs(s.value));
    out += '\n';
  }
  return out;
}

std::string correlation_csv(std::span<const CorrelationPoint> points) {
  std::string out =
      "delta_rad,delta_deg,opposite_mc,opposite_analytic,correlation_mc,correlation_analytic\n";
  for (const CorrelationPoint& p : points) {
    out += format_real(p.delta);
    out += ',';
    out += format_real(p.delta * 180.0 / std::numbers::pi);
    out += ',';
    out += format_real(p.opposite_mc);
    out += ',';
    out += format_real(p.opposite_analytic);
    out += ',';
    out += format_real(p.correlation_mc);
    out += ',';
    out += format_real(p.correlation_analytic);
    out += '\n';
  }
  return out;
}

std::string gof_line(const char* name, const stats::GofReport& gof) {
  std::string out = name;
  out += ": statistic=";
  out += format_real(gof.statistic);
  out += " dof=";
  out += std::to_string(gof.degrees_of_freedom);
  out += " p_value=";
  out += format_real(gof.p_value);
  out += " alpha=";
  out += format_real(gof.alpha);
  out += gof.pass ? " pass=yes" : " pass=no";
  out += '\n';
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace tqm::report
