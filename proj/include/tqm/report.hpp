#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "tqm/scenarios.hpp"
#include "tqm/stats.hpp"
#include "tqm/wavefield.hpp"

namespace tqm::report {

// %.17g: enough digits to round-trip a double exactly.
std::string format_real(double v);

// trial,chosen,outcome,energy,momentum
std::string transaction_log_csv(std::span<const scenarios::LogRow> rows);

// x,t,re,im,abs
std::string field_csv(std::span<const wavefield::FieldSample> samples);

struct CorrelationPoint {
  double delta = 0.0;  // analyzer offset, radians
  double opposite_mc = 0.0;
  double opposite_analytic = 0.0;
  double correlation_mc = 0.0;
  double correlation_analytic = 0.0;
};

// delta_rad,delta_deg,opposite_mc,opposite_analytic,correlation_mc,correlation_analytic
std::string correlation_csv(std::span<const CorrelationPoint> points);

std::string gof_line(const char* name, const stats::GofReport& gof);

// LF line endings, written as-is.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace tqm::report
