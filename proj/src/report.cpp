#include "mmdvar/report.hpp"

#include <algorithm>

namespace mmdvar {

std::string_view path_name(EstimatorPath path) noexcept {
  return path == EstimatorPath::Matrix ? "matrix" : "fast";
}

MmdReport clamp_variance(MmdReport report) {
  report.var_t2 = std::max(report.var_t2, 0.0);
  report.var_total = report.var_t1 + report.var_t2;
  return report;
}

}  // namespace mmdvar
