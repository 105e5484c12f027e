#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "chaoswork/quantum.hpp"
#include "chaoswork/semiclassical.hpp"
#include "chaoswork/work_distribution.hpp"

namespace chaoswork::io {

/// Shortest round-trip-safe text: 17 significant digits.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string char_func_csv(const CharFunc& cf) {
  std::ostringstream out;
  out << "u,re_g,im_g,stderr\n";
  for (std::size_t k = 0; k < cf.size(); ++k) {
    const double se = k < cf.std_error.size() ? cf.std_error[k] : 0.0;
    out << num(cf.u[k]) << ',' << num(cf.g[k].real()) << ',' << num(cf.g[k].imag()) << ',' << num(se) << '\n';
  }
  return out.str();
}

inline std::string work_distribution_csv(const WorkDistribution& d) {
  std::ostringstream out;
  out << (d.kind == DistKind::density ? "w,density\n" : "w,probability\n");
  for (std::size_t j = 0; j < d.w.size(); ++j) out << num(d.w[j]) << ',' << num(d.weights[j]) << '\n';
  return out.str();
}

inline std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << num(r[i]);
    out << '\n';
  }
  return out.str();
}

inline std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << num(m(i, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace chaoswork::io
