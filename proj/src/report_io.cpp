#include "report_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace sigeff {
namespace {

bool all_finite(const ConvergenceRecord& r) {
  return std::isfinite(r.n_a) && std::isfinite(r.n_b) &&
         std::isfinite(r.mu1) && std::isfinite(r.sigma1_sq) &&
         std::isfinite(r.re) && std::isfinite(r.are) && std::isfinite(r.u) &&
         std::isfinite(r.rhs) && std::isfinite(r.relative_gap);
}

double parse_field(const std::string& text, const std::string& path,
                   std::size_t line_no) {
  if (text.empty()) {
    throw Error(ErrorCode::io, path + ":" + std::to_string(line_no) +
                                   ": empty field");
  }
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw Error(ErrorCode::io, path + ":" + std::to_string(line_no) +
                                   ": bad numeric field '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_convergence_csv(const std::vector<ConvergenceRecord>& records,
                           const std::string& path) {
  if (records.empty()) {
    throw Error::domain("write_convergence_csv: no records to write");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  }
  out << kConvergenceCsvHeader << '\n';
  for (const ConvergenceRecord& r : records) {
    out << format_double(r.n_a) << ',' << format_double(r.n_b) << ','
        << format_double(r.mu1) << ',' << format_double(r.sigma1_sq) << ','
        << format_double(r.re) << ',' << format_double(r.are) << ','
        << format_double(r.u) << ',' << format_double(r.rhs) << ','
        << format_double(r.relative_gap) << '\n';
  }
  out.flush();
  if (!out) {
    throw Error(ErrorCode::io, "write failure on '" + path + "'");
  }
}

std::vector<ConvergenceRecord> read_convergence_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open '" + path + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::io, path + ": missing header line");
  }
  if (line != kConvergenceCsvHeader) {
    throw Error(ErrorCode::io, path + ": unexpected header '" + line + "'");
  }
  std::vector<ConvergenceRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 9) {
      throw Error(ErrorCode::io, path + ":" + std::to_string(line_no) +
                                     ": expected 9 fields, got " +
                                     std::to_string(fields.size()));
    }
    ConvergenceRecord r;
    r.n_a = parse_field(fields[0], path, line_no);
    r.n_b = parse_field(fields[1], path, line_no);
    r.mu1 = parse_field(fields[2], path, line_no);
    r.sigma1_sq = parse_field(fields[3], path, line_no);
    r.re = parse_field(fields[4], path, line_no);
    r.are = parse_field(fields[5], path, line_no);
    r.u = parse_field(fields[6], path, line_no);
    r.rhs = parse_field(fields[7], path, line_no);
    r.relative_gap = parse_field(fields[8], path, line_no);
    r.ok = all_finite(r);
    records.push_back(r);
  }
  return records;
}

}  // namespace sigeff
