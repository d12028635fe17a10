#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "detector_perf.hpp"
#include "efficiency.hpp"
#include "error.hpp"
#include "report_io.hpp"

using namespace sigeff;

namespace {

// Scratch files land in the test working directory and are removed by the
// fixture via RAII so reruns never see stale content.
struct ScratchFile {
  std::string path;
  explicit ScratchFile(const std::string& name) : path("report_io_" + name) {
    std::remove(path.c_str());
  }
  ~ScratchFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

bool same_bits(double a, double b) {
  std::uint64_t ua, ub;
  std::memcpy(&ua, &a, sizeof a);
  std::memcpy(&ub, &b, sizeof b);
  return ua == ub;
}

ConvergenceRecord sample_record() {
  ConvergenceRecord r;
  r.n_a = 158.0;
  r.n_b = 2219.0;
  r.mu1 = 0.1;                      // not exactly representable
  r.sigma1_sq = 1.0 / 3.0;          // repeating binary fraction
  r.re = 2219.0 / 158.0;
  r.are = 16.0;
  r.u = -3.0e-300;                  // near the subnormal range
  r.rhs = 1.0 + 2.220446049250313e-16;  // 1 + ulp
  r.relative_gap = 0.0;
  r.ok = true;
  return r;
}

}  // namespace

TEST_CASE("format_double survives a strtod round trip bit for bit") {
  const double values[] = {0.1,         1.0 / 3.0, 3.141592653589793,
                           -0.0,        1e-308,    2.2250738585072014e-308,
                           6.02214e23, -1.7976931348623157e308};
  for (double v : values) {
    const std::string text = format_double(v);
    CHECK(same_bits(std::strtod(text.c_str(), nullptr), v));
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("single record writes a two-line file with the fixed header") {
  ScratchFile f("single.csv");
  write_convergence_csv({sample_record()}, f.path);

  const std::string content = slurp(f.path);
  const std::size_t first_nl = content.find('\n');
  REQUIRE(first_nl != std::string::npos);
  CHECK(content.substr(0, first_nl) ==
        "n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap");
  // Exactly two newline-terminated lines.
  CHECK(content.back() == '\n');
  CHECK(std::count(content.begin(), content.end(), '\n') == 2);
}

TEST_CASE("round trip reproduces records bit-exactly") {
  ScratchFile f("roundtrip.csv");
  std::vector<ConvergenceRecord> records;
  records.push_back(sample_record());

  ConvergenceRecord awkward = sample_record();
  awkward.mu1 = 0.5623413251903491;  // 10^(-1/4)
  awkward.u = 4.9406564584124654e-324;  // smallest subnormal
  awkward.relative_gap = 0.9375;
  records.push_back(awkward);

  ConvergenceRecord failed;  // a search that blew past its cap
  const double nan = std::numeric_limits<double>::quiet_NaN();
  failed.n_a = failed.n_b = failed.re = failed.are = failed.u = failed.rhs =
      failed.relative_gap = nan;
  failed.mu1 = 0.25;
  failed.sigma1_sq = 1.0;
  failed.ok = false;
  records.push_back(failed);

  write_convergence_csv(records, f.path);
  const std::vector<ConvergenceRecord> back = read_convergence_csv(f.path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(same_bits(back[i].n_a, records[i].n_a));
    CHECK(same_bits(back[i].n_b, records[i].n_b));
    CHECK(same_bits(back[i].mu1, records[i].mu1));
    CHECK(same_bits(back[i].sigma1_sq, records[i].sigma1_sq));
    CHECK(same_bits(back[i].re, records[i].re));
    CHECK(same_bits(back[i].are, records[i].are));
    CHECK(same_bits(back[i].u, records[i].u));
    CHECK(same_bits(back[i].rhs, records[i].rhs));
    CHECK(same_bits(back[i].relative_gap, records[i].relative_gap));
    CHECK(back[i].ok == records[i].ok);
  }

  // Serializing the parsed records again yields the same bytes.
  ScratchFile g("roundtrip2.csv");
  write_convergence_csv(back, g.path);
  CHECK(slurp(g.path) == slurp(f.path));
}

TEST_CASE("identical-detector sweep serializes re=1 and relative_gap=0 rows") {
  const DetectorSpec np = np_random_signal_detector();
  ScalingSchedule schedule;
  schedule.c_mu = 0.5;
  const std::vector<ConvergenceRecord> records =
      convergence_sweep(np, np, schedule, 0.1, 0.9, {50, 100});

  ScratchFile f("self.csv");
  write_convergence_csv(records, f.path);
  for (const ConvergenceRecord& r : read_convergence_csv(f.path)) {
    CHECK(r.ok);
    CHECK(r.re == 1.0);
    CHECK(r.relative_gap == 0.0);
  }
}

TEST_CASE("write rejects an empty record list") {
  CHECK_THROWS_WITH_AS(write_convergence_csv({}, "unused.csv"),
                       doctest::Contains("no records"), Error);
}

TEST_CASE("write reports unwritable destinations as io errors") {
  try {
    write_convergence_csv({sample_record()},
                          "/nonexistent_dir_7f3a/out.csv");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("read rejects missing files and malformed content") {
  try {
    read_convergence_csv("no_such_file_7f3a.csv");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }

  ScratchFile f("malformed.csv");

  auto write_text = [&](const std::string& text) {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out << text;
  };
  auto expect_io = [&]() {
    try {
      read_convergence_csv(f.path);
      FAIL("expected an io error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io);
    }
  };

  write_text("");  // no header at all
  expect_io();

  write_text("n_a,n_b\n");  // truncated header
  expect_io();

  write_text("n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap\n1,2,3\n");
  expect_io();  // wrong field count

  write_text(
      "n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap\n"
      "1,2,3,4,5,6,7,8,ninex\n");
  expect_io();  // non-numeric field

  write_text(
      "n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap\n"
      "1,2,3,4,5,,7,8,9\n");
  expect_io();  // empty field
}

TEST_CASE("header-only files parse as an empty record list") {
  ScratchFile f("headeronly.csv");
  std::ofstream(f.path, std::ios::binary)
      << "n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap\n";
  CHECK(read_convergence_csv(f.path).empty());
}
