#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sigeff {

// Failure categories shared by the whole library. The C API maps these 1:1
// onto its status codes, so keep the list in sync with include/sigeff.h.
enum class ErrorCode {
  domain,                  // invalid argument or model parameter
  numeric,                 // non-finite value produced during evaluation
  no_nonzero_derivative,   // all probed derivative orders numerically zero
  incomparable_orders,     // efficacy orders differ between detectors
  n_max_exceeded,          // sample-size search hit its cap
  io,                      // file read/write or parse failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg,
        double detail = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(msg), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }

  // Optional numeric payload: the abscissa for numeric errors, the attained
  // detection probability for n_max_exceeded, NaN otherwise.
  double detail() const noexcept { return detail_; }
  bool has_detail() const noexcept { return !std::isnan(detail_); }

  static Error domain(const std::string& msg) {
    return Error(ErrorCode::domain, msg);
  }
  static Error numeric(
      const std::string& msg,
      double where = std::numeric_limits<double>::quiet_NaN()) {
    return Error(ErrorCode::numeric, msg, where);
  }

 private:
  ErrorCode code_;
  double detail_;
};

}  // namespace sigeff
