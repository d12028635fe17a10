#pragma once

#include <string>
#include <vector>

#include "efficiency.hpp"

namespace sigeff {

// Serializes a double with 17 significant digits so that parsing the text
// recovers the exact bit pattern (shortest form that is always sufficient
// for IEEE binary64).
std::string format_double(double value);

// Writes convergence records as CSV with the fixed header
// n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap
// one row per record, in the order given. Records from failed searches
// serialize their NaN fields as "nan". Throws ErrorCode::domain for an
// empty sequence and ErrorCode::io on any filesystem failure.
void write_convergence_csv(const std::vector<ConvergenceRecord>& records,
                           const std::string& path);

// Parses a file produced by write_convergence_csv. The header must match
// byte for byte and every row must have exactly nine numeric fields.
// Round trip is bit-exact, including NaN placement; a record's ok flag is
// reconstructed as "all searched fields are finite". Throws ErrorCode::io
// on unreadable files or malformed content.
std::vector<ConvergenceRecord> read_convergence_csv(const std::string& path);

inline constexpr const char* kConvergenceCsvHeader =
    "n_a,n_b,mu1,sigma1_sq,re,are,u,rhs,relative_gap";

}  // namespace sigeff
