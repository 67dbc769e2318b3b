#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cluster_sieve/core.hpp"
#include "cluster_sieve/projection.hpp"

namespace csieve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitBadFlags = 3;

/// Thrown for input files or configs that cannot be used (exit 2).
struct MalformedInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Thrown for flag combinations that make no sense together (exit 3).
struct BadFlags : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Comma- or tab-delimited numbers, one observation per line. Blank lines
/// are skipped.
Matrix read_matrix(std::istream& in, bool header);
Matrix read_matrix_file(const std::string& path, bool header);

/// (x - column mean) / column sd, sd with the n-1 divisor.
Matrix standardize(const Matrix& X);

/// "1:2,2:3" -> {(0,1),(1,2)}.
std::vector<ClusterPair> parse_pairs(const std::string& spec);

/// Quote a CSV field when it holds a delimiter, quote or newline.
std::string csv_field(const std::string& s);

std::string version_string();

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csieve::cli
