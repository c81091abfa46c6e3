#pragma once

// Instance files: a versioned JSON document with a canonical key order.
//
//   {"format_version": "1", "kind": "nup", "multiset": [1, 2, 3], "lambda": 1.0}
//   {"format_version": "1", "kind": "generic", "A": [[...], ...], "b": [...],
//    "tau": 1.0, "nonneg": false}
//
// Reduction kinds carry a multiset; "generic" carries A and b. Keys appear in
// the order format_version, kind, multiset | A, b, tau | lambda, nonneg.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "l12/model.hpp"

namespace l12::cli {

inline constexpr std::string_view kFormatVersion = "1";

class InstanceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstanceFile {
  ProblemKind kind = ProblemKind::PQP;
  std::optional<PartitionInstance> multiset;  // reduction kinds
  std::optional<Matrix> A;                    // generic
  std::optional<Vector> b;                    // generic
  std::optional<double> tau;
  std::optional<double> lambda;
  bool nonneg = false;  // generic only; implied by the kind otherwise

  /// Checks field presence for the kind and builds the instance.
  ProblemInstance to_instance() const;
};

/// Canonical text, two-space indentation, trailing newline.
std::string serialize(const InstanceFile& file);

/// Throws InstanceFormatError on malformed JSON, a wrong format_version,
/// unknown or missing keys, or values of the wrong type.
InstanceFile parse_instance(std::string_view text);

/// Throws std::runtime_error on I/O failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace l12::cli
