#pragma once

// Run records: one JSON object per line, appended to a log file.

#include <cstdint>
#include <string>

#include "json.hpp"

namespace l12::cli {

struct RunRecord {
  std::string command;
  std::string instance_digest;  // SHA-256 of the canonical instance text
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  double wall_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

/// Appends record.to_json() plus a newline with a single write(2) on a file
/// opened with O_APPEND, so concurrent writers never interleave lines.
/// Throws std::runtime_error on failure.
void append_run_record(const std::string& path, const RunRecord& record);

}  // namespace l12::cli
