#include "l12cli/run_record.hpp"

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <fcntl.h>
#include <unistd.h>

namespace l12::cli {

nlohmann::ordered_json RunRecord::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["instance_digest"] = instance_digest;
  j["options"] = options;
  j["seed"] = seed;
  j["results"] = results;
  j["wall_seconds"] = wall_seconds;
  return j;
}

void append_run_record(const std::string& path, const RunRecord& record) {
  const std::string line = record.to_json().dump() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw std::runtime_error("cannot open log '" + path + "': " + std::strerror(errno));
  }
  const ssize_t written = ::write(fd, line.data(), line.size());
  const int write_errno = errno;
  ::close(fd);
  if (written != static_cast<ssize_t>(line.size())) {
    throw std::runtime_error("short write to log '" + path + "': " + std::strerror(write_errno));
  }
}

}  // namespace l12::cli
