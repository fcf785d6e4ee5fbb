#pragma once

#include <stdexcept>
#include <string>

namespace latpack {

enum class errc {
  cycle,
  size,
  realizer_mismatch,
  divisibility,
  min_max,
  capacity,
  timeout,
  parameter,
  precondition,
  goodness,
  retries_exhausted,
  greedy_exhausted,
  bridge,
  dimension,
  format,
};

inline const char* errc_name(errc k) {
  switch (k) {
    case errc::cycle: return "cycle";
    case errc::size: return "size";
    case errc::realizer_mismatch: return "realizer-mismatch";
    case errc::divisibility: return "divisibility";
    case errc::min_max: return "min-max";
    case errc::capacity: return "capacity";
    case errc::timeout: return "timeout";
    case errc::parameter: return "parameter";
    case errc::precondition: return "precondition";
    case errc::goodness: return "goodness";
    case errc::retries_exhausted: return "retries-exhausted";
    case errc::greedy_exhausted: return "greedy-exhausted";
    case errc::bridge: return "bridge";
    case errc::dimension: return "dimension";
    case errc::format: return "format";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + what), kind_(kind) {}
  errc kind() const noexcept { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

inline void require(bool cond, errc kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace latpack
