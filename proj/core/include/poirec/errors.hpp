#pragma once

#include <stdexcept>
#include <string>

namespace poirec {

/// Malformed or inconsistent input data (files, records, configs).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator produced an all-zero (or otherwise unusable) distribution.
class DegenerateEstimate : public std::runtime_error {
 public:
  explicit DegenerateEstimate(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace poirec
