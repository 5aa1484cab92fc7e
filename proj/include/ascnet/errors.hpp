#ifndef ASCNET_ERRORS_HPP_
#define ASCNET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ascnet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape error: " + what) {}
};

class DegenerateFeatureError : public Error {
 public:
  explicit DegenerateFeatureError(const std::string& what) : Error("degenerate feature: " + what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range error: " + what) {}
};

class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& what) : Error("numerics error: " + what) {}
};

class LabelError : public Error {
 public:
  explicit LabelError(const std::string& what) : Error("label error: " + what) {}
};

class NoCandidateError : public Error {
 public:
  explicit NoCandidateError(const std::string& what) : Error("no candidate: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

}  // namespace ascnet

#endif  // ASCNET_ERRORS_HPP_
