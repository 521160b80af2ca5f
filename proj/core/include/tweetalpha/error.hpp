#pragma once

#include <stdexcept>
#include <string>

namespace tweetalpha {

/// Failure category, mapped to a process exit code by the CLI.
enum class ErrorKind {
  config,   ///< bad configuration or unusable run setup
  data,     ///< malformed or inconsistent input data
  runtime,  ///< internal failure (I/O, overflow, broken artifact)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return Error(ErrorKind::config, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }
inline Error runtime_error(const std::string& what) { return Error(ErrorKind::runtime, what); }

}  // namespace tweetalpha
