#pragma once

#include <stdexcept>
#include <string>

namespace sepkit {

/// Base class for data-level failures (bad files, bad JSON, invalid input
/// families).  Carries a short machine-greppable code so tools can report
/// one-line diagnostics.  Contract violations in library calls use the
/// std exceptions (std::invalid_argument, std::domain_error) instead.
class error : public std::runtime_error {
 public:
  error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class io_error : public error {
 public:
  explicit io_error(const std::string& what) : error("E_IO", what) {}
};

class parse_error : public error {
 public:
  explicit parse_error(const std::string& what) : error("E_PARSE", what) {}
};

class invalid_character : public error {
 public:
  explicit invalid_character(const std::string& what) : error("E_CHAR", what) {}
};

class unsupported_error : public error {
 public:
  explicit unsupported_error(const std::string& what) : error("E_UNSUPPORTED", what) {}
};

}  // namespace sepkit
