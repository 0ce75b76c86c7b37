#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace xferscope {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  Input,       // unreadable or malformed input
  Validation,  // well-formed input that violates an invariant
  Numerical,   // statistics, fitting or cross-validation failure
};

class Error : public std::exception {
 public:
  explicit Error(std::string message) : message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }
  virtual ErrorKind kind() const noexcept = 0;

  /// Prefixes the message with "context: ", used while an error propagates
  /// out of a (fraction, replicate) work item.
  void add_context(const std::string& context) { message_ = context + ": " + message_; }

 private:
  std::string message_;
};

#define XFERSCOPE_DEFINE_ERROR(Name, Kind)                  \
  class Name : public Error {                               \
   public:                                                  \
    using Error::Error;                                     \
    ErrorKind kind() const noexcept override { return Kind; } \
  };

XFERSCOPE_DEFINE_ERROR(FormatError, ErrorKind::Input)
XFERSCOPE_DEFINE_ERROR(IoError, ErrorKind::Input)
XFERSCOPE_DEFINE_ERROR(DataError, ErrorKind::Validation)
XFERSCOPE_DEFINE_ERROR(IndexError, ErrorKind::Validation)
XFERSCOPE_DEFINE_ERROR(DimError, ErrorKind::Validation)
XFERSCOPE_DEFINE_ERROR(ConfigError, ErrorKind::Validation)
XFERSCOPE_DEFINE_ERROR(GridError, ErrorKind::Validation)
XFERSCOPE_DEFINE_ERROR(StatError, ErrorKind::Numerical)
XFERSCOPE_DEFINE_ERROR(FitError, ErrorKind::Numerical)
XFERSCOPE_DEFINE_ERROR(CvError, ErrorKind::Numerical)

#undef XFERSCOPE_DEFINE_ERROR

}  // namespace xferscope
