#pragma once

#include <stdexcept>
#include <string>

namespace sfp {

/// Coarse error classes. Each maps onto one CLI exit code.
enum class ErrorKind {
  domain,            // argument outside a function's mathematical domain
  parameter,         // invalid model parameter
  insufficient_data, // too few observations for the requested estimate
  data,              // malformed or inconsistent data
  degenerate_data,   // data without the variance an estimator needs
  numeric,           // numerical routine failed to converge
  io,
  not_found,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SFP_DEFINE_ERROR(Name, Kind)                                        \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

SFP_DEFINE_ERROR(DomainError, domain)
SFP_DEFINE_ERROR(ParameterError, parameter)
SFP_DEFINE_ERROR(InsufficientDataError, insufficient_data)
SFP_DEFINE_ERROR(DataError, data)
SFP_DEFINE_ERROR(DegenerateDataError, degenerate_data)
SFP_DEFINE_ERROR(NumericError, numeric)
SFP_DEFINE_ERROR(IoError, io)
SFP_DEFINE_ERROR(NotFoundError, not_found)

#undef SFP_DEFINE_ERROR

/// Malformed input file. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::data, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sfp
