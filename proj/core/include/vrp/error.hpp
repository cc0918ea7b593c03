#pragma once

#include <stdexcept>
#include <string>

namespace vrp {

enum class ErrorKind {
  dimension,
  configuration,
  degenerate_input,
  insufficient_data,
  empty_vicinity,
  parse,
  row_sum,
  validation,
  missing_file,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

// Process exit status for an error of the given kind: 2 usage/config,
// 3 data validation, 4 I/O.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define VRP_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

VRP_DEFINE_ERROR(DimensionError, dimension);
VRP_DEFINE_ERROR(ConfigurationError, configuration);
VRP_DEFINE_ERROR(DegenerateInputError, degenerate_input);
VRP_DEFINE_ERROR(InsufficientDataError, insufficient_data);
VRP_DEFINE_ERROR(EmptyVicinityError, empty_vicinity);
VRP_DEFINE_ERROR(ParseError, parse);
VRP_DEFINE_ERROR(RowSumError, row_sum);
VRP_DEFINE_ERROR(ValidationError, validation);
VRP_DEFINE_ERROR(MissingFileError, missing_file);
VRP_DEFINE_ERROR(IoError, io);

#undef VRP_DEFINE_ERROR

}  // namespace vrp
