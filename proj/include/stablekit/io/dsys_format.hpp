#pragma once

#include "stablekit/system/descriptor_system.hpp"

#include <string>
#include <string_view>

namespace stablekit::io {

using System = DescriptorSystem<double>;

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Text format:
///   DSYS n m p
///   E            followed by n rows of n numbers
///   A            n x n
///   B            n x m
///   C            p x n
///   D            p x m
/// '#' starts a comment; blank lines are ignored. Blocks with zero columns have no rows.
System parse_dsys(std::string_view text);
std::string write_dsys(const System& s);

System read_dsys_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace stablekit::io
