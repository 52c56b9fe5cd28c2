#pragma once

#include <stdexcept>
#include <string>

namespace vip {

// Base for every error raised by the library. Callers that only need a
// one-line diagnostic can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace vip
