#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PreprocessError : public Error {
 public:
  using Error::Error;
};

// Carries the byte offset into the parsed text so callers can map it back to
// a file and line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t offset) : Error(what), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

class ElabError : public Error {
 public:
  using Error::Error;
};

}  // namespace modbench
