#pragma once

#include <stdexcept>
#include <string>

namespace sceneforge {

// Base class for every domain failure the toolkit reports. The CLI maps these
// to exit code 1; anything else escaping main is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class ExecError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class RemoteUnavailable : public Error {
 public:
  using Error::Error;
};

class CategoryMissing : public Error {
 public:
  using Error::Error;
};

}  // namespace sceneforge
