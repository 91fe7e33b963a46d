#ifndef EACL_ERRORS_HPP_
#define EACL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace eacl {

// Error categories map 1:1 onto CLI exit codes:
//   ValidationError -> 2, DataError -> 3, NumericError -> 4.

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace eacl

#endif  // EACL_ERRORS_HPP_
