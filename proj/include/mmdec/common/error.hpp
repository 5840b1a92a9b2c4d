#pragma once

#include <stdexcept>
#include <string>

namespace mmdec {

// Invalid arguments or violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent files and datasets.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmdec
