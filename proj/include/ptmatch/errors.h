#pragma once

#include <stdexcept>
#include <string>

namespace ptmatch {

// Malformed caller input: out-of-range ids, self-loops, size mismatches.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Model or algorithm parameters outside their admissible range.
class ParamError : public std::runtime_error {
 public:
  explicit ParamError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ptmatch
