#pragma once

#include <stdexcept>
#include <string>

namespace handkin {

// Malformed input document (bad JSON, wrong type, unknown field).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally well-formed input that violates a model/config invariant.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime data problem: unknown link/channel, missing joint value,
// unreachable posture in simulation, corrupt stream record.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace handkin
