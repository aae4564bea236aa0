#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpi {

// Shape or dimension mismatch in tensor ops and model wiring.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration value (dropout rate >= 1, even conv kernel, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input data: labels outside {0,1}, inconsistent embedding widths,
// empty sequences, single-class metric inputs.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse: optimizer step before backward, readout on an empty graph.
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// SMILES syntax error carrying the byte offset of the offending character.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& reason)
      : std::runtime_error("parse error at byte " + std::to_string(offset) +
                           ": " + reason),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace dpi
