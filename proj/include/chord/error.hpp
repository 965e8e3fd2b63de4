// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace chord {

/// Failure classes surfaced by the library. Values are mirrored by the
/// `CHORD_E_*` status codes of the C API.
enum class ErrorKind {
  kParse = 1,       // malformed JSON or config text
  kSchema = 2,      // required key missing
  kType = 3,        // value of the wrong JSON type
  kValidation = 4,  // value out of range
  kPalette = 5,     // missing or ambiguous palette entry
  kTransform = 6,   // degenerate world <-> pixel mapping
  kPlacement = 7,   // toy generator could not place objects
  kTensor = 8,      // shape mismatch
  kNumeric = 9,     // non-finite value during diffusion
  kIo = 10,         // file system / PNG / checkpoint problems
  kArgument = 11,   // bad caller-supplied argument
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace chord
