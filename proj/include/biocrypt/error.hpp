#pragma once

#include <stdexcept>
#include <string>

namespace biocrypt {

/// Failure categories. The CLI maps these onto its exit codes.
enum class Errc {
  invalid_argument,
  io,
  bad_format,
  too_small,
  dimension_mismatch,
  empty_input,
  single_class,
  no_face,
  multiple_faces,
  duplicate_user,
  unknown_user,
  blank_encoding,
  zero_variance,
  malformed_envelope,
  randomness,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace biocrypt
