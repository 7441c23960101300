#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

enum class ErrorCode {
  invalid_argument,  // bad parameter, malformed spec string, invalid segmentation
  nonfinite_data,    // NaN or Inf in input values
  infeasible,        // no admissible segmentation under the constraints
  internal,          // invariant violation; indicates a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, what);
}
[[noreturn]] inline void throw_nonfinite(const std::string& what) {
  throw Error(ErrorCode::nonfinite_data, what);
}
[[noreturn]] inline void throw_infeasible(const std::string& what) {
  throw Error(ErrorCode::infeasible, what);
}
[[noreturn]] inline void throw_internal(const std::string& what) {
  throw Error(ErrorCode::internal, what);
}

}  // namespace cpd
