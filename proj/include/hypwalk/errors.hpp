#pragma once

#include <stdexcept>
#include <string>

namespace hypwalk {

enum class Errc {
  cap_exceeded,
  not_symmetric,
  not_admissible,
  not_normalized,
  depth_too_shallow,
  insufficient_depth,
  bad_parameter,
  non_convergence,
  dimension_hypothesis,
  config_invalid,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Error(Errc code, const std::string& what, long long required)
      : std::runtime_error(what), code_(code), required_(required) {}

  Errc code() const { return code_; }
  // For cap_exceeded: the cap that would have been needed.
  long long required() const { return required_; }

 private:
  Errc code_;
  long long required_ = -1;
};

[[noreturn]] inline void throw_cap_exceeded(const std::string& what, long long needed) {
  throw Error(Errc::cap_exceeded, what + " (needs cap >= " + std::to_string(needed) + ")", needed);
}

}  // namespace hypwalk
