#pragma once

#include <stdexcept>
#include <string>

namespace mmass {

enum class Errc {
  invalid_input,
  insufficient_truncation,
  internal_error,
  threshold_not_found,
  construction_failed,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(Errc::invalid_input, what);
}

}  // namespace mmass
