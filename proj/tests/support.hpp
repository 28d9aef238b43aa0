#pragma once

#include <doctest.h>

#include "mmass/error.hpp"

namespace support {

// Error code thrown by fn; fails the test if nothing is thrown.
template <class F>
mmass::Errc code_of(F&& fn) {
  try {
    fn();
  } catch (const mmass::Error& e) {
    return e.code();
  }
  FAIL("expected an mmass::Error");
  return mmass::Errc::internal_error;
}

}  // namespace support
