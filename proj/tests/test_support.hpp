#pragma once

#include "strokelab/error.hpp"

#include <doctest.h>

#include <functional>

namespace test_support {

/// Error code thrown by `f`; fails the current test when nothing is thrown.
inline strokelab::Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const strokelab::Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return strokelab::Errc::BadConfig;
}

}  // namespace test_support
