#pragma once

#include <doctest.h>

#include <functional>
#include <string>

#include "core/error.hpp"

namespace testutil {

// Runs f, which must throw dtlab::Error; returns the code carried.
inline dtlab::Err code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const dtlab::Error& e) {
    return e.code();
  } catch (const std::exception& e) {
    FAIL("expected dtlab::Error, got: ", e.what());
  }
  FAIL("expected dtlab::Error, nothing was thrown");
  return dtlab::Err::InvalidArgument;  // unreachable
}

inline std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const dtlab::Error& e) {
    return e.what();
  }
  FAIL("expected dtlab::Error, nothing was thrown");
  return {};
}

}  // namespace testutil

#define CHECK_ERRCODE(code, ...) \
  CHECK((testutil::code_of([&] { __VA_ARGS__; })) == (code))
