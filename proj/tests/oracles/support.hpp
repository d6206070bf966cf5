#pragma once

#include "erdh/error.hpp"

#include <doctest.h>

/// Runs `fn` and returns the code of the erdh::Error it throws.
template <class Fn> erdh::ErrorCode code_of(Fn &&fn) {
  try {
    fn();
  } catch (const erdh::Error &e) {
    return e.code();
  }
  FAIL("expected an erdh::Error");
  return erdh::ErrorCode::IoFailure;
}
