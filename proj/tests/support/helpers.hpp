#pragma once

#include "doctest.h"
#include "support/params.hpp"
#include "tlsaa/errors.hpp"

// Asserts that `expr` throws tlsaa::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected_code)                       \
  do {                                                              \
    bool tlsaa_thrown_ = false;                                     \
    try {                                                           \
      (void)(expr);                                                 \
    } catch (const ::tlsaa::Error& e) {                             \
      tlsaa_thrown_ = true;                                         \
      CHECK_MESSAGE(e.code() == (expected_code), std::string(e.what()));       \
    }                                                               \
    CHECK_MESSAGE(tlsaa_thrown_, "expected tlsaa::Error: " #expr);  \
  } while (0)
