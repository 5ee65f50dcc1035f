#pragma once

#include "gdrift/error.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

namespace gdrift::testing {

/// Runs f and reports the kind of the gdrift::Error it throws, if any.
inline bool throws_kind(const std::function<void()>& f, ErrorKind kind) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

}  // namespace gdrift::testing

#define CHECK_THROWS_KIND(expr, kind) CHECK(gdrift::testing::throws_kind([&] { (void)(expr); }, kind))
