#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <system_error>

namespace linklife {

// Shortest decimal representation that round-trips the exact double.
// Locale independent by construction.
inline std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
  return std::string(buf, ptr);
}

inline std::string fmt_int(std::int64_t v) { return std::to_string(v); }

}  // namespace linklife
