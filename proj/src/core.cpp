#include "wavekit/core.hpp"

#include <array>
#include <charconv>

namespace wavekit {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  throw ValidationError("unknown axis tag '" + std::string(text) + "'");
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::force: return "force";
    case Quantity::acceleration: return "acceleration";
    case Quantity::velocity: return "velocity";
    case Quantity::displacement: return "displacement";
  }
  return "?";
}

Quantity parse_quantity(std::string_view text) {
  if (text == "force") return Quantity::force;
  if (text == "acceleration") return Quantity::acceleration;
  if (text == "velocity") return Quantity::velocity;
  if (text == "displacement") return Quantity::displacement;
  throw ValidationError("unknown quantity '" + std::string(text) + "'");
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

}  // namespace wavekit
