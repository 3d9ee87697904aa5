#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include <Eigen/Dense>

namespace resopt {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for every contract violation or runtime failure in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shortest decimal text that parses back to exactly `x`; "+inf"/"-inf"/"nan" otherwise.
inline std::string format_double(double x)
{
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view text)
{
    if (text == "+inf" || text == "inf") return kInf;
    if (text == "-inf") return -kInf;
    double x = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error("parse_double: invalid number '" + std::string(text) + "'");
    return x;
}

} // namespace resopt
