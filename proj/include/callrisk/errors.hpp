#pragma once

#include <stdexcept>
#include <string>

namespace callrisk {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text. line/column are 1-based; column 0 means "whole line".
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column = 0)
        : Error(msg + " (line " + std::to_string(line) +
                (column > 0 ? ", column " + std::to_string(column) : "") + ")"),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Input exceeds a configured resource cap (e.g. dense distance matrix size).
class CapacityError : public Error {
public:
    using Error::Error;
};

// Two inputs that must describe the same node universe disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// A quality score has no defined value for the given input.
class UndefinedScoreError : public Error {
public:
    using Error::Error;
};

}  // namespace callrisk
