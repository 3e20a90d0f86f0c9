#pragma once

#include <stdexcept>
#include <string>

namespace camo {

// Base class for all domain errors raised by the toolchain. CLI maps these
// to exit code 1; usage errors (bad flags, missing args) map to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Netlist text that fails to lex/parse. Carries 1-based line/column.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " at line " + std::to_string(line) + ", column " +
                std::to_string(col)),
          line(line),
          col(col) {}
    int line;
    int col;
};

// Structurally invalid netlist: undeclared or multiply-driven nets, arity
// violations, dangling nets, combinational cycles.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace camo
