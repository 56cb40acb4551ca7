#pragma once

#include <stdexcept>
#include <string>

namespace aisplan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model, table or argument violates a documented invariant.
class ModelError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0, std::size_t column = 0)
        : Error(line ? msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"
                     : msg),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

class ImpossibleObservation : public Error {
public:
    using Error::Error;
};

/// Enumeration or reachable-set size went beyond its cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Training aborted because the parameter norm blew up.
class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace aisplan
