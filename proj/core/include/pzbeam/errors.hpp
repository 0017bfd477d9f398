#ifndef PZBEAM_ERRORS_HPP
#define PZBEAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pzbeam {

/// Base class for all pzbeam errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class NonPositiveParameterError : public Error {
public:
    using Error::Error;
};

class IndefiniteCouplingError : public Error {
public:
    using Error::Error;
};

class NegativeGainError : public Error {
public:
    using Error::Error;
};

/// eps1*C1 >= 1 or eps2*C2 >= 1: the Lyapunov/energy equivalence degenerates.
class EquivalenceViolatedError : public Error {
public:
    using Error::Error;
};

class GridTooCoarseError : public Error {
public:
    using Error::Error;
};

class SolveFailureError : public Error {
public:
    using Error::Error;
};

class EigenFailureError : public Error {
public:
    using Error::Error;
};

class TraceTooShortError : public Error {
public:
    using Error::Error;
};

class NonPositiveEnergyError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Config syntax problem; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Config value outside its admissible range; carries the offending key.
class RangeError : public Error {
public:
    RangeError(const std::string& msg, std::string key)
        : Error(msg + " [key: " + key + "]"), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pzbeam

#endif
