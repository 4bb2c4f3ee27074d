#pragma once

#include <stdexcept>
#include <string>

namespace optilock {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// sign(0), sign_a(0, 0) and friends.
class UndefinedInputError : public Error {
public:
    using Error::Error;
};

// Arity / dimension mismatches.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Cycles in a network graph.
class TopologyError : public Error {
public:
    using Error::Error;
};

// Laser asked to lock onto a zero field.
class NoLockingError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double t_fail)
        : Error(what), t_fail_(t_fail) {}
    double time_of_failure() const { return t_fail_; }

private:
    double t_fail_;
};

class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double cond)
        : Error(what), cond_(cond) {}
    double condition_number() const { return cond_; }

private:
    double cond_;
};

// Malformed documents; message carries the field path.
class SchemaError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace optilock
