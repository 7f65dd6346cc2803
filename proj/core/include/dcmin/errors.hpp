#pragma once

#include <stdexcept>
#include <string>

namespace dcmin {

// Two roots so the CLI can map failures onto exit codes: configuration
// problems exit with 2, data/artifact problems with 3. Everything else
// (domain errors raised by the numerical core) derives from Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

// battery_model
class InvalidSoc : public Error {
public:
    using Error::Error;
};

class DischargeDomainError : public Error {
public:
    using Error::Error;
};

// tariff_billing
class LengthMismatch : public DataError {
public:
    using DataError::DataError;
};

class NegativePeak : public Error {
public:
    using Error::Error;
};

class EmptyInput : public DataError {
public:
    using DataError::DataError;
};

// grid_mdp
class InfeasibleAction : public Error {
public:
    using Error::Error;
};

class TimeOverflow : public Error {
public:
    using Error::Error;
};

// day_dp / dpi
class BadTraceLength : public DataError {
public:
    using DataError::DataError;
};

class PolicyUndefined : public Error {
public:
    using Error::Error;
};

class EmptyTrainingSet : public DataError {
public:
    using DataError::DataError;
};

// data_io
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MissingStep : public DataError {
public:
    using DataError::DataError;
};

class NegativePower : public DataError {
public:
    using DataError::DataError;
};

class ArtifactMismatch : public DataError {
public:
    using DataError::DataError;
};

}  // namespace dcmin
