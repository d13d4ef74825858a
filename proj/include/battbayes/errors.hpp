#pragma once

#include <stdexcept>
#include <string>

namespace battbayes {

// Error taxonomy for the whole library. Each type maps onto one bb_status
// code at the C boundary (see battbayes.h).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Moment parameters violate a family's constraints (e.g. Beta sd too large).
class InvalidMoments : public Error {
public:
    using Error::Error;
};

// Argument outside a deterministic sub-model's domain (t <= 0, u <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class UnknownVariable : public Error {
public:
    using Error::Error;
};

class DegenerateSeries : public Error {
public:
    using Error::Error;
};

class LagOutOfRange : public Error {
public:
    using Error::Error;
};

// Proposal kernel could not produce a valid spec after shrinking sigma_t.
class ProposalFailure : public Error {
public:
    using Error::Error;
};

class SupportViolation : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

class DegenerateData : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class TooFewPoints : public Error {
public:
    using Error::Error;
};

class IncompleteSpec : public Error {
public:
    using Error::Error;
};

class ScheduleInfeasible : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace battbayes
