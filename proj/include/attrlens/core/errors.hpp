#pragma once

#include <stdexcept>
#include <string>

namespace attrlens {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A model response could not be parsed into the expected shape.
struct ParseError : Error {
    using Error::Error;
};

/// A backend request failed after retries were exhausted.
struct BackendError : Error {
    int status = 0;
    std::string body;

    explicit BackendError(const std::string& msg, int status_code = 0, std::string response_body = "")
        : Error(msg), status(status_code), body(std::move(response_body)) {}
};

/// An API key environment variable is configured but not set.
struct AuthError : Error {
    using Error::Error;
};

/// Image bytes are empty or unreadable.
struct DecodeError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

/// A command was run out of order (e.g. annotate before review).
struct WorkflowError : Error {
    using Error::Error;
};

struct InvalidAssignment : Error {
    using Error::Error;
};

// Analysis input errors.
struct EmptyInput : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct UnknownCategory : Error {
    using Error::Error;
};

struct MissingClassLabel : Error {
    std::string image_id;

    explicit MissingClassLabel(std::string id)
        : Error("image has no class label: " + id), image_id(std::move(id)) {}
};

struct SchemaMismatch : Error {
    using Error::Error;
};

struct CoverageError : Error {
    using Error::Error;
};

struct EmptyIntersection : Error {
    using Error::Error;
};

}  // namespace attrlens
