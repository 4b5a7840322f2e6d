#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGradient : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class JetDepthExceeded : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition (off-surface point, bad size, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class NonTriangleFace : public Error {
public:
    using Error::Error;
};

class NonManifoldMesh : public Error {
public:
    using Error::Error;
};

class DegenerateTriangle : public Error {
public:
    using Error::Error;
};

class RankDeficientPatch : public Error {
public:
    using Error::Error;
};

class ParameterOutOfRange : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Invalid study configuration; `key()` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace biharm
