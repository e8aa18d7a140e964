#pragma once

#include <stdexcept>
#include <string>

namespace qdt {

// Base of every error the library throws. `code()` is a short stable token
// used by the CLI for machine-parsable error lines.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error("data", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("parse", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace qdt
