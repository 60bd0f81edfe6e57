#pragma once

#include <stdexcept>
#include <string>

namespace namegender {

// Caller broke a documented precondition. Maps to a bug, not bad input.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file. Carries file, 1-based line and column.
class ParseError : public Error {
public:
    ParseError(std::string file, long line, long column, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          file_(std::move(file)), line_(line), column_(column) {}

    const std::string& file() const noexcept { return file_; }
    long line() const noexcept { return line_; }
    long column() const noexcept { return column_; }

private:
    std::string file_;
    long line_;
    long column_;
};

class EmptyNameError : public Error {
public:
    explicit EmptyNameError(const std::string& what = "name is empty") : Error(what) {}
};

class EmptyDatabaseError : public Error {
public:
    explicit EmptyDatabaseError(const std::string& what) : Error(what) {}
};

class EmptyDatasetError : public Error {
public:
    explicit EmptyDatasetError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Could not reach the upstream at all (DNS, refused, replay with network off).
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what) : Error(what) {}
};

// Upstream answered with a non-2xx status.
class UpstreamError : public Error {
public:
    UpstreamError(int status, const std::string& what)
        : Error("upstream status " + std::to_string(status) + ": " + what), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

// Upstream answered 2xx but the body is not what the contract promises.
class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& what) : Error(what) {}
};

// Replay mode and no cached response / fixture file for the key.
class MissingFixtureError : public Error {
public:
    MissingFixtureError(std::string backend, std::string query)
        : Error("no cached response or fixture for (" + backend + ", " + query + ")"),
          backend_(std::move(backend)), query_(std::move(query)) {}

    const std::string& backend() const noexcept { return backend_; }
    const std::string& query() const noexcept { return query_; }

private:
    std::string backend_;
    std::string query_;
};

}  // namespace namegender
