#pragma once

#include <stdexcept>
#include <string>

namespace netbench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse failure in any of the line-oriented file formats. `line` is 1-based.
class SyntaxError : public Error {
public:
    SyntaxError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class DuplicateDeviceError : public SyntaxError {
public:
    DuplicateDeviceError(int line, const std::string& name)
        : SyntaxError(line, "duplicate device '" + name + "'") {}
};

class DanglingLinkEndpointError : public SyntaxError {
public:
    DanglingLinkEndpointError(int line, const std::string& endpoint)
        : SyntaxError(line, "link endpoint '" + endpoint + "' does not exist") {}
};

class PastEventError : public Error {
public:
    PastEventError(double t, double now)
        : Error("event time " + std::to_string(t) + " is before the clock at " + std::to_string(now)) {}
};

class UnknownMetricError : public Error {
public:
    explicit UnknownMetricError(const std::string& metric)
        : Error("unknown metric '" + metric + "'") {}
};

class UnknownEndpointError : public Error {
public:
    explicit UnknownEndpointError(const std::string& name)
        : Error("unknown endpoint '" + name + "'") {}
};

class UnknownServiceError : public Error {
public:
    explicit UnknownServiceError(const std::string& name)
        : Error("unknown service '" + name + "'") {}
};

class UnknownTargetError : public Error {
public:
    explicit UnknownTargetError(const std::string& target)
        : Error("unknown control target '" + target + "'") {}
};

class EmptySamplesError : public Error {
public:
    EmptySamplesError() : Error("empty sample set") {}
};

class NoDataError : public Error {
public:
    NoDataError() : Error("no data matches the selection") {}
    explicit NoDataError(const std::string& selection)
        : Error("no data matches the selection '" + selection + "'") {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace netbench
