#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace surfalg {

// Exit-code family carried by every library error.
enum class ErrorKind { Parse = 2, Validation = 2, Hypothesis = 3, Computation = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string name, const std::string& detail)
        : std::runtime_error(name + ": " + detail), kind_(kind), name_(std::move(name)) {}
    ErrorKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int exitCode() const { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
    std::string name_;
};

inline Error parseError(const std::string& d) { return Error(ErrorKind::Parse, "ParseError", d); }
inline Error mapInconsistent(const std::string& d) { return Error(ErrorKind::Validation, "MapInconsistent", d); }
inline Error hypothesis(const std::string& name, const std::string& d) {
    return Error(ErrorKind::Hypothesis, name, d);
}
inline Error computation(const std::string& name, const std::string& d) {
    return Error(ErrorKind::Computation, name, d);
}

}  // namespace surfalg
