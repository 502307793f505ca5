#pragma once

#include <stdexcept>
#include <string>

namespace geoaudit {

// Coarse failure classes. The CLI maps Config/Data/Numeric onto exit codes 1/2/3.
enum class ErrorKind {
    Config,
    Data,
    Numeric,
    Argument,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace geoaudit
