#pragma once

#include <stdexcept>
#include <string>

namespace ladder {

/// Bad input: violated preconditions, malformed files, invalid configuration.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An external tool failed or produced output that could not be interpreted.
class ToolError : public std::runtime_error {
public:
    ToolError(const std::string& what, std::string diagnostics = {})
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace ladder
