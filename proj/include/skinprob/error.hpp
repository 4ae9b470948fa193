#pragma once

#include <stdexcept>
#include <string>

namespace skinprob {

enum class ErrorKind {
    io,
    format,
    empty_training_set,
    no_skin_region,
    invalid_pose,
    infeasible_params,
    invalid_argument,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failure classes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace skinprob
