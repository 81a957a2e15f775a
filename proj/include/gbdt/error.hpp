#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbdt {

enum class ErrorKind {
    Shape,
    NonFinite,
    SpectralGap,
    NotHermitian,
    IdentityResidual,
    DuplicateShift,
    NotOrthonormal,
    SingularS,
    InvalidArgument,
    GridTooLarge,
    Parse,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace gbdt
