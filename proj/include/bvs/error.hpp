#pragma once

#include <stdexcept>
#include <string>

namespace bvs {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
    config = 2,
    data = 3,
    numeric = 4,
    resource_cap = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return {ErrorKind::config, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::data, what}; }
inline Error numeric_error(const std::string& what) { return {ErrorKind::numeric, what}; }
inline Error cap_error(const std::string& what) { return {ErrorKind::resource_cap, what}; }

}  // namespace bvs
