#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergoflux {

// Every failure maps onto one of these; the CLI turns them into exit codes.
enum class ErrorCategory {
    domain,
    dimension,
    numeric,
    model,
    ordering,
    precondition,
    config_syntax,
    config_schema,
    physics,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& what) : std::runtime_error(what), cat_(cat) {}
    ErrorCategory category() const noexcept { return cat_; }

private:
    ErrorCategory cat_;
};

[[noreturn]] inline void fail(ErrorCategory cat, const std::string& what) { throw Error(cat, what); }

inline std::string_view category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::model: return "model";
    case ErrorCategory::ordering: return "ordering";
    case ErrorCategory::precondition: return "precondition";
    case ErrorCategory::config_syntax: return "config_syntax";
    case ErrorCategory::config_schema: return "config_schema";
    case ErrorCategory::physics: return "physics";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

// 1 is left for uncategorised failures, 2 for usage errors from the arg parser
inline int exit_code(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::domain: return 10;
    case ErrorCategory::dimension: return 11;
    case ErrorCategory::numeric: return 12;
    case ErrorCategory::model: return 13;
    case ErrorCategory::ordering: return 14;
    case ErrorCategory::precondition: return 15;
    case ErrorCategory::config_syntax: return 20;
    case ErrorCategory::config_schema: return 21;
    case ErrorCategory::physics: return 22;
    case ErrorCategory::io: return 30;
    }
    return 1;
}

} // namespace ergoflux
