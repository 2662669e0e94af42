#pragma once

#include <stdexcept>
#include <string>

namespace valrig {

// Error kinds map 1:1 onto the CLI exit codes (see tools/).
enum class ErrorKind {
    validation = 1,       // bad input, mismatched arguments, refused preconditions
    generation = 2,       // search/generation budget exhausted
    invariant_breach = 3, // internal inconsistency that should be impossible
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error validation_error(const std::string& msg) { return Error(ErrorKind::validation, msg); }
inline Error generation_error(const std::string& msg) { return Error(ErrorKind::generation, msg); }
inline Error breach_error(const std::string& msg) { return Error(ErrorKind::invariant_breach, msg); }

} // namespace valrig
