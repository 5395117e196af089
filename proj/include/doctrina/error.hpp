#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace doctrina {

/// How a failure should be read by callers: the input broke a law, the
/// instance is too truncated to decide, or the request itself was malformed.
enum class ErrorClass { Invalid, Unverifiable, Input };

struct Violation {
    std::string law;
    std::string witness;
};

/// Every structured failure raised by the library. `code` is a stable
/// identifier such as "MissingStructure" or "NonAssociative".
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string detail, std::vector<Violation> violations = {});

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::vector<Violation>& violations() const noexcept { return violations_; }
    ErrorClass error_class() const noexcept;
    bool has_violation(const std::string& law) const;

private:
    std::string code_;
    std::string detail_;
    std::vector<Violation> violations_;
};

[[noreturn]] void fail(const std::string& code, const std::string& detail);
[[noreturn]] void missing_structure(const std::string& detail);

}  // namespace doctrina
