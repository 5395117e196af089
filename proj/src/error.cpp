#include "doctrina/error.hpp"

#include <algorithm>

namespace doctrina {

namespace {

std::string render(const std::string& code, const std::string& detail,
                   const std::vector<Violation>& violations) {
    std::string out = code;
    if (!detail.empty()) out += ": " + detail;
    for (const auto& v : violations) out += "\n  " + v.law + " " + v.witness;
    return out;
}

}  // namespace

Error::Error(std::string code, std::string detail, std::vector<Violation> violations)
    : std::runtime_error(render(code, detail, violations)),
      code_(std::move(code)),
      detail_(std::move(detail)),
      violations_(std::move(violations)) {}

ErrorClass Error::error_class() const noexcept {
    if (code_ == "MissingStructure" || code_ == "SizeCap" || code_ == "BudgetExceeded" ||
        code_ == "Unverifiable")
        return ErrorClass::Unverifiable;
    if (code_ == "ParseError" || code_ == "UnresolvedRef" || code_ == "Usage" ||
        code_ == "UnsupportedTheorem")
        return ErrorClass::Input;
    return ErrorClass::Invalid;
}

bool Error::has_violation(const std::string& law) const {
    return std::any_of(violations_.begin(), violations_.end(),
                       [&](const Violation& v) { return v.law == law; });
}

void fail(const std::string& code, const std::string& detail) { throw Error(code, detail); }

void missing_structure(const std::string& detail) { throw Error("MissingStructure", detail); }

}  // namespace doctrina
