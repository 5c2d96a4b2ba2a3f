#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace modernize {

/// Error with a stable machine-readable code plus a human message.
/// Codes are SCREAMING_SNAKE tokens (e.g. "EMPTY_SOURCE_SET").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Round a non-negative percentage half-up to one decimal place.
/// 9.375 -> 9.4, 16.666 -> 16.7, 76.923 -> 76.9.
double round1(double value);

/// COBOL data name -> modern field name: `ACCOUNT-STATUS` -> `account_status`.
std::string to_field_name(const std::string& cobol_name);

/// COBOL paragraph name -> operation name: `VALIDATE-ORDER` -> `ValidateOrder`.
std::string to_operation_name(const std::string& paragraph_name);

/// Operation name -> error-class token: `RejectTxn` -> `REJECT-TXN`.
/// Inverse of to_operation_name up to case; used for error-edge classes.
std::string to_error_class(const std::string& operation_name);

/// Lowercase, trim, collapse internal whitespace runs to single spaces.
std::string normalize_text(const std::string& text);

std::string to_upper(std::string s);
std::string to_lower(std::string s);
std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
bool starts_with(const std::string& s, const std::string& prefix);
bool ends_with(const std::string& s, const std::string& suffix);

} // namespace modernize
