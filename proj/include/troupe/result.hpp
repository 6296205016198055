#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace troupe {

// Machine-readable failure. `code` is a stable identifier ("transport",
// "script-exhausted", "missing-binding", ...); `message` is for humans.
struct Error {
    std::string code;
    std::string message;

    std::string to_string() const { return message.empty() ? code : code + ": " + message; }
};

inline Error make_error(std::string code, std::string message = {}) {
    return Error{std::move(code), std::move(message)};
}

// Value-or-Error. Operations whose failures are protocol data (parse errors,
// script exhaustion, validation rejects) return Result instead of throwing.
template <typename T>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error err) : v_(std::move(err)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::logic_error("Result::value on error: " + error().to_string());
        return std::get<T>(v_);
    }
    T& value() & {
        if (!ok()) throw std::logic_error("Result::value on error: " + error().to_string());
        return std::get<T>(v_);
    }
    T&& take() && {
        if (!ok()) throw std::logic_error("Result::take on error: " + error().to_string());
        return std::get<T>(std::move(v_));
    }

    const Error& error() const {
        if (ok()) throw std::logic_error("Result::error on ok value");
        return std::get<Error>(v_);
    }

private:
    std::variant<T, Error> v_;
};

struct Unit {};
using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

}  // namespace troupe
