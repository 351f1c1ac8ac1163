#pragma once

#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>

namespace dronechain {

template <class E>
struct Failure {
    E error;
};

template <class E>
Failure<std::decay_t<E>> fail(E&& e) {
    return {std::forward<E>(e)};
}

class BadResultAccess : public std::logic_error {
public:
    BadResultAccess() : std::logic_error("accessed the wrong alternative of a Result") {}
};

// Value-or-error return for expected domain failures (rejected
// transactions, invalid blocks). Programmer errors and I/O still throw.
template <class T, class E>
class Result {
public:
    Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Result(Failure<E> f) : v_(std::in_place_index<1>, std::move(f.error)) {}

    bool ok() const noexcept { return v_.index() == 0; }
    explicit operator bool() const noexcept { return ok(); }

    const T& value() const& {
        if (!ok()) throw BadResultAccess();
        return std::get<0>(v_);
    }
    T& value() & {
        if (!ok()) throw BadResultAccess();
        return std::get<0>(v_);
    }
    T&& value() && {
        if (!ok()) throw BadResultAccess();
        return std::get<0>(std::move(v_));
    }
    const E& error() const {
        if (ok()) throw BadResultAccess();
        return std::get<1>(v_);
    }

    const T* operator->() const { return &value(); }
    const T& operator*() const& { return value(); }

private:
    std::variant<T, E> v_;
};

template <class E>
class Result<void, E> {
public:
    Result() = default;
    Result(Failure<E> f) : err_(std::move(f.error)), ok_(false) {}

    bool ok() const noexcept { return ok_; }
    explicit operator bool() const noexcept { return ok_; }
    const E& error() const {
        if (ok_) throw BadResultAccess();
        return err_;
    }

private:
    E err_{};
    bool ok_ = true;
};

}  // namespace dronechain
