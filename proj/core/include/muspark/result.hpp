#ifndef MUSPARK_RESULT_HPP
#define MUSPARK_RESULT_HPP

#include <cassert>
#include <utility>
#include <variant>

namespace muspark {

// Minimal success-or-error carrier; T and E must be distinct types.
template <typename T, typename E>
class Result {
 public:
  Result(T value) : value_(std::in_place_index<0>, std::move(value)) {}
  Result(E error) : value_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return value_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<0>(value_);
  }
  const T& value() const {
    assert(ok());
    return std::get<0>(value_);
  }
  E& error() {
    assert(!ok());
    return std::get<1>(value_);
  }
  const E& error() const {
    assert(!ok());
    return std::get<1>(value_);
  }

  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, E> value_;
};

}  // namespace muspark

#endif  // MUSPARK_RESULT_HPP
