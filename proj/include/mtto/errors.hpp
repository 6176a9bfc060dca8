#ifndef MTTO_ERRORS_HPP
#define MTTO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mtto {

/// Base of every error raised by the library. `kind()` is the stable
/// machine-readable name written into campaign reports.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define MTTO_DEFINE_ERROR(Name)                                                \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(#Name, what) {}             \
  };

MTTO_DEFINE_ERROR(GridError)
MTTO_DEFINE_ERROR(ShapeError)
MTTO_DEFINE_ERROR(SpecError)
MTTO_DEFINE_ERROR(NotInner)
MTTO_DEFINE_ERROR(GridTooCoarse)
MTTO_DEFINE_ERROR(DomainError)
MTTO_DEFINE_ERROR(DimensionMismatch)
MTTO_DEFINE_ERROR(AliasError)
MTTO_DEFINE_ERROR(UnsupportedDomain)

#undef MTTO_DEFINE_ERROR

/// Configuration error carrying the JSON pointer of the offending node.
class ConfigError : public Error {
public:
  ConfigError(std::string pointer, const std::string& what)
      : Error("ConfigError", pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

private:
  std::string pointer_;
};

} // namespace mtto

#endif // MTTO_ERRORS_HPP
