#pragma once

#include <stdexcept>
#include <string>

namespace qiembed {

/// Base of every error raised by the library. `kind()` is the stable
/// machine-readable name that reports and the CLI print.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), message_(what) {}
  const std::string& kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

  /// Same kind, message prefixed with where it happened.
  Error with_context(const std::string& where) const { return Error(kind_, where + ": " + message_); }

 private:
  std::string kind_, message_;
};

#define QIEMBED_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

QIEMBED_DEFINE_ERROR(ArithmeticError);
QIEMBED_DEFINE_ERROR(ArithmeticOverflow);
QIEMBED_DEFINE_ERROR(ParseError);

// root_systems
QIEMBED_DEFINE_ERROR(IllegalType);
QIEMBED_DEFINE_ERROR(RootNotInSystem);
QIEMBED_DEFINE_ERROR(PostconditionViolated);

// coxeter_sphere
QIEMBED_DEFINE_ERROR(RankTooLarge);
QIEMBED_DEFINE_ERROR(WrongCardinality);
QIEMBED_DEFINE_ERROR(NotFound);
QIEMBED_DEFINE_ERROR(DegenerateBarycenter);

// symmetric_embedding
QIEMBED_DEFINE_ERROR(NotSPD);
QIEMBED_DEFINE_ERROR(EmptyBin);

// tree_building
QIEMBED_DEFINE_ERROR(InvalidAddress);
QIEMBED_DEFINE_ERROR(NotAsymptotic);
QIEMBED_DEFINE_ERROR(NoSharedChamber);

// padic_building
QIEMBED_DEFINE_ERROR(SingularBasis);
QIEMBED_DEFINE_ERROR(RadiusTooLarge);
QIEMBED_DEFINE_ERROR(DisconnectedXDelta);

// cli_reports
QIEMBED_DEFINE_ERROR(ConfigError);

#undef QIEMBED_DEFINE_ERROR

}  // namespace qiembed
