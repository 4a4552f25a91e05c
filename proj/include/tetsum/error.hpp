#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tetsum {

enum class Errc {
  DegenerateInput,
  NoTriangle,
  NotRealizable,
  NotFourBall,
  NotPath,
  CenterNotInterior,
  ApexDegenerate,
  NotConstructible,
  BadConfiguration,
  OutOfDomain,
  NoSolution,
  ParseError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::NoTriangle: return "NoTriangle";
    case Errc::NotRealizable: return "NotRealizable";
    case Errc::NotFourBall: return "NotFourBall";
    case Errc::NotPath: return "NotPath";
    case Errc::CenterNotInterior: return "CenterNotInterior";
    case Errc::ApexDegenerate: return "ApexDegenerate";
    case Errc::NotConstructible: return "NotConstructible";
    case Errc::BadConfiguration: return "BadConfiguration";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::NoSolution: return "NoSolution";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tetsum
