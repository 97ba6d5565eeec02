#include "qtube/error.hpp"

namespace qtube {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::OutsideTube: return "OutsideTube";
    case ErrorKind::Inadmissible: return "Inadmissible";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::IndexError: return "IndexError";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotAnnulus: return "NotAnnulus";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::A2Violated: return "A2Violated";
    case ErrorKind::TailDominates: return "TailDominates";
    case ErrorKind::NoNegativeQ: return "NoNegativeQ";
    case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorKind::OutOfBudget: return "OutOfBudget";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qtube
