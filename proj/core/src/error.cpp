#include "strokelab/error.hpp"

namespace strokelab {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::NonMonotoneTime: return "NonMonotoneTime";
    case Errc::AllMissing: return "AllMissing";
    case Errc::IoError: return "IoError";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::BadK: return "BadK";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::BadRange: return "BadRange";
    case Errc::TooShort: return "TooShort";
    case Errc::NoSwingsFound: return "NoSwingsFound";
    case Errc::SingleClass: return "SingleClass";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SingleClassLabels: return "SingleClassLabels";
    case Errc::TooFewParticipants: return "TooFewParticipants";
    case Errc::BadProfile: return "BadProfile";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace strokelab
