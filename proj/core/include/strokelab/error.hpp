#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strokelab {

enum class Errc {
  // ingest
  MissingColumn,
  EmptyFile,
  NonMonotoneTime,
  AllMissing,
  IoError,
  // preprocess
  EmptySeries,
  BadK,
  DegenerateData,
  DimensionMismatch,
  // segment
  BadRange,
  TooShort,
  NoSwingsFound,
  // svm
  SingleClass,
  // eval
  LabelOutOfRange,
  LengthMismatch,
  SingleClassLabels,
  TooFewParticipants,
  // synth
  BadProfile,
  // configuration / schema problems in user-supplied files
  BadConfig,
  BadFormat,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the Errc kinds so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  /// The message without the leading error-kind name.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace strokelab
