#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace facestat {

enum class ErrorCode {
  Decode,
  OutOfBounds,
  TooSmall,
  Domain,
  NonConvergence,
  DegenerateInput,
  DegenerateLandmarks,
  EmptyIntersection,
  InsufficientImages,
  EmptyInput,
  UndefinedInput,
  MissingClassDir,
  EmptyClass,
  InsufficientSamples,
  Io,
  EmptySpec,
  NegativeValue,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure the library reports on purpose carries one of the codes
/// above. Anything else escaping the library is an internal error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InsufficientImagesError : public Error {
 public:
  InsufficientImagesError(std::string class_name, std::size_t shortfall,
                          const std::string& what)
      : Error(ErrorCode::InsufficientImages, what),
        class_name_(std::move(class_name)),
        shortfall_(shortfall) {}

  const std::string& class_name() const noexcept { return class_name_; }
  std::size_t shortfall() const noexcept { return shortfall_; }

 private:
  std::string class_name_;
  std::size_t shortfall_;
};

}  // namespace facestat
