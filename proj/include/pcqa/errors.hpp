#pragma once

#include <stdexcept>
#include <string>

namespace pcqa {

// Exit codes used by the CLI: 2 input error, 3 model error, 4 internal.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 2;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 3;
};

class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 4;
};

struct MissingFile : InputError {
  using InputError::InputError;
};
struct MissingProperty : InputError {
  using InputError::InputError;
};
struct MalformedHeader : InputError {
  using InputError::InputError;
};
struct TruncatedBody : InputError {
  using InputError::InputError;
};
struct AlreadyConverted : InputError {
  using InputError::InputError;
};
struct EmptyCloud : InputError {
  using InputError::InputError;
};
struct ConstantInput : InputError {
  using InputError::InputError;
};
struct NoDifferentPairs : InputError {
  using InputError::InputError;
};
struct BadArgument : InputError {
  using InputError::InputError;
};

struct LayoutMismatch : ModelError {
  using ModelError::ModelError;
};
struct VersionMismatch : ModelError {
  using ModelError::ModelError;
};
struct CorruptFile : ModelError {
  using ModelError::ModelError;
};

}  // namespace pcqa
