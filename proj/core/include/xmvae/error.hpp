#pragma once

#include <stdexcept>
#include <string>

namespace xmvae {

/// Shape or rank disagreement between operands. Signals a caller bug.
class ShapeError : public std::logic_error {
 public:
  explicit ShapeError(const std::string& what) : std::logic_error(what) {}
};

/// Input outside an operation's mathematical domain (log of a non-positive
/// value, keypoint behind the camera, degenerate reference bone, joint angle
/// outside its limit).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation produced a non-finite value where the contract requires
/// finite results, e.g. a diverging training loss.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed persisted data: dataset records, checkpoints, config files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (missing file, unwritable path).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user-facing argument (CLI flag, config key).
class InvalidArgument : public std::runtime_error {
 public:
  explicit InvalidArgument(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xmvae
