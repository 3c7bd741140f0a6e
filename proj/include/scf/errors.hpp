#pragma once

#include <stdexcept>
#include <string>

namespace scf {

// Bad user-supplied data: files, datasets, stimuli.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: parameter domains, shape mismatches, config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss or otherwise diverged.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scf
