#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fingerloc {

// Broad failure classes. Each maps onto one process exit code in the CLI.
enum class ErrorKind { kConfig, kData, kNumerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// Raised by a CSV reader; carries the 1-based line number of the bad row.
class RowError : public DataError {
 public:
  RowError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

// Layer shape incompatibility. Treated as a configuration problem.
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DivergedError : public NumericalError {
 public:
  DivergedError(int epoch, std::size_t batch, double loss)
      : NumericalError("training diverged at epoch " + std::to_string(epoch) +
                       ", batch " + std::to_string(batch) +
                       " (loss=" + std::to_string(loss) + ")"),
        epoch_(epoch),
        batch_(batch),
        loss_(loss) {}

  int epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }
  double loss() const { return loss_; }

 private:
  int epoch_;
  std::size_t batch_;
  double loss_;
};

// 0 ok, 2 config, 3 data, 4 numerical.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
  }
  return 1;
}

}  // namespace fingerloc
