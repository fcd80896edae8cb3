#pragma once

#include "lsqflow/io/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace lsqflow::io {

struct RunOptions {
  /// Simulations always write here ("." when unset); reports only when set.
  std::optional<std::string> out_dir;
  std::optional<std::string> plot;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDiverged = 2;

/// Executes one configured run. Errors are reported on `err` as a JSON envelope.
int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace lsqflow::io
