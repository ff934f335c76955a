#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vcore::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Environment variable naming the default data directory; `--store` falls
/// back to `$VCORE_DATA_DIR/corpus.vcs`.
inline constexpr const char* kDataDirEnv = "VCORE_DATA_DIR";

/// Exit codes: 0 success, 1 data error, 2 usage error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same as above; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vcore::cli
