#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace synclab::cli {

enum ExitCode : int { kOk = 0, kCertificateFail = 1, kInputError = 2, kNumericalError = 3 };

/// Entry point of the `synclab` tool. Data goes to `out` (or files under
/// --output-dir), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// SYNCLAB_THREADS if set, else the hardware concurrency (at least 1).
/// Throws InputError on a malformed value.
std::size_t default_threads();

/// "0:50" is the range [0, 50); entries are separated by commas.
std::vector<unsigned long long> parse_seed_list(const std::string& s);

}  // namespace synclab::cli
