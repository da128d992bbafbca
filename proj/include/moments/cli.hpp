#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moments::cli {

/// Runs one command line (without the program name). The report goes to
/// `out`, diagnostics and the --verbose summary to `err`; an input path of
/// "-" reads the document from `in`. Returns 0 when every check passes, 1
/// when a check fails, 2 on input or usage errors.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace moments::cli
