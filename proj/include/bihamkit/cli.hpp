#pragma once

#include <iosfwd>

namespace bihamkit {

// Command-line front end. Verbs: verify, flow, rflow, reduce, spin, bracket,
// double-check. Results go to `out` (or --out), diagnostics to `err`.
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bihamkit
