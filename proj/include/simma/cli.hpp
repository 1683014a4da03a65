#pragma once

namespace simma {

// Entry point behind the command-line tool. Parses argv, dispatches to the
// subcommand handlers, maps exceptions onto exit codes:
//   0/1/2  analysis verdicts (yes / no / undecided), or plain success
//   64     usage or configuration errors
//   65     domain errors (ill-posed model, non-integrable request)
//   66     I/O failures
int cli_main(int argc, char** argv);

} // namespace simma
