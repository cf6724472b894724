#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geograph {

// Runs one subcommand (extract, osm2graph, geocnet, corrnet, flownet,
// metrics, export). `args` excludes the program name. Returns 0 on success,
// 1 on input errors (one-line diagnostic on `err`), 2 on internal errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geograph
