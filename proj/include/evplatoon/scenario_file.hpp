#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evplatoon/sim.hpp"

namespace evp {

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& source, int line, int column, const std::string& what);

    int line = 0;
    int column = 0;
};

// Sectioned key = value scenario format. Unknown sections or keys are
// rejected so typos in physics constants cannot pass silently. The parsed
// scenario is fully re-validated before it is returned.
Scenario parse_scenario(std::istream& in, std::string_view source_name = "<stream>");
Scenario parse_scenario_file(const std::string& path);

// Canonical form of the same format; parses back to an equal scenario.
void dump_scenario(std::ostream& out, const Scenario& scenario);

bool is_builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(std::string_view name);

// Builtin name or path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

}  // namespace evp
