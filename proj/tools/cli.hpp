#ifndef EOS_TOOLS_CLI_HPP
#define EOS_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace eos {

// exit codes: 0 success, 1 verification or state-sanity failure, 2 usage or config error
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eos

#endif
