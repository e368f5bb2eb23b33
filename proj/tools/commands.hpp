#ifndef MORREYLAB_COMMANDS_HPP_
#define MORREYLAB_COMMANDS_HPP_

#include <string>
#include <vector>

#include "config.hpp"

namespace morreylab {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

/// Files written into the output directory, in order.
class Outputs {
 public:
  explicit Outputs(std::string dir);
  void write(const std::string& name, const std::string& content);
  const std::string& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

int cmd_beta_table(const RunConfig& cfg, Outputs& out);
int cmd_aronsson(const RunConfig& cfg, Outputs& out);
int cmd_solve(const RunConfig& cfg, Outputs& out);
int cmd_analyze(const RunConfig& cfg, Outputs& out);
/// `inject_fault` perturbs the profile data before the identity checks.
int cmd_verify(const RunConfig& cfg, Outputs& out, bool inject_fault);

}  // namespace morreylab

#endif  // MORREYLAB_COMMANDS_HPP_
