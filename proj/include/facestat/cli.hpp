#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "facestat/preprocess.hpp"
#include "facestat/stats.hpp"

namespace facestat {

struct Config {
  std::filesystem::path root;
  std::filesystem::path landmarks;
  std::filesystem::path out;
  double lo = kFrontalLo;
  double hi = kFrontalHi;
  int size = kFaceSize;
  SplitCounts counts;
  std::uint64_t seed = 0;
  double cap = kDefaultNegLogCap;
  unsigned workers = 0;  ///< 0 = hardware concurrency
  std::filesystem::path predictions;
  std::filesystem::path report;
  bool whole_image_only = false;
};

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

int cmd_preprocess(const Config& config, std::ostream& out);
int cmd_analyze(const Config& config, std::ostream& out);
int cmd_eval(const Config& config, std::ostream& out);
int cmd_plot(const Config& config, std::ostream& out);

/// Full command line (args[0] is the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace facestat
