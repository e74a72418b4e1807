#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace xlr::sandbox {

struct ProcessLimits {
  double wall_timeout_s = 10.0;
  double cpu_limit_s = 0.0;          // 0: no RLIMIT_CPU
  std::uint64_t memory_bytes = 0;    // 0: no RLIMIT_AS
  std::uint64_t max_output_bytes = 64ull << 20;
};

struct ProcessResult {
  int exit_code = 0;    // meaningful when term_signal == 0
  int term_signal = 0;  // signal that terminated the child, 0 if it exited
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;
  double duration_s = 0.0;
};

// Resolves argv[0] against PATH. Empty when not found.
std::filesystem::path find_executable(std::string_view name);

// Runs argv in its own process group with `cwd` as working directory, a
// minimal environment (HOME, LANG, PATH and the toolchain-locating
// RUSTUP_HOME, CARGO_HOME, RUSTUP_TOOLCHAIN, GEM_HOME, GEM_PATH) and the given
// resource limits.
// stdin/stdout/stderr go through files in `io_dir`. The whole process group
// is killed at the wall-clock deadline. Throws EnvironmentError when the
// executable cannot be found or started.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          const std::filesystem::path& io_dir, std::string_view stdin_data,
                          const ProcessLimits& limits);

// A fresh private directory, removed with its contents on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::filesystem::path& root);
  ~ScratchDir();
  ScratchDir(ScratchDir&& other) noexcept;
  ScratchDir& operator=(ScratchDir&&) = delete;
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace xlr::sandbox
