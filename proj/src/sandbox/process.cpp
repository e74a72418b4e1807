#include "xlr/sandbox/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "xlr/error.hpp"

namespace xlr::sandbox {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void child_fail(int err_fd) {
  int e = errno;
  ssize_t ignored = write(err_fd, &e, sizeof(e));
  (void)ignored;
  _exit(127);
}

}  // namespace

fs::path find_executable(std::string_view name) {
  if (name.empty()) return {};
  if (name.find('/') != std::string_view::npos) {
    fs::path p(name);
    return access(p.c_str(), X_OK) == 0 ? fs::absolute(p) : fs::path{};
  }
  const char* path_env = std::getenv("PATH");
  std::string path = path_env != nullptr ? path_env : "/usr/local/bin:/usr/bin:/bin";
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    fs::path candidate = fs::path(dir) / std::string(name);
    if (access(candidate.c_str(), X_OK) == 0 && !fs::is_directory(candidate)) return candidate;
  }
  return {};
}

ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& cwd,
                          const fs::path& io_dir, std::string_view stdin_data,
                          const ProcessLimits& limits) {
  if (argv.empty()) throw PreconditionError("run_process: empty command");
  const fs::path exe = find_executable(argv[0]);
  if (exe.empty()) throw EnvironmentError("toolchain binary not found: " + argv[0]);

  const fs::path in_path = io_dir / ".stdin";
  const fs::path out_path = io_dir / ".stdout";
  const fs::path err_path = io_dir / ".stderr";
  {
    std::ofstream in(in_path, std::ios::binary | std::ios::trunc);
    in.write(stdin_data.data(), static_cast<std::streamsize>(stdin_data.size()));
    if (!in) throw EnvironmentError("cannot write stdin file in " + io_dir.string());
  }

  // Everything the child touches is prepared before fork().
  std::vector<std::string> env_strings = {"LANG=C.UTF-8", "HOME=" + cwd.string()};
  // Only variables that locate toolchains pass through (rustup proxies need RUSTUP_HOME).
  for (const char* name : {"PATH", "RUSTUP_HOME", "CARGO_HOME", "RUSTUP_TOOLCHAIN", "GEM_HOME", "GEM_PATH"}) {
    if (const char* v = std::getenv(name)) env_strings.push_back(std::string(name) + "=" + v);
  }
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::vector<std::string> args = argv;
  std::vector<char*> c_argv;
  for (auto& a : args) c_argv.push_back(a.data());
  c_argv.push_back(nullptr);
  const std::string exe_str = exe.string();
  const std::string cwd_str = cwd.string();
  const std::string in_str = in_path.string();
  const std::string out_str = out_path.string();
  const std::string err_str = err_path.string();

  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0) throw EnvironmentError("pipe2 failed");

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    throw EnvironmentError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    close(err_pipe[0]);
    setpgid(0, 0);
    if (chdir(cwd_str.c_str()) != 0) child_fail(err_pipe[1]);
    int in_fd = open(in_str.c_str(), O_RDONLY);
    int out_fd = open(out_str.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    int err_fd = open(err_str.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (in_fd < 0 || out_fd < 0 || err_fd < 0) child_fail(err_pipe[1]);
    if (dup2(in_fd, 0) < 0 || dup2(out_fd, 1) < 0 || dup2(err_fd, 2) < 0) child_fail(err_pipe[1]);
    rlimit rl{};
    rl.rlim_cur = rl.rlim_max = 0;
    setrlimit(RLIMIT_CORE, &rl);
    if (limits.cpu_limit_s > 0) {
      rl.rlim_cur = static_cast<rlim_t>(std::ceil(limits.cpu_limit_s));
      rl.rlim_max = rl.rlim_cur + 1;
      setrlimit(RLIMIT_CPU, &rl);
    }
    if (limits.memory_bytes > 0) {
      rl.rlim_cur = rl.rlim_max = limits.memory_bytes;
      setrlimit(RLIMIT_AS, &rl);
    }
    if (limits.max_output_bytes > 0) {
      rl.rlim_cur = rl.rlim_max = limits.max_output_bytes;
      setrlimit(RLIMIT_FSIZE, &rl);
    }
    execve(exe_str.c_str(), c_argv.data(), envp.data());
    child_fail(err_pipe[1]);
  }

  close(err_pipe[1]);
  setpgid(pid, pid);

  ProcessResult result;
  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(limits.wall_timeout_s));
  int status = 0;
  auto nap = std::chrono::microseconds(200);
  while (true) {
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      break;
    }
    std::this_thread::sleep_for(nap);
    nap = std::min(nap * 2, std::chrono::microseconds(10000));
  }
  // Stray grandchildren go with the group.
  kill(-pid, SIGKILL);
  result.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int child_errno = 0;
  const ssize_t n = read(err_pipe[0], &child_errno, sizeof(child_errno));
  close(err_pipe[0]);
  if (n == static_cast<ssize_t>(sizeof(child_errno))) {
    throw EnvironmentError("cannot start " + argv[0] + ": " + std::strerror(child_errno));
  }

  if (WIFSIGNALED(status)) {
    result.term_signal = WTERMSIG(status);
    if (result.term_signal == SIGXCPU) result.timed_out = true;
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  }
  result.stdout_text = read_file(out_path);
  result.stderr_text = read_file(err_path);
  return result;
}

ScratchDir::ScratchDir(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  std::string tmpl = (root / "run-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) {
    throw EnvironmentError("cannot create scratch directory under " + root.string() + ": " +
                           std::strerror(errno));
  }
  path_ = tmpl;
}

ScratchDir::ScratchDir(ScratchDir&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }

ScratchDir::~ScratchDir() {
  if (path_.empty()) return;
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace xlr::sandbox
