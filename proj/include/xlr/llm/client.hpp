#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "xlr/error.hpp"
#include "xlr/llm/cache.hpp"
#include "xlr/llm/request.hpp"
#include "xlr/llm/template.hpp"

namespace xlr::llm {

class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool transient)
      : Error(what), transient_(transient) {}
  bool transient() const { return transient_; }

 private:
  bool transient_;
};

// Replay mode met a request that was never recorded.
class ReplayMissError : public Error {
 public:
  explicit ReplayMissError(std::string fp)
      : Error("replay miss: no recorded reply for fingerprint " + fp), fingerprint_(std::move(fp)) {}
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

// Where record-mode requests actually go.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string send(const CompletionRequest& req, const std::string& prompt) = 0;
};

// Every pipeline stage talks to the model through this interface.
class Client {
 public:
  virtual ~Client() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep =
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

// Token bucket (requests per minute) plus a cap on requests in flight.
class RateLimiter {
 public:
  RateLimiter(int max_in_flight, double requests_per_minute);

  class Permit {
   public:
    explicit Permit(RateLimiter* owner) : owner_(owner) {}
    Permit(Permit&& other) noexcept : owner_(std::exchange(other.owner_, nullptr)) {}
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    RateLimiter* owner_;
  };

  Permit acquire();
  int in_flight() const;

 private:
  void release();

  const int max_in_flight_;
  const double per_second_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  double tokens_;
  std::chrono::steady_clock::time_point last_refill_;
};

enum class Mode { kReplay, kRecord };

// Replay mode answers only from the cache. Record mode answers from the cache
// when it can, otherwise renders the template, sends it through the transport
// with exponential backoff on transient errors and records the reply before
// returning it.
class CachingClient : public Client {
 public:
  CachingClient(const TemplateStore& templates, ReplayCache& cache, Mode mode,
                Transport* transport = nullptr, RetryPolicy retry = {},
                RateLimiter* limiter = nullptr);

  std::string complete(const CompletionRequest& req) override;

  // Requests that reached the transport, per template id.
  std::map<std::string, int> transport_calls() const;

 private:
  std::string send_with_retry(const CompletionRequest& req, const std::string& prompt);

  const TemplateStore& templates_;
  ReplayCache& cache_;
  Mode mode_;
  Transport* transport_;
  RetryPolicy retry_;
  RateLimiter* limiter_;
  mutable std::mutex stats_mu_;
  std::map<std::string, int> transport_calls_;
};

}  // namespace xlr::llm
