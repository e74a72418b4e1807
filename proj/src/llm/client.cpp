#include "xlr/llm/client.hpp"

#include <algorithm>
#include <cmath>

namespace xlr::llm {

RateLimiter::RateLimiter(int max_in_flight, double requests_per_minute)
    : max_in_flight_(std::max(1, max_in_flight)),
      per_second_(requests_per_minute / 60.0),
      tokens_(std::max(1.0, requests_per_minute / 60.0)),
      last_refill_(std::chrono::steady_clock::now()) {}

RateLimiter::Permit::~Permit() {
  if (owner_ != nullptr) owner_->release();
}

RateLimiter::Permit RateLimiter::acquire() {
  std::unique_lock lock(mu_);
  const double capacity = std::max(1.0, per_second_);
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
    tokens_ = std::min(capacity, tokens_ + elapsed * per_second_);
    last_refill_ = now;
    if (in_flight_ < max_in_flight_ && tokens_ >= 1.0) break;
    if (in_flight_ >= max_in_flight_) {
      cv_.wait(lock);
    } else {
      const double wait_s = per_second_ > 0 ? (1.0 - tokens_) / per_second_ : 1.0;
      cv_.wait_for(lock, std::chrono::duration<double>(wait_s));
    }
  }
  tokens_ -= 1.0;
  ++in_flight_;
  return Permit(this);
}

void RateLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

int RateLimiter::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

CachingClient::CachingClient(const TemplateStore& templates, ReplayCache& cache, Mode mode,
                             Transport* transport, RetryPolicy retry, RateLimiter* limiter)
    : templates_(templates),
      cache_(cache),
      mode_(mode),
      transport_(transport),
      retry_(std::move(retry)),
      limiter_(limiter) {
  if (mode_ == Mode::kRecord && transport_ == nullptr) {
    throw PreconditionError("record mode requires a transport");
  }
}

std::string CachingClient::complete(const CompletionRequest& req) {
  // Rendering validates that every placeholder is bound, in both modes.
  const std::string prompt = templates_.render(req.template_id, req.bindings);
  if (auto hit = cache_.find(req)) return *hit;
  if (mode_ == Mode::kReplay) throw ReplayMissError(fingerprint(req));

  std::string reply = send_with_retry(req, prompt);
  cache_.put(req, reply);
  return reply;
}

std::string CachingClient::send_with_retry(const CompletionRequest& req, const std::string& prompt) {
  auto backoff = retry_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      std::optional<RateLimiter::Permit> permit;
      if (limiter_ != nullptr) permit.emplace(limiter_->acquire());
      {
        std::lock_guard lock(stats_mu_);
        ++transport_calls_[req.template_id];
      }
      return transport_->send(req, prompt);
    } catch (const TransportError& e) {
      if (!e.transient() || attempt >= retry_.max_attempts) throw;
    }
    retry_.sleep(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(std::llround(static_cast<double>(backoff.count()) * retry_.multiplier)));
  }
}

std::map<std::string, int> CachingClient::transport_calls() const {
  std::lock_guard lock(stats_mu_);
  return transport_calls_;
}

}  // namespace xlr::llm
