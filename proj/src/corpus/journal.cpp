#include "xlr/corpus/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xlr/error.hpp"
#include "xlr/hash.hpp"

namespace xlr::corpus {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::kIngested, "ingested"},
    {Stage::kDescriptorBuilt, "descriptor_built"},
    {Stage::kTransferable, "transferable"},
    {Stage::kFilteredOut, "filtered_out"},
    {Stage::kTestsGenerated, "tests_generated"},
    {Stage::kTranslated, "translated"},
    {Stage::kTranslationFailed, "translation_failed"},
    {Stage::kInjected, "injected"},
    {Stage::kInjectionFailed, "injection_failed"},
    {Stage::kQuadVerified, "quad_verified"},
};

std::string checksum(std::string_view json) { return sha256_hex(json).substr(0, 16); }

// Parses one line (without its '\n'). nullopt when damaged.
std::optional<PipelineRecord> decode_line(std::string_view line) {
  const auto tab = line.rfind('\t');
  if (tab == std::string_view::npos) return std::nullopt;
  const auto json = line.substr(0, tab);
  if (checksum(json) != line.substr(tab + 1)) return std::nullopt;
  auto j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    auto stage = stage_from_string(j.at("stage").get<std::string>());
    if (!stage) return std::nullopt;
    return PipelineRecord{j.at("pair_id").get<std::string>(), *stage, j.at("payload"),
                          j.at("ts").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void apply_to_state(StateMap& state, const PipelineRecord& r) {
  state.insert_or_assign(r.pair_id, PairState{r.stage, r.payload});
}

std::optional<Stage> last_stage(const StateMap& state, const std::string& id) {
  auto it = state.find(id);
  if (it == state.end()) return std::nullopt;
  return it->second.stage;
}

}  // namespace

std::string_view to_string(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  return "unknown";
}

std::optional<Stage> stage_from_string(std::string_view s) {
  for (const auto& [stage, name] : kStageNames) {
    if (name == s) return stage;
  }
  return std::nullopt;
}

bool is_terminal(Stage s) {
  return s == Stage::kFilteredOut || s == Stage::kTranslationFailed || s == Stage::kInjectionFailed ||
         s == Stage::kQuadVerified;
}

bool is_legal_successor(std::optional<Stage> last, Stage next) {
  if (!last) return next == Stage::kIngested;
  switch (*last) {
    case Stage::kIngested:
      return next == Stage::kDescriptorBuilt || next == Stage::kFilteredOut;
    case Stage::kDescriptorBuilt:
      return next == Stage::kTransferable || next == Stage::kFilteredOut;
    case Stage::kTransferable:
      return next == Stage::kTestsGenerated || next == Stage::kFilteredOut;
    case Stage::kTestsGenerated:
      return next == Stage::kTranslated || next == Stage::kTranslationFailed;
    case Stage::kTranslated:
      return next == Stage::kInjected || next == Stage::kInjectionFailed;
    case Stage::kInjected:
      return next == Stage::kQuadVerified || next == Stage::kInjectionFailed;
    default:
      return false;  // terminal
  }
}

std::string encode_record(const PipelineRecord& r) {
  nlohmann::json j = {{"ts", r.timestamp},
                      {"pair_id", r.pair_id},
                      {"stage", std::string(to_string(r.stage))},
                      {"payload", r.payload}};
  const std::string json = j.dump();
  return json + "\t" + checksum(json) + "\n";
}

ReplayResult replay(const fs::path& path) {
  ReplayResult out;
  if (!fs::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JournalError("cannot read journal: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < data.size()) {
    ++lineno;
    const auto nl = data.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string_view line(data.data() + pos, (complete ? nl : data.size()) - pos);
    std::optional<PipelineRecord> rec = complete ? decode_line(line) : std::nullopt;
    if (rec && !is_legal_successor(last_stage(out.state, rec->pair_id), rec->stage)) rec.reset();
    if (!rec) {
      const bool last_line = !complete || nl + 1 >= data.size();
      if (!last_line) {
        throw JournalError(path.string() + ":" + std::to_string(lineno) + ": corrupted record inside journal");
      }
      out.warnings.push_back(path.string() + ":" + std::to_string(lineno) +
                             ": damaged trailing record dropped (truncated write?)");
      break;
    }
    apply_to_state(out.state, *rec);
    out.records.push_back(std::move(*rec));
    pos = nl + 1;
    out.valid_bytes = pos;
  }
  return out;
}

StateMap resume(const fs::path& path) { return replay(path).state; }

std::vector<std::string> pending_pairs(const StateMap& state) {
  std::vector<std::string> out;
  for (const auto& [id, s] : state) {
    if (!is_terminal(s.stage)) out.push_back(id);
  }
  return out;
}

Journal::Journal(fs::path path) : path_(std::move(path)) {
  auto replayed = replay(path_);
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw JournalError("cannot open journal " + path_.string() + ": " + std::strerror(errno));
  if (::ftruncate(fd_, static_cast<off_t>(replayed.valid_bytes)) != 0 ||
      ::lseek(fd_, 0, SEEK_END) < 0) {
    ::close(fd_);
    throw JournalError("cannot prepare journal for append: " + path_.string());
  }
  records_ = std::move(replayed.records);
  state_ = std::make_shared<const StateMap>(std::move(replayed.state));
  warnings_ = std::move(replayed.warnings);
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

void Journal::append(PipelineRecord record) {
  std::vector<PipelineRecord> batch;
  batch.push_back(std::move(record));
  append_batch(std::move(batch));
}

void Journal::append_batch(std::vector<PipelineRecord> batch) {
  std::lock_guard lock(mu_);
  auto next_state = std::make_shared<StateMap>(*state_);
  std::string bytes;
  std::uint64_t ts = records_.size();
  for (auto& r : batch) {
    const auto last = last_stage(*next_state, r.pair_id);
    if (!is_legal_successor(last, r.stage)) {
      throw JournalError("illegal stage transition for pair '" + r.pair_id + "': " +
                         (last ? std::string(to_string(*last)) : std::string("<none>")) + " -> " +
                         std::string(to_string(r.stage)));
    }
    r.timestamp = ++ts;
    apply_to_state(*next_state, r);
    bytes += encode_record(r);
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd_, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw JournalError(std::string("journal write failed: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) throw JournalError("journal sync failed");
  for (auto& r : batch) records_.push_back(std::move(r));
  state_ = std::move(next_state);
}

std::shared_ptr<const StateMap> Journal::snapshot() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::vector<PipelineRecord> Journal::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<PipelineRecord> Journal::lineage(std::string_view pair_id) const {
  std::lock_guard lock(mu_);
  std::vector<PipelineRecord> out;
  for (const auto& r : records_) {
    if (r.pair_id == pair_id) out.push_back(r);
  }
  return out;
}

CorpusView corpus_from_records(const std::vector<PipelineRecord>& records) {
  CorpusView view;
  for (const auto& r : records) {
    switch (r.stage) {
      case Stage::kIngested: {
        auto pair = source_pair_from_json(r.payload.at("pair"));
        view.sources.insert_or_assign(pair.id, std::move(pair));
        break;
      }
      case Stage::kTransferable:
        view.transferable.insert(r.pair_id);
        break;
      case Stage::kQuadVerified:
        view.verified.insert_or_assign(r.pair_id, target_pair_from_json(r.payload.at("target")));
        break;
      default:
        break;
    }
  }
  return view;
}

}  // namespace xlr::corpus
