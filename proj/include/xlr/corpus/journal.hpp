#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"

namespace xlr::corpus {

enum class Stage {
  kIngested,
  kDescriptorBuilt,
  kTransferable,
  kFilteredOut,
  kTestsGenerated,
  kTranslated,
  kTranslationFailed,
  kInjected,
  kInjectionFailed,
  kQuadVerified,
};

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);
bool is_terminal(Stage s);
// `last` is nullopt for a pair with no records yet.
bool is_legal_successor(std::optional<Stage> last, Stage next);

struct PipelineRecord {
  std::string pair_id;
  Stage stage = Stage::kIngested;
  nlohmann::json payload;
  std::uint64_t timestamp = 0;  // logical: position of the record in the journal, from 1
};

struct PairState {
  Stage stage;
  nlohmann::json payload;
};

using StateMap = std::map<std::string, PairState>;

struct ReplayResult {
  std::vector<PipelineRecord> records;
  StateMap state;
  std::vector<std::string> warnings;
  std::uintmax_t valid_bytes = 0;  // length of the intact prefix
};

// Reads a journal. A damaged final line (truncated write, bad checksum) is
// dropped with a warning; damage before the last line is a JournalError.
// A missing file replays as empty.
ReplayResult replay(const std::filesystem::path& path);

// Pipeline state reconstructed from a journal (pair id -> last stage + payload).
StateMap resume(const std::filesystem::path& path);

// Pairs whose last stage is not terminal, in id order.
std::vector<std::string> pending_pairs(const StateMap& state);

// Append-only journal, one record per line:
//   <compact JSON>\t<first 16 hex of SHA-256(JSON)>\n
// Opening replays the file and cuts off a damaged tail. Appends are
// serialized, checked against the pair's last stage, and fdatasync'ed.
class Journal {
 public:
  explicit Journal(std::filesystem::path path);
  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  // Sets record.timestamp. Throws JournalError on an illegal transition or a
  // failed write; nothing is written in either case.
  void append(PipelineRecord record);
  // All-or-nothing validation, then one write.
  void append_batch(std::vector<PipelineRecord> records);

  std::shared_ptr<const StateMap> snapshot() const;
  std::vector<PipelineRecord> records() const;
  std::vector<PipelineRecord> lineage(std::string_view pair_id) const;
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::vector<PipelineRecord> records_;
  std::shared_ptr<const StateMap> state_;
  std::vector<std::string> warnings_;
};

std::string encode_record(const PipelineRecord& record);

// What the journal says about the corpus: every ingested source pair, which
// of them passed the transferability gate, and the verified target pairs.
struct CorpusView {
  std::map<std::string, SourcePair> sources;
  std::set<std::string> transferable;
  std::map<std::string, TargetPair> verified;
};

CorpusView corpus_from_records(const std::vector<PipelineRecord>& records);

}  // namespace xlr::corpus
