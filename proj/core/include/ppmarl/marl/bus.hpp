#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ppmarl/marl/memory.hpp"

namespace ppmarl {

// Message taxonomy for every coordinator<->agent exchange. `experience` and
// `weights` only appear for baseline trainers; an audit of these kinds is the
// privacy boundary check.
enum class MsgKind {
  ids,
  q,
  target_q,
  r_hat,
  loss,
  grad_q,
  grad_interface,
  cipher_blob,
  activation_roundtrip,
  experience,
  weights,
};

const char* to_string(MsgKind k);
MsgKind msg_kind_from_string(const std::string& s);

// Endpoint convention: agents are 0..n-1, the coordinator is -1.
inline constexpr int kCoordinator = -1;

// Canonical wire format (bytes are counted, not transmitted):
//   header: round u32 | kind u8 | sender i8 | receiver i8 | pad u8 | len u32
//   ids:    8 bytes each (episode u32, step u32)
//   values: 8 bytes each (f64)
//   blob:   raw bytes (ciphertexts, done flags, ...)
inline constexpr std::uint64_t kMessageHeaderBytes = 12;

struct Payload {
  std::vector<MemoryId> ids;
  std::vector<double> values;
  std::uint64_t blob_bytes = 0;              // counted even when not captured
  std::vector<std::uint8_t> blob_prefix;     // captured prefix (attack features)

  std::uint64_t body_bytes() const {
    return ids.size() * 8 + values.size() * 8 + blob_bytes;
  }
};

struct MessageRecord {
  std::uint64_t round = 0;
  int sender = kCoordinator;
  int receiver = kCoordinator;
  MsgKind kind = MsgKind::ids;
  std::uint64_t payload_bytes = 0;  // header + body, canonical serialization
  // Captured payload content (only when capture is enabled for the kind).
  std::vector<MemoryId> ids;
  std::vector<double> values;
  std::vector<std::uint8_t> blob_prefix;
};

struct KindStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
};

// Operation counters for the computation column of the overhead report.
struct OpCounters {
  std::uint64_t critic_mults = 0;
  std::uint64_t actor_mults = 0;
  std::uint64_t he_encrypt = 0;
  std::uint64_t he_decrypt = 0;
  std::uint64_t he_add = 0;
  std::uint64_t he_scale = 0;

  OpCounters& operator+=(const OpCounters& o);
};

// Single collector for every exchange. Aggregates are always maintained;
// full records go to a JSONL stream when a sink is attached. Payload values
// are captured only for kinds in `capture_kinds` (the attack harness needs
// the public view of agent uploads, nothing more).
class MessageBus {
 public:
  MessageBus() = default;

  void open_jsonl(const std::filesystem::path& path);
  void set_capture(std::set<MsgKind> kinds, std::size_t blob_prefix_len = 32);
  void set_retain_records(bool retain) { retain_records_ = retain; }

  void begin_round(std::uint64_t round) { round_ = round; }
  std::uint64_t current_round() const { return round_; }

  void send(MsgKind kind, int sender, int receiver, Payload payload);
  void record_interaction_round() { ++interaction_rounds_; }

  const std::map<MsgKind, KindStats>& per_kind() const { return per_kind_; }
  std::uint64_t total_bytes() const { return total_bytes_; }
  std::uint64_t total_messages() const { return total_messages_; }
  std::uint64_t interaction_rounds() const { return interaction_rounds_; }
  std::uint64_t bytes_for(MsgKind k) const;
  bool has_kind(MsgKind k) const { return per_kind_.count(k) > 0; }

  OpCounters& ops() { return ops_; }
  const OpCounters& ops() const { return ops_; }

  const std::vector<MessageRecord>& records() const { return records_; }
  void close();

 private:
  void write_record(const MessageRecord& rec, bool captured);

  std::uint64_t round_ = 0;
  std::map<MsgKind, KindStats> per_kind_;
  std::uint64_t total_bytes_ = 0;
  std::uint64_t total_messages_ = 0;
  std::uint64_t interaction_rounds_ = 0;
  OpCounters ops_;

  bool retain_records_ = false;
  std::vector<MessageRecord> records_;
  std::set<MsgKind> capture_kinds_;
  std::size_t blob_prefix_len_ = 32;
  std::unique_ptr<std::ofstream> jsonl_;
};

// Reads bus records back from a JSONL file (used by harvest and report).
std::vector<MessageRecord> read_bus_jsonl(const std::filesystem::path& path);

}  // namespace ppmarl
