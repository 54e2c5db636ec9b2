#include "ppmarl/marl/bus.hpp"

#include <algorithm>

#include <json.hpp>

#include "ppmarl/common.hpp"

namespace ppmarl {

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::ids: return "ids";
    case MsgKind::q: return "q";
    case MsgKind::target_q: return "target_q";
    case MsgKind::r_hat: return "r_hat";
    case MsgKind::loss: return "loss";
    case MsgKind::grad_q: return "grad_q";
    case MsgKind::grad_interface: return "grad_interface";
    case MsgKind::cipher_blob: return "cipher_blob";
    case MsgKind::activation_roundtrip: return "activation_roundtrip";
    case MsgKind::experience: return "experience";
    case MsgKind::weights: return "weights";
  }
  return "ids";
}

MsgKind msg_kind_from_string(const std::string& s) {
  static const std::map<std::string, MsgKind> table = {
      {"ids", MsgKind::ids},
      {"q", MsgKind::q},
      {"target_q", MsgKind::target_q},
      {"r_hat", MsgKind::r_hat},
      {"loss", MsgKind::loss},
      {"grad_q", MsgKind::grad_q},
      {"grad_interface", MsgKind::grad_interface},
      {"cipher_blob", MsgKind::cipher_blob},
      {"activation_roundtrip", MsgKind::activation_roundtrip},
      {"experience", MsgKind::experience},
      {"weights", MsgKind::weights},
  };
  auto it = table.find(s);
  if (it == table.end()) throw DataError("unknown message kind: " + s);
  return it->second;
}

OpCounters& OpCounters::operator+=(const OpCounters& o) {
  critic_mults += o.critic_mults;
  actor_mults += o.actor_mults;
  he_encrypt += o.he_encrypt;
  he_decrypt += o.he_decrypt;
  he_add += o.he_add;
  he_scale += o.he_scale;
  return *this;
}

void MessageBus::open_jsonl(const std::filesystem::path& path) {
  jsonl_ = std::make_unique<std::ofstream>(path);
  if (!*jsonl_) throw IoError("cannot open bus log: " + path.string());
}

void MessageBus::set_capture(std::set<MsgKind> kinds, std::size_t blob_prefix_len) {
  capture_kinds_ = std::move(kinds);
  blob_prefix_len_ = blob_prefix_len;
}

std::uint64_t MessageBus::bytes_for(MsgKind k) const {
  auto it = per_kind_.find(k);
  return it == per_kind_.end() ? 0 : it->second.bytes;
}

void MessageBus::send(MsgKind kind, int sender, int receiver, Payload payload) {
  const std::uint64_t bytes = kMessageHeaderBytes + payload.body_bytes();
  auto& stats = per_kind_[kind];
  ++stats.messages;
  stats.bytes += bytes;
  ++total_messages_;
  total_bytes_ += bytes;

  const bool captured = capture_kinds_.count(kind) > 0;
  if (!jsonl_ && !retain_records_) return;

  MessageRecord rec;
  rec.round = round_;
  rec.sender = sender;
  rec.receiver = receiver;
  rec.kind = kind;
  rec.payload_bytes = bytes;
  if (captured) {
    rec.ids = std::move(payload.ids);
    rec.values = std::move(payload.values);
    rec.blob_prefix = std::move(payload.blob_prefix);
    // Blob capture is per id (attack features), so the cap scales with the
    // number of ids carried by the message.
    const std::size_t cap = blob_prefix_len_ * std::max<std::size_t>(1, rec.ids.size());
    if (rec.blob_prefix.size() > cap) rec.blob_prefix.resize(cap);
  }
  if (jsonl_) write_record(rec, captured);
  if (retain_records_) records_.push_back(std::move(rec));
}

void MessageBus::write_record(const MessageRecord& rec, bool captured) {
  nlohmann::json j;
  j["round"] = rec.round;
  j["sender"] = rec.sender;
  j["receiver"] = rec.receiver;
  j["kind"] = to_string(rec.kind);
  j["bytes"] = rec.payload_bytes;
  if (captured) {
    if (!rec.ids.empty()) {
      nlohmann::json ids = nlohmann::json::array();
      for (const auto& id : rec.ids) ids.push_back({id.episode, id.step});
      j["ids"] = std::move(ids);
    }
    if (!rec.values.empty()) j["values"] = rec.values;
    if (!rec.blob_prefix.empty()) j["blob_prefix"] = rec.blob_prefix;
  }
  *jsonl_ << j.dump() << '\n';
}

void MessageBus::close() {
  if (jsonl_) {
    jsonl_->flush();
    jsonl_.reset();
  }
}

std::vector<MessageRecord> read_bus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bus log: " + path.string());
  std::vector<MessageRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    MessageRecord rec;
    rec.round = j.at("round").get<std::uint64_t>();
    rec.sender = j.at("sender").get<int>();
    rec.receiver = j.at("receiver").get<int>();
    rec.kind = msg_kind_from_string(j.at("kind").get<std::string>());
    rec.payload_bytes = j.at("bytes").get<std::uint64_t>();
    if (j.contains("ids")) {
      for (const auto& pair : j.at("ids")) {
        rec.ids.push_back({pair.at(0).get<std::uint32_t>(), pair.at(1).get<std::uint32_t>()});
      }
    }
    if (j.contains("values")) rec.values = j.at("values").get<std::vector<double>>();
    if (j.contains("blob_prefix")) {
      rec.blob_prefix = j.at("blob_prefix").get<std::vector<std::uint8_t>>();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ppmarl
