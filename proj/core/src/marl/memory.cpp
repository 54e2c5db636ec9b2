#include "ppmarl/marl/memory.hpp"

#include <string>

#include "ppmarl/common.hpp"

namespace ppmarl {

namespace {
std::string id_str(MemoryId id) {
  return "(" + std::to_string(id.episode) + "," + std::to_string(id.step) + ")";
}
}  // namespace

LocalMemory::LocalMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("LocalMemory: capacity must be positive");
}

void LocalMemory::store(MemoryId id, Experience exp) {
  if (items_.count(id.key())) throw UsageError("LocalMemory: duplicate id " + id_str(id));
  if (order_.size() == capacity_) {
    items_.erase(order_.front().key());
    order_.pop_front();
  }
  order_.push_back(id);
  items_.emplace(id.key(), std::move(exp));
}

const Experience* LocalMemory::find(MemoryId id) const {
  auto it = items_.find(id.key());
  return it == items_.end() ? nullptr : &it->second;
}

GlobalMemory::GlobalMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("GlobalMemory: capacity must be positive");
}

void GlobalMemory::insert(MemoryId id) {
  // Synchronous storage makes ids arrive in strictly increasing order, so a
  // duplicate (or out-of-order insert) shows up against the newest entry.
  if (!order_.empty() && id.key() <= order_.back().key()) {
    throw UsageError("GlobalMemory: duplicate or out-of-order id " + id_str(id));
  }
  if (order_.size() == capacity_) order_.pop_front();
  order_.push_back(id);
}

std::vector<MemoryId> sample_ids(const std::deque<MemoryId>& order, std::size_t batch_size,
                                 Rng& rng) {
  if (order.size() < batch_size) {
    throw UsageError("sample_ids: not ready (size " + std::to_string(order.size()) + " < batch " +
                     std::to_string(batch_size) + ")");
  }
  // Partial Fisher-Yates over an index array.
  std::vector<std::size_t> idx(order.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<MemoryId> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(order[idx[i]]);
  }
  return out;
}

std::vector<MemoryId> GlobalMemory::sample(std::size_t batch_size, Rng& rng) const {
  return sample_ids(order_, batch_size, rng);
}

}  // namespace ppmarl
