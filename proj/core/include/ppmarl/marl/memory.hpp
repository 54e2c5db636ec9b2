#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ppmarl/nn/tensor.hpp"
#include "ppmarl/rng.hpp"

namespace ppmarl {

// The only globally shared index into experiences. Agents store synchronously
// so the same id names the same timestep in every agent's local memory.
struct MemoryId {
  std::uint32_t episode = 0;
  std::uint32_t step = 0;

  auto operator<=>(const MemoryId&) const = default;
  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(episode) << 32) | step;
  }
  static MemoryId from_key(std::uint64_t k) {
    return {static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k & 0xffffffffu)};
  }
};

struct Experience {
  Vec obs;
  Vec action;
  double reward = 0.0;
  Vec next_obs;
  bool done = false;
};

// FIFO ring of experiences addressed by MemoryId. Eviction order matches the
// coordinator's global memory (both FIFO with the same capacity).
class LocalMemory {
 public:
  explicit LocalMemory(std::size_t capacity);

  // Throws UsageError on duplicate id.
  void store(MemoryId id, Experience exp);
  // nullptr signals a miss (never stored, or evicted).
  const Experience* find(MemoryId id) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<MemoryId>& order() const { return order_; }

 private:
  std::size_t capacity_;
  std::deque<MemoryId> order_;
  std::unordered_map<std::uint64_t, Experience> items_;
};

// Uniform sample of ids without replacement (shared by every replay store).
std::vector<MemoryId> sample_ids(const std::deque<MemoryId>& order, std::size_t batch_size,
                                 Rng& rng);

// Identifier-only store at the coordinator; insertion ordered, FIFO capacity.
class GlobalMemory {
 public:
  explicit GlobalMemory(std::size_t capacity);

  void insert(MemoryId id);  // UsageError on duplicate
  std::size_t size() const { return order_.size(); }
  bool ready(std::size_t batch_size) const { return order_.size() >= batch_size; }

  // Uniform sample without replacement; throws UsageError when not ready.
  std::vector<MemoryId> sample(std::size_t batch_size, Rng& rng) const;

  const std::deque<MemoryId>& order() const { return order_; }

 private:
  std::size_t capacity_;
  std::deque<MemoryId> order_;
};

}  // namespace ppmarl
