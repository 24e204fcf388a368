#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "depdisc/error.hpp"
#include "depdisc/partition.hpp"
#include "depdisc/relation.hpp"

namespace depdisc {

/// Simulated deployment: k logical workers, an optional per-worker memory
/// budget (0 means unconstrained), and the seed that drives every sampled
/// decision. DEPDISC_THREADS caps only the physical threads used to run
/// worker tasks; it never changes results.
struct ClusterConfig {
  uint32_t workers = 1;
  uint64_t memory_budget = 0;
  uint64_t seed = 0;
};

/// Per-stage communication and work metrics. X is the per-stage maximum over
/// workers of bytes received, Y the maximum of work units; the totals add up
/// across workers. Sends and receives are charged as one event, so the sent
/// and received totals match by construction.
struct StageStats {
  std::string name;
  uint32_t k = 0;
  std::vector<uint64_t> bytes_received;
  std::vector<uint64_t> work_units;
  double wall_ms = 0;

  uint64_t x_bytes() const;
  uint64_t y_units() const;
  uint64_t total_bytes() const;
  uint64_t total_units() const;
};

class CostLedger {
 public:
  void commit(StageStats stage) { stages_.push_back(std::move(stage)); }
  const std::vector<StageStats>& stages() const { return stages_; }

  uint64_t total_bytes() const;
  uint64_t total_units() const;
  /// Largest x_bytes() over all committed stages.
  uint64_t max_stage_x() const;

 private:
  std::vector<StageStats> stages_;
};

/// Cached payload shipped to every worker once per job; payloads larger
/// than a positive memory budget spill and are re-charged on every use.
struct BroadcastHandle {
  std::string id;
  uint64_t bytes = 0;
};

class Cluster;

/// Handed to a worker task while a stage runs.
struct WorkerCtx {
  uint32_t worker = 0;
  uint64_t work = 0;

  void add_work(uint64_t units) { work += units; }
};

/// One named stage: charge bytes while planning, then run per-worker tasks.
/// Tasks execute on up to DEPDISC_THREADS OS threads; results merge in
/// worker-id order so physical parallelism never shows in any output.
class Stage {
 public:
  Stage(Cluster& cluster, std::string name);
  Stage(const Stage&) = delete;
  ~Stage();

  void charge(uint32_t worker, uint64_t bytes);
  /// Broadcast use: charged once per worker per job, or per use when the
  /// payload exceeds a positive memory budget.
  void charge_broadcast(const BroadcastHandle& handle, uint32_t worker);
  void add_work(uint32_t worker, uint64_t units);

  template <typename R>
  std::vector<R> run(const std::vector<std::function<R(WorkerCtx&)>>& tasks);

  /// Commits without running tasks (pure accounting stage).
  void finish();

 private:
  void run_erased(const std::vector<std::function<void(WorkerCtx&)>>& tasks);

  Cluster& cluster_;
  StageStats stats_;
  bool committed_ = false;
};

class Cluster {
 public:
  explicit Cluster(ClusterConfig config);

  uint32_t workers() const { return config_.workers; }
  uint64_t memory_budget() const { return config_.memory_budget; }
  /// Small-memory regime: any positive budget switches the streaming plans on.
  bool small_memory() const { return config_.memory_budget > 0; }
  uint64_t seed() const { return config_.seed; }

  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }

  BroadcastHandle broadcast(const std::string& id, uint64_t bytes);

 private:
  friend class Stage;
  bool broadcast_charged(const std::string& id, uint32_t worker);

  ClusterConfig config_;
  CostLedger ledger_;
  std::set<std::pair<std::string, uint32_t>> broadcast_seen_;
};

/// Number of OS threads stage execution may use (DEPDISC_THREADS, default
/// hardware concurrency, minimum 1).
uint32_t physical_threads();

/// item -> worker, round robin. Ledger charges are the caller's job since
/// only it knows the item payloads.
std::vector<uint32_t> scatter_round_robin(size_t item_count, uint32_t k);

/// Triangle layout for an all-pairs self-join: l row chunks with
/// l(l+1)/2 <= k, one chunk pair per worker in row-major order
/// (1,1),(1,2)..(1,l),(2,2).. Workers beyond the triangle stay idle.
struct TriangleLayout {
  uint32_t k = 0;
  uint32_t l = 0;
  /// worker id -> (p, q), 1-based chunk indices, p <= q.
  std::vector<std::pair<uint32_t, uint32_t>> assignments;

  static TriangleLayout make(uint32_t k);
};

/// Splits [0, n) into l near-equal contiguous chunks.
std::vector<std::pair<uint32_t, uint32_t>> chunk_ranges(uint32_t n, uint32_t l);

/// One contiguous slice of a row sequence with its measured wire size.
struct Chunk {
  uint32_t id = 0;  // 1-based, matching TriangleLayout coordinates
  std::pair<uint32_t, uint32_t> range;
  uint64_t byte_size = 0;
};

/// Cuts [0, n) into the layout's l chunks, each costed at per_row wire
/// bytes plus a length prefix.
std::vector<Chunk> make_chunks(uint32_t n, uint32_t l, uint64_t per_row);

struct TrianglePairTask {
  uint32_t worker = 0;
  uint32_t p = 0;  // 1-based chunk ids
  uint32_t q = 0;
  bool diagonal = false;
};

struct TriangleJoin {
  TriangleLayout layout;
  std::vector<TrianglePairTask> tasks;
};

/// Assigns every unordered chunk pair (p, q), p <= q, to its triangle
/// worker. Requires exactly layout.l chunks for the given k.
TriangleJoin triangle_self_join(const std::vector<Chunk>& chunks, uint32_t k);

/// Comparison tasks that together cover every intra-block pair of every
/// input block. Small blocks (pair weight <= W/k) go whole to the least
/// loaded worker; heavier blocks split triangle-style over a proportional
/// share of workers. Pairs may repeat across blocks, never within a task.
struct BlockCompareTask {
  uint32_t block = 0;               // index into the input block list
  std::pair<uint32_t, uint32_t> left_range;   // positions within the block
  std::pair<uint32_t, uint32_t> right_range;  // equal to left_range on diagonal
  bool diagonal = true;

  uint64_t pair_count() const {
    if (diagonal) {
      uint64_t s = left_range.second - left_range.first;
      return s * (s - 1) / 2;
    }
    return uint64_t(left_range.second - left_range.first) *
           (right_range.second - right_range.first);
  }
};

std::vector<std::vector<BlockCompareTask>> block_distribute(
    const std::vector<const EquivalenceClass*>& blocks, uint32_t k);

/// Classes sorted ascending by size, then dealt in groups of k, one class
/// per worker per group: with sizes 1,3,4,5,7,9 and k=3 worker 0 gets the
/// classes sized 1 and 5.
std::vector<std::vector<uint32_t>> grouped_class_assignment(
    const std::vector<const EquivalenceClass*>& classes, uint32_t k);

/// gen_eq_class by hash exchange: rows hash on their X codes to k reducers,
/// each reducer groups locally, the driver merges back into canonical
/// order. Identical to the local result; the ledger sees the shuffle.
Partition distributed_group_by(AttributeSet x, const Relation& r, Cluster& cluster,
                               const std::string& stage_name);

template <typename R>
std::vector<R> Stage::run(const std::vector<std::function<R(WorkerCtx&)>>& tasks) {
  std::vector<R> results(tasks.size());
  std::vector<std::function<void(WorkerCtx&)>> erased;
  erased.reserve(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    erased.push_back([&results, &tasks, i](WorkerCtx& ctx) { results[i] = tasks[i](ctx); });
  }
  run_erased(erased);
  return results;
}

}  // namespace depdisc
