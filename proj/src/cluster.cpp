#include "depdisc/cluster.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <thread>
#include <unordered_map>

#include "depdisc/wire.hpp"

namespace depdisc {

namespace {

uint64_t max_or_zero(const std::vector<uint64_t>& v) {
  uint64_t best = 0;
  for (uint64_t x : v) best = std::max(best, x);
  return best;
}

uint64_t sum(const std::vector<uint64_t>& v) {
  return std::accumulate(v.begin(), v.end(), uint64_t{0});
}

}  // namespace

uint64_t StageStats::x_bytes() const { return max_or_zero(bytes_received); }
uint64_t StageStats::y_units() const { return max_or_zero(work_units); }
uint64_t StageStats::total_bytes() const { return sum(bytes_received); }
uint64_t StageStats::total_units() const { return sum(work_units); }

uint64_t CostLedger::total_bytes() const {
  uint64_t total = 0;
  for (const auto& s : stages_) total += s.total_bytes();
  return total;
}

uint64_t CostLedger::total_units() const {
  uint64_t total = 0;
  for (const auto& s : stages_) total += s.total_units();
  return total;
}

uint64_t CostLedger::max_stage_x() const {
  uint64_t best = 0;
  for (const auto& s : stages_) best = std::max(best, s.x_bytes());
  return best;
}

Stage::Stage(Cluster& cluster, std::string name) : cluster_(cluster) {
  stats_.name = std::move(name);
  stats_.k = cluster.workers();
  stats_.bytes_received.assign(stats_.k, 0);
  stats_.work_units.assign(stats_.k, 0);
}

Stage::~Stage() {
  if (!committed_) finish();
}

void Stage::charge(uint32_t worker, uint64_t bytes) {
  if (worker >= stats_.k) throw ContractError("charge to worker out of range");
  stats_.bytes_received[worker] += bytes;
}

void Stage::charge_broadcast(const BroadcastHandle& handle, uint32_t worker) {
  uint64_t budget = cluster_.memory_budget();
  bool spills = budget > 0 && handle.bytes > budget;
  if (!spills && cluster_.broadcast_charged(handle.id, worker)) return;
  charge(worker, handle.bytes);
}

void Stage::add_work(uint32_t worker, uint64_t units) {
  if (worker >= stats_.k) throw ContractError("work for worker out of range");
  stats_.work_units[worker] += units;
}

void Stage::finish() {
  if (committed_) return;
  committed_ = true;
  cluster_.ledger().commit(std::move(stats_));
}

void Stage::run_erased(const std::vector<std::function<void(WorkerCtx&)>>& tasks) {
  if (tasks.size() > stats_.k) throw ContractError("more tasks than workers");
  auto start = std::chrono::steady_clock::now();

  std::vector<uint64_t> work(tasks.size(), 0);
  std::vector<std::optional<std::string>> failures(tasks.size());
  uint32_t threads = std::min<uint32_t>(physical_threads(),
                                        static_cast<uint32_t>(tasks.size()));
  std::atomic<size_t> next{0};
  auto drain = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      WorkerCtx ctx;
      ctx.worker = static_cast<uint32_t>(i);
      try {
        tasks[i](ctx);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      work[i] = ctx.work;
    }
  };
  if (threads <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (uint32_t t = 0; t < threads; ++t) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }

  for (size_t i = 0; i < tasks.size(); ++i)
    stats_.work_units[i] += work[i];
  auto stop = std::chrono::steady_clock::now();
  stats_.wall_ms += std::chrono::duration<double, std::milli>(stop - start).count();

  for (size_t i = 0; i < tasks.size(); ++i)
    if (failures[i]) throw StageError(static_cast<uint32_t>(i), *failures[i]);
}

Cluster::Cluster(ClusterConfig config) : config_(config) {
  if (config_.workers == 0) throw InputError("cluster needs at least one worker");
}

BroadcastHandle Cluster::broadcast(const std::string& id, uint64_t bytes) {
  return BroadcastHandle{id, bytes};
}

bool Cluster::broadcast_charged(const std::string& id, uint32_t worker) {
  return !broadcast_seen_.insert({id, worker}).second;
}

uint32_t physical_threads() {
  if (const char* env = std::getenv("DEPDISC_THREADS")) {
    char* end = nullptr;
    unsigned long parsed = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && parsed > 0)
      return static_cast<uint32_t>(std::min<unsigned long>(parsed, 1u << 16));
  }
  uint32_t hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::vector<uint32_t> scatter_round_robin(size_t item_count, uint32_t k) {
  if (k == 0) throw ContractError("scatter over zero workers");
  std::vector<uint32_t> owner(item_count);
  for (size_t i = 0; i < item_count; ++i) owner[i] = static_cast<uint32_t>(i % k);
  return owner;
}

TriangleLayout TriangleLayout::make(uint32_t k) {
  if (k == 0) throw ContractError("triangle layout over zero workers");
  TriangleLayout layout;
  layout.k = k;
  uint32_t l = 1;
  while (uint64_t(l + 1) * (l + 2) / 2 <= k) ++l;
  layout.l = l;
  layout.assignments.reserve(size_t(l) * (l + 1) / 2);
  for (uint32_t p = 1; p <= l; ++p)
    for (uint32_t q = p; q <= l; ++q) layout.assignments.emplace_back(p, q);
  return layout;
}

std::vector<std::pair<uint32_t, uint32_t>> chunk_ranges(uint32_t n, uint32_t l) {
  if (l == 0) throw ContractError("zero chunks");
  std::vector<std::pair<uint32_t, uint32_t>> ranges;
  ranges.reserve(l);
  uint32_t base = n / l;
  uint32_t extra = n % l;
  uint32_t at = 0;
  for (uint32_t i = 0; i < l; ++i) {
    uint32_t len = base + (i < extra ? 1 : 0);
    ranges.emplace_back(at, at + len);
    at += len;
  }
  return ranges;
}

std::vector<Chunk> make_chunks(uint32_t n, uint32_t l, uint64_t per_row) {
  std::vector<Chunk> chunks;
  auto ranges = chunk_ranges(n, l);
  chunks.reserve(ranges.size());
  for (uint32_t i = 0; i < ranges.size(); ++i) {
    uint64_t rows = ranges[i].second - ranges[i].first;
    chunks.push_back({i + 1, ranges[i], wire::kLengthPrefix + per_row * rows});
  }
  return chunks;
}

TriangleJoin triangle_self_join(const std::vector<Chunk>& chunks, uint32_t k) {
  TriangleJoin join;
  join.layout = TriangleLayout::make(k);
  if (chunks.size() != join.layout.l)
    throw ContractError("triangle join expects exactly l chunks");
  for (uint32_t w = 0; w < join.layout.assignments.size(); ++w) {
    auto [p, q] = join.layout.assignments[w];
    join.tasks.push_back({w, p, q, p == q});
  }
  return join;
}

std::vector<std::vector<BlockCompareTask>> block_distribute(
    const std::vector<const EquivalenceClass*>& blocks, uint32_t k) {
  if (k == 0) throw ContractError("block distribution over zero workers");
  std::vector<std::vector<BlockCompareTask>> out(k);
  std::vector<uint64_t> load(k, 0);
  auto least_loaded = [&]() {
    uint32_t best = 0;
    for (uint32_t w = 1; w < k; ++w)
      if (load[w] < load[best]) best = w;
    return best;
  };
  auto assign = [&](BlockCompareTask task) {
    uint64_t pairs = task.pair_count();
    if (pairs == 0) return;
    uint32_t w = least_loaded();
    load[w] += pairs;
    out[w].push_back(task);
  };

  uint64_t total_weight = 0;
  for (const auto* b : blocks) total_weight += b->pair_weight();

  std::vector<uint32_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return blocks[a]->pair_weight() > blocks[b]->pair_weight();
  });

  for (uint32_t idx : order) {
    const EquivalenceClass& block = *blocks[idx];
    uint64_t weight = block.pair_weight();
    uint32_t size = block.size();
    if (weight * k <= total_weight) {
      BlockCompareTask task;
      task.block = idx;
      task.left_range = {0, size};
      task.right_range = task.left_range;
      task.diagonal = true;
      assign(task);
      continue;
    }
    uint64_t share = total_weight == 0
                         ? k
                         : std::min<uint64_t>(k, (weight * k) / total_weight);
    uint32_t workers_for_block = static_cast<uint32_t>(std::max<uint64_t>(1, share));
    TriangleLayout layout = TriangleLayout::make(workers_for_block);
    auto ranges = chunk_ranges(size, layout.l);
    for (auto [p, q] : layout.assignments) {
      BlockCompareTask task;
      task.block = idx;
      task.left_range = ranges[p - 1];
      task.right_range = ranges[q - 1];
      task.diagonal = p == q;
      assign(task);
    }
  }
  return out;
}

std::vector<std::vector<uint32_t>> grouped_class_assignment(
    const std::vector<const EquivalenceClass*>& classes, uint32_t k) {
  if (k == 0) throw ContractError("class assignment over zero workers");
  std::vector<uint32_t> order(classes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return classes[a]->size() < classes[b]->size();
  });
  std::vector<std::vector<uint32_t>> out(k);
  for (size_t pos = 0; pos < order.size(); ++pos)
    out[pos % k].push_back(order[pos]);
  return out;
}

namespace {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t hash_codes(const Relation& r, const std::vector<uint32_t>& attrs,
                    uint32_t row) {
  uint64_t h = 0x2545f4914f6cdd1dull;
  for (uint32_t a : attrs) h = mix64(h ^ r.code(row, a));
  return h;
}

}  // namespace

Partition distributed_group_by(AttributeSet x, const Relation& r, Cluster& cluster,
                               const std::string& stage_name) {
  uint32_t k = cluster.workers();
  uint32_t n = r.row_count();
  std::vector<uint32_t> attrs = x.to_indices();
  uint64_t row_payload = wire::kRowId + wire::kCode * attrs.size();

  Stage stage(cluster, stage_name);
  std::vector<uint32_t> sources = scatter_round_robin(n, k);
  std::vector<uint32_t> reducer_of(n);
  for (uint32_t row = 0; row < n; ++row) {
    reducer_of[row] = static_cast<uint32_t>(hash_codes(r, attrs, row) % k);
    stage.add_work(sources[row], 1);
    stage.charge(reducer_of[row], row_payload);
  }

  std::vector<std::function<std::vector<EquivalenceClass>(WorkerCtx&)>> tasks;
  tasks.reserve(k);
  for (uint32_t w = 0; w < k; ++w) {
    tasks.push_back([&, w](WorkerCtx& ctx) {
      std::unordered_map<std::string, uint32_t> label;
      std::vector<EquivalenceClass> groups;
      std::string key;
      for (uint32_t row = 0; row < n; ++row) {
        if (reducer_of[row] != w) continue;
        ctx.add_work(1);
        key.clear();
        for (uint32_t a : attrs) {
          uint32_t c = r.code(row, a);
          key.append(reinterpret_cast<const char*>(&c), sizeof(c));
        }
        auto [it, fresh] = label.try_emplace(key, static_cast<uint32_t>(groups.size()));
        if (fresh) groups.emplace_back();
        groups[it->second].rows.push_back(row);
      }
      return groups;
    });
  }
  auto per_worker = stage.run(tasks);
  stage.finish();

  Partition result;
  result.attribute_set = x;
  for (auto& groups : per_worker) {
    for (auto& g : groups) {
      result.class_count += 1;
      if (g.rows.size() < 2) {
        result.stripped_singletons += 1;
        continue;
      }
      result.classes.push_back(std::move(g));
    }
  }
  std::sort(result.classes.begin(), result.classes.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) {
              return a.rows.front() < b.rows.front();
            });
  return result;
}

}  // namespace depdisc
