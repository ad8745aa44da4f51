#include "tbe/backend.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/partitioner.h>
#include <tbb/task_arena.h>

#include "tbe/errors.hpp"

namespace tbe {

namespace {
// Below this many rows a parallel dispatch costs more than it saves.
constexpr std::size_t kMinParallelRows = 4096;
}  // namespace

struct ExecutionBackend::Arena {
  explicit Arena(int workers) : arena(workers) {}
  tbb::task_arena arena;
};

ExecutionBackend::ExecutionBackend(BackendKind kind, std::size_t workers, std::size_t chunk_rows)
    : kind_(kind), workers_(workers), chunk_rows_(chunk_rows) {
  if (chunk_rows_ == 0) throw PreconditionError("chunk size must be positive");
  if (kind_ == BackendKind::ParallelWorkers) {
    if (workers_ == 0) throw PreconditionError("parallel backend needs at least one worker");
    arena_ = std::make_shared<Arena>(static_cast<int>(workers_));
  }
}

ExecutionBackend ExecutionBackend::sequential(std::size_t chunk_rows) {
  return ExecutionBackend(BackendKind::Sequential, 1, chunk_rows);
}

ExecutionBackend ExecutionBackend::parallel(std::size_t workers, std::size_t chunk_rows) {
  return ExecutionBackend(BackendKind::ParallelWorkers, workers, chunk_rows);
}

ExecutionBackend ExecutionBackend::parse(std::string_view spec) {
  if (spec == "seq" || spec == "sequential") return sequential();
  if (spec == "par") return parallel(std::max(1u, std::thread::hardware_concurrency()));
  if (spec.starts_with("par:")) {
    std::size_t k = 0;
    const auto digits = spec.substr(4);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || k == 0)
      throw PreconditionError("bad worker count in backend '" + std::string(spec) + "'");
    return parallel(k);
  }
  throw PreconditionError("unknown backend '" + std::string(spec) + "'");
}

std::string ExecutionBackend::name() const {
  return kind_ == BackendKind::Sequential ? "seq" : "par:" + std::to_string(workers_);
}

std::vector<RowRange> ExecutionBackend::partition(std::size_t rows) const {
  std::size_t grain = chunk_rows_;
  if (kind_ == BackendKind::ParallelWorkers && rows >= kMinParallelRows) {
    const std::size_t per_task = (rows + workers_ * 4 - 1) / (workers_ * 4);
    grain = std::clamp<std::size_t>(per_task, 1, chunk_rows_);
  }
  std::vector<RowRange> out;
  out.reserve(rows / grain + 1);
  for (std::size_t b = 0; b < rows; b += grain) out.push_back({b, std::min(rows, b + grain)});
  return out;
}

void ExecutionBackend::for_each_range(std::size_t rows, const std::function<void(RowRange)>& body) const {
  const auto ranges = partition(rows);
  if (kind_ == BackendKind::Sequential || ranges.size() <= 1) {
    for (const auto& r : ranges) body(r);
    return;
  }
  arena_->arena.execute([&] {
    tbb::parallel_for(
        tbb::blocked_range<std::size_t>(0, ranges.size(), 1),
        [&](const tbb::blocked_range<std::size_t>& idx) {
          for (std::size_t i = idx.begin(); i != idx.end(); ++i) body(ranges[i]);
        },
        tbb::simple_partitioner());
  });
}

}  // namespace tbe
