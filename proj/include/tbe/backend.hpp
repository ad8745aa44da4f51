#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tbe {

enum class BackendKind { Sequential, ParallelWorkers };

/// Half-open range of output rows handled by one logical task.
struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Where kernel rows run. Every backend partitions output rows into disjoint
/// ranges and computes each row independently, so results never depend on the
/// backend or the worker count.
class ExecutionBackend {
 public:
  static constexpr std::size_t kDefaultChunkRows = std::size_t{1} << 20;

  static ExecutionBackend sequential(std::size_t chunk_rows = kDefaultChunkRows);
  static ExecutionBackend parallel(std::size_t workers, std::size_t chunk_rows = kDefaultChunkRows);
  /// "seq", "par" (hardware concurrency) or "par:k".
  static ExecutionBackend parse(std::string_view spec);

  ExecutionBackend() : ExecutionBackend(sequential()) {}

  BackendKind kind() const { return kind_; }
  std::size_t workers() const { return workers_; }
  std::size_t chunk_rows() const { return chunk_rows_; }
  std::string name() const;

  /// Disjoint ranges covering [0, rows). Sequential splits by chunk size only;
  /// parallel splits further so every worker gets several ranges.
  std::vector<RowRange> partition(std::size_t rows) const;

  /// Runs `body` once per range of `partition(rows)`.
  void for_each_range(std::size_t rows, const std::function<void(RowRange)>& body) const;

 private:
  struct Arena;
  ExecutionBackend(BackendKind kind, std::size_t workers, std::size_t chunk_rows);

  BackendKind kind_ = BackendKind::Sequential;
  std::size_t workers_ = 1;
  std::size_t chunk_rows_ = kDefaultChunkRows;
  std::shared_ptr<Arena> arena_;
};

}  // namespace tbe
