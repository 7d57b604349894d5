#pragma once

// Chunked, thread-parallel evaluation over a voxel field. Every request is
// evaluated exactly as a sequential `Material::evaluate` call would, and each
// result lands in its own slot, so the output does not depend on the thread
// count or the chunk size.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gsmlab/evaluator/evaluator.hpp"
#include "gsmlab/evaluator/thread_pool.hpp"

namespace gsmlab::evaluator {

struct MaterialField {
  std::vector<std::shared_ptr<const Material>> materials;
  std::vector<std::uint16_t> ids;  // material per request

  const Material& at(std::size_t i) const { return *materials[ids[i]]; }
  void validate() const;
};

struct BatchError {
  std::size_t index;
  std::string message;
};

struct BatchResult {
  std::vector<EvalResult> results;
  std::vector<BatchError> errors;  // sorted by index
  bool ok() const { return errors.empty(); }
};

inline constexpr std::size_t kDefaultChunk = 4096;

BatchResult evaluate_batch(const MaterialField& field, const StrategyConfig& cfg,
                           std::span<const EvalRequest> requests, ThreadPool& pool,
                           std::size_t chunk_size = kDefaultChunk, std::vector<StepRecord>* records = nullptr);

}  // namespace gsmlab::evaluator
