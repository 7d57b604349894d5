#include "gsmlab/evaluator/batch.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

namespace gsmlab::evaluator {

void MaterialField::validate() const {
  if (materials.empty()) throw std::invalid_argument("MaterialField: no materials");
  for (const auto& m : materials)
    if (!m) throw std::invalid_argument("MaterialField: null material");
  for (std::uint16_t id : ids)
    if (id >= materials.size())
      throw std::invalid_argument("MaterialField: material id " + std::to_string(id) + " out of range");
}

namespace {

// Inputs of one material group within a chunk, column per request.
struct Staging {
  std::vector<std::size_t> index;
  Eigen::Matrix<double, 6, Eigen::Dynamic> eps_n;
  Eigen::Matrix<double, 6, Eigen::Dynamic> eps_np1;
  Eigen::Matrix<double, kMaxInternal, Eigen::Dynamic> a_n;
  std::vector<double> dt;
  std::vector<unsigned char> tangent;
  std::vector<const StepRecord*> warm;

  // Requests must already match the material's state size.
  void gather(std::span<const EvalRequest> requests, int internal) {
    const auto n = static_cast<Eigen::Index>(index.size());
    eps_n.resize(6, n);
    eps_np1.resize(6, n);
    a_n.setZero(kMaxInternal, n);
    dt.resize(index.size());
    tangent.resize(index.size());
    warm.resize(index.size());
    for (Eigen::Index c = 0; c < n; ++c) {
      const EvalRequest& r = requests[index[static_cast<std::size_t>(c)]];
      eps_n.col(c) = r.eps_n;
      eps_np1.col(c) = r.eps_np1;
      a_n.col(c).head(internal) = r.a_n;
      dt[static_cast<std::size_t>(c)] = r.dt;
      tangent[static_cast<std::size_t>(c)] = r.want_tangent;
      warm[static_cast<std::size_t>(c)] = r.warm_start;
    }
  }

  EvalRequest request(Eigen::Index c, int internal) const {
    EvalRequest r;
    r.eps_n = eps_n.col(c);
    r.eps_np1 = eps_np1.col(c);
    r.a_n = a_n.col(c).head(internal);
    r.dt = dt[static_cast<std::size_t>(c)];
    r.want_tangent = tangent[static_cast<std::size_t>(c)] != 0;
    r.warm_start = warm[static_cast<std::size_t>(c)];
    return r;
  }
};

}  // namespace

BatchResult evaluate_batch(const MaterialField& field, const StrategyConfig& cfg,
                           std::span<const EvalRequest> requests, ThreadPool& pool, std::size_t chunk_size, std::vector<StepRecord>* records) {
  if (chunk_size == 0) throw std::invalid_argument("evaluate_batch: chunk size must be positive");
  if (field.ids.size() != requests.size())
    throw std::invalid_argument("evaluate_batch: " + std::to_string(requests.size()) + " requests for a field of " +
                                std::to_string(field.ids.size()));
  field.validate();
  cfg.validate();
  BatchResult out;
  out.results.resize(requests.size());
  if (records) records->resize(requests.size());
  const std::size_t chunks = (requests.size() + chunk_size - 1) / chunk_size;
  std::vector<std::vector<BatchError>> chunk_errors(chunks);

  pool.parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t begin = chunk * chunk_size;
    const std::size_t end = std::min(requests.size(), begin + chunk_size);
    std::vector<Staging> groups(field.materials.size());
    for (std::size_t i = begin; i < end; ++i) {
      const Material& mat = field.at(i);
      if (requests[i].a_n.size() != mat.internal_size()) {
        chunk_errors[chunk].push_back({i, "internal state of size " + std::to_string(requests[i].a_n.size()) +
                                              " for material '" + std::string(mat.name()) + "'"});
        continue;
      }
      groups[field.ids[i]].index.push_back(i);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      Staging& st = groups[g];
      if (st.index.empty()) continue;
      const Material& mat = *field.materials[g];
      const int internal = mat.internal_size();
      st.gather(requests, internal);
      for (std::size_t c = 0; c < st.index.size(); ++c) {
        const std::size_t i = st.index[c];
        try {
          out.results[i] =
              mat.evaluate(cfg, st.request(static_cast<Eigen::Index>(c), internal), records ? &(*records)[i] : nullptr);
        } catch (const std::exception& e) {
          chunk_errors[chunk].push_back({i, e.what()});
        }
      }
    }
  });

  for (auto& errs : chunk_errors) out.errors.insert(out.errors.end(), errs.begin(), errs.end());
  std::sort(out.errors.begin(), out.errors.end(),
            [](const BatchError& a, const BatchError& b) { return a.index < b.index; });
  return out;
}

}  // namespace gsmlab::evaluator
