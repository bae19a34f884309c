#include "dynsel/fusion.hpp"

#include <stdexcept>
#include <string>
#include <unordered_set>

#include "dynsel/kernels.hpp"

namespace dynsel {

std::vector<double> pool_embedding(const std::vector<double>& embedding, int d_sem) {
  const int e = static_cast<int>(embedding.size());
  if (d_sem < 1) throw std::invalid_argument("pool_embedding: d_sem must be >= 1");
  if (e % d_sem != 0)
    throw std::invalid_argument(
        "pool_embedding: d_sem=" + std::to_string(d_sem) + " does not divide E=" +
        std::to_string(e) + "; pad the embedding or choose a divisor of E");
  const int seg = e / d_sem;
  const auto& k = kernels::active();
  std::vector<double> out(static_cast<std::size_t>(d_sem));
  for (int j = 0; j < d_sem; ++j) {
    out[static_cast<std::size_t>(j)] =
        k.sum(embedding.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(seg),
              static_cast<std::size_t>(seg)) /
        seg;
  }
  return out;
}

FusedState fuse(const InstructionRecord& record, const StageInfo& stage,
                const AvailabilityCounter& avail, int d_sem) {
  if (stage.t < 1 || stage.t > stage.T)
    throw std::invalid_argument("fuse: stage requires 1 <= t <= T");
  FusedState s;
  s.id = record.id;
  s.vector.reserve(static_cast<std::size_t>(fused_dim(d_sem)));
  s.vector.push_back(stage.perf_prev);
  s.vector.push_back(static_cast<double>(stage.t) / stage.T);
  s.vector.push_back(static_cast<double>(record.prompt_len));
  s.vector.push_back(static_cast<double>(record.response_len));
  s.vector.push_back(record.log_p_y_given_x);
  s.vector.push_back(record.log_p_y);
  const auto pooled = pool_embedding(record.embedding, d_sem);
  s.vector.insert(s.vector.end(), pooled.begin(), pooled.end());
  s.vector.push_back(static_cast<double>(avail.get(record.id)));
  return s;
}

std::vector<FusedState> fuse_all(const Corpus& corpus, const StageInfo& stage,
                                 const AvailabilityCounter& avail, int d_sem) {
  std::vector<FusedState> out;
  out.reserve(corpus.records.size());
  for (const auto& r : corpus.records) out.push_back(fuse(r, stage, avail, d_sem));
  return out;
}

AvailabilityCounter record_selection(AvailabilityCounter counts,
                                     const std::vector<int>& selected_ids) {
  std::unordered_set<int> seen;
  for (int id : selected_ids) {
    if (!seen.insert(id).second)
      throw std::invalid_argument("record_selection: duplicate id " + std::to_string(id) +
                                  " in one batch");
    ++counts.counts[id];
  }
  return counts;
}

}  // namespace dynsel
