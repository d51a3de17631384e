#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "treebank/example.hpp"

namespace synlab {

// Line-delimited JSON records, one example per line; fields: tokens,
// mask_index, label ("sg"/"pl"), const_tree (bracketed string), heads,
// attractors. This format is the contract between generation, ingestion
// and training.
void write_corpus(const std::string& path, const std::vector<Example>& xs);
std::vector<Example> read_corpus(const std::string& path);

// Downsample the majority class (uniform, seeded) so counts differ by at
// most one, then shuffle deterministically. Throws if a label is absent.
std::vector<Example> balance_labels(const std::vector<Example>& xs,
                                    uint64_t seed);

// Partition by attractor count; counts >= 4 pool into "4+".
// Keys: "0", "1", "2", "3", "4+".
std::map<std::string, std::vector<Example>> split_by_attractors(
    const std::vector<Example>& xs);

// Union of all keys >= 1.
std::vector<Example> any_attractors(
    const std::map<std::string, std::vector<Example>>& split);

// Bidirectional word <-> dense id map with reserved *MASK* and UNK rows.
class Vocab {
 public:
  static constexpr int kMask = 0;
  static constexpr int kUnk = 1;
  static constexpr const char* kMaskWord = "*MASK*";
  static constexpr const char* kUnkWord = "<unk>";

  Vocab() {
    add(kMaskWord);
    add(kUnkWord);
  }

  int add(const std::string& w) {
    auto [it, inserted] = ids_.emplace(w, static_cast<int>(words_.size()));
    if (inserted) words_.push_back(w);
    return it->second;
  }
  int id(const std::string& w) const {
    auto it = ids_.find(w);
    return it == ids_.end() ? kUnk : it->second;
  }
  const std::string& word(int id) const { return words_[id]; }
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace synlab
