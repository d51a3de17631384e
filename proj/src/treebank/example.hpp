#pragma once

#include <string>
#include <vector>

#include "treebank/tree.hpp"

namespace synlab {

enum class Label : int { Plural = 0, Singular = 1 };

inline const char* label_str(Label l) {
  return l == Label::Singular ? "sg" : "pl";
}

// One sentence of the masked-verb number-prediction task. The token at
// mask_index is kept in the stored example; masking happens at model-input
// time.
struct Example {
  std::vector<std::string> tokens;
  int mask_index = -1;
  Label label = Label::Plural;
  ConstTree const_tree;
  std::vector<int> dep_heads;  // 1-based heads, 0 for the root
  int attractors = 0;

  std::string sentence() const {
    std::string s;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i) s += ' ';
      s += tokens[i];
    }
    return s;
  }
};

// Throws std::runtime_error naming the violated field.
void validate_example(const Example& e);

}  // namespace synlab
