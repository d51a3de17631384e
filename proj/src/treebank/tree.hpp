#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace synlab {

// Strictly binary unlabeled constituency tree over token indices.
// Stored as an index arena; leaves carry the token index.
struct ConstTree {
  struct Node {
    int left = -1;
    int right = -1;
    int leaf = -1;  // token index, or -1 for internal nodes
  };
  std::vector<Node> nodes;
  int root = -1;

  bool is_leaf(int id) const { return nodes[id].leaf >= 0; }

  int add_leaf(int token) {
    nodes.push_back({-1, -1, token});
    return static_cast<int>(nodes.size()) - 1;
  }
  int add_internal(int left, int right) {
    nodes.push_back({left, right, -1});
    return static_cast<int>(nodes.size()) - 1;
  }

  int leaf_count() const;
};

struct TreeParseError : std::runtime_error {
  size_t offset;
  TreeParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " at byte " + std::to_string(off)),
        offset(off) {}
};

// Bracketed form with exactly two children per internal node, leaves as
// token indices: "((0 (1 (2 (3 4)))) (5 (6 7)))".
std::string serialize_tree(const ConstTree& t);
ConstTree parse_tree(const std::string& s);

// Leaves must be exactly 0..n_tokens-1 in left-to-right order; every
// internal node has two children. Throws std::runtime_error otherwise.
void validate_tree(const ConstTree& t, int n_tokens);

// heads[i] is the 1-based head index of token i, 0 for the root.
int depth_in_dep_tree(const std::vector<int>& heads, int token);
void validate_heads(const std::vector<int>& heads);

// Constituency tree with a head token per node (same arena ids as `tree`).
struct HeadLexTree {
  ConstTree tree;
  std::vector<int> head;  // head token index, indexed by tree node id
};

// Assign each constituency node the token in its yield with minimum
// dependency depth; ties go to the leftmost token.
HeadLexTree head_lexicalize(const ConstTree& tree,
                            const std::vector<int>& heads);

}  // namespace synlab
