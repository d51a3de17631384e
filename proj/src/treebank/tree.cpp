#include "treebank/tree.hpp"

#include <functional>

namespace synlab {

int ConstTree::leaf_count() const {
  int n = 0;
  for (const Node& node : nodes)
    if (node.leaf >= 0) ++n;
  return n;
}

std::string serialize_tree(const ConstTree& t) {
  std::string out;
  std::function<void(int)> rec = [&](int id) {
    const ConstTree::Node& n = t.nodes[id];
    if (n.leaf >= 0) {
      out += std::to_string(n.leaf);
    } else {
      out += '(';
      rec(n.left);
      out += ' ';
      rec(n.right);
      out += ')';
    }
  };
  if (t.root < 0) throw std::runtime_error("serialize_tree: empty tree");
  rec(t.root);
  return out;
}

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  ConstTree tree;

  explicit Parser(const std::string& str) : s(str) {}

  void skip_ws() {
    while (pos < s.size() && s[pos] == ' ') ++pos;
  }

  int parse_node() {
    skip_ws();
    if (pos >= s.size()) throw TreeParseError("unexpected end of input", pos);
    if (s[pos] == '(') {
      size_t open = pos++;
      int left = parse_node();
      skip_ws();
      if (pos < s.size() && s[pos] == ')') {
        throw TreeParseError("internal node with one child", open);
      }
      int right = parse_node();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') {
        throw TreeParseError("expected ')' (non-binary or unbalanced node)",
                             pos);
      }
      ++pos;
      return tree.add_internal(left, right);
    }
    if (s[pos] < '0' || s[pos] > '9') {
      throw TreeParseError(std::string("unexpected character '") + s[pos] +
                               "'",
                           pos);
    }
    size_t start = pos;
    long v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      v = v * 10 + (s[pos] - '0');
      if (v > 1000000) throw TreeParseError("leaf index out of range", start);
      ++pos;
    }
    return tree.add_leaf(static_cast<int>(v));
  }
};

}  // namespace

ConstTree parse_tree(const std::string& s) {
  Parser p(s);
  p.tree.root = p.parse_node();
  p.skip_ws();
  if (p.pos != s.size()) {
    throw TreeParseError("trailing input after tree", p.pos);
  }
  return std::move(p.tree);
}

void validate_tree(const ConstTree& t, int n_tokens) {
  if (t.root < 0 || t.root >= static_cast<int>(t.nodes.size())) {
    throw std::runtime_error("const_tree: missing root");
  }
  std::vector<int> leaves;
  std::function<void(int)> rec = [&](int id) {
    if (id < 0 || id >= static_cast<int>(t.nodes.size())) {
      throw std::runtime_error("const_tree: node id out of range");
    }
    const ConstTree::Node& n = t.nodes[id];
    if (n.leaf >= 0) {
      leaves.push_back(n.leaf);
      return;
    }
    if (n.left < 0 || n.right < 0) {
      throw std::runtime_error("const_tree: internal node is not binary");
    }
    rec(n.left);
    rec(n.right);
  };
  rec(t.root);
  if (static_cast<int>(leaves.size()) != n_tokens) {
    throw std::runtime_error("const_tree: " + std::to_string(leaves.size()) +
                             " leaves for " + std::to_string(n_tokens) +
                             " tokens");
  }
  for (int i = 0; i < n_tokens; ++i) {
    if (leaves[i] != i) {
      throw std::runtime_error("const_tree: leaf " + std::to_string(i) +
                               " holds token index " +
                               std::to_string(leaves[i]));
    }
  }
}

void validate_heads(const std::vector<int>& heads) {
  int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    if (heads[i] < 0 || heads[i] > n) {
      throw std::runtime_error("dep_heads: head index out of range at token " +
                               std::to_string(i));
    }
    if (heads[i] == 0) ++roots;
  }
  if (roots != 1) {
    throw std::runtime_error("dep_heads: expected exactly one root, found " +
                             std::to_string(roots));
  }
  for (int i = 0; i < n; ++i) depth_in_dep_tree(heads, i);  // cycle check
}

int depth_in_dep_tree(const std::vector<int>& heads, int token) {
  int n = static_cast<int>(heads.size());
  if (token < 0 || token >= n) {
    throw std::invalid_argument("depth_in_dep_tree: token out of range");
  }
  int depth = 0;
  int cur = token;
  while (heads[cur] != 0) {
    cur = heads[cur] - 1;
    if (++depth > n) {
      throw std::runtime_error("depth_in_dep_tree: cycle through token " +
                               std::to_string(token));
    }
  }
  return depth;
}

HeadLexTree head_lexicalize(const ConstTree& tree,
                            const std::vector<int>& heads) {
  validate_tree(tree, static_cast<int>(heads.size()));
  std::vector<int> depth(heads.size());
  for (size_t i = 0; i < heads.size(); ++i) {
    depth[i] = depth_in_dep_tree(heads, static_cast<int>(i));
  }
  HeadLexTree out;
  out.tree = tree;
  out.head.assign(tree.nodes.size(), -1);
  std::function<int(int)> rec = [&](int id) -> int {
    const ConstTree::Node& n = tree.nodes[id];
    int h;
    if (n.leaf >= 0) {
      h = n.leaf;
    } else {
      int hl = rec(n.left);
      int hr = rec(n.right);
      // strict < keeps the leftmost token on ties
      h = depth[hr] < depth[hl] ? hr : hl;
    }
    out.head[id] = h;
    return h;
  };
  rec(tree.root);
  return out;
}

}  // namespace synlab
