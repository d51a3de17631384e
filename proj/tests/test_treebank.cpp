#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <filesystem>
#include <random>

#include "grammar/grammar.hpp"
#include "treebank/corpus.hpp"
#include "treebank/tree.hpp"

using namespace synlab;

namespace {

const std::vector<int> kFig2Heads = {2, 6, 2, 5, 3, 0, 8, 6};
const char* kFig2Tree = "((0 (1 (2 (3 4)))) (5 (6 7)))";

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<Example> sample_corpus(int n, uint64_t seed,
                                   Variant v = Variant::Test) {
  Grammar g = load_builtin_grammar(v);
  return gen_corpus(g, n, seed);
}

}  // namespace

TEST_CASE("serialize round trip") {
  ConstTree leaf;
  leaf.root = leaf.add_leaf(0);
  CHECK(serialize_tree(leaf) == "0");

  ConstTree t = parse_tree(kFig2Tree);
  CHECK(serialize_tree(t) == kFig2Tree);
  validate_tree(t, 8);

  std::mt19937_64 rng(1);
  Grammar g = load_builtin_grammar(Variant::Test);
  for (int i = 0; i < 1000; ++i) {
    Example e = make_example(sample_derivation(g, rng));
    std::string s = serialize_tree(e.const_tree);
    CHECK(serialize_tree(parse_tree(s)) == s);
  }
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parse_tree("((0 1)"), TreeParseError);
  CHECK_THROWS_AS(parse_tree("(0 1 2)"), TreeParseError);
  CHECK_THROWS_AS(parse_tree("(0)"), TreeParseError);
  CHECK_THROWS_AS(parse_tree("(0 x)"), TreeParseError);
  try {
    parse_tree("(0 1) extra");
  } catch (const TreeParseError& e) {
    CHECK(e.offset == 6);
  }
}

TEST_CASE("validate_tree rejects out-of-order leaves") {
  ConstTree t = parse_tree("(1 0)");
  CHECK_THROWS_AS(validate_tree(t, 2), std::runtime_error);
  CHECK_THROWS_AS(validate_tree(parse_tree("(0 2)"), 2), std::runtime_error);
}

TEST_CASE("dependency depth") {
  CHECK(depth_in_dep_tree(kFig2Heads, 5) == 0);   // root verb
  CHECK(depth_in_dep_tree(kFig2Heads, 4) == 3);   // table -> near -> bakers -> bake
  std::vector<int> cyclic = {2, 1};
  CHECK_THROWS_WITH_AS(depth_in_dep_tree(cyclic, 0), doctest::Contains("cycle"),
                       std::runtime_error);

  std::mt19937_64 rng(2);
  Grammar g = load_builtin_grammar(Variant::Test);
  for (int i = 0; i < 200; ++i) {
    Example e = make_example(sample_derivation(g, rng));
    for (size_t tok = 0; tok < e.tokens.size(); ++tok) {
      // independent path walk
      int depth = 0, cur = static_cast<int>(tok);
      while (e.dep_heads[cur] != 0) {
        cur = e.dep_heads[cur] - 1;
        ++depth;
      }
      CHECK(depth_in_dep_tree(e.dep_heads, static_cast<int>(tok)) == depth);
    }
  }
}

TEST_CASE("head lexicalization on a reference dependency parse") {
  ConstTree t = parse_tree(kFig2Tree);
  HeadLexTree hl = head_lexicalize(t, kFig2Heads);
  // the bakers near the table bake the cake
  CHECK(hl.head[hl.tree.root] == 5);  // bake
  // find the node spanning tokens 0..4 and the one spanning 2..4
  auto yield_range = [&](int id, auto&& self) -> std::pair<int, int> {
    const ConstTree::Node& n = hl.tree.nodes[id];
    if (n.leaf >= 0) return {n.leaf, n.leaf};
    auto l = self(n.left, self);
    auto r = self(n.right, self);
    return {l.first, r.second};
  };
  for (size_t id = 0; id < hl.tree.nodes.size(); ++id) {
    auto [lo, hi] = yield_range(static_cast<int>(id), yield_range);
    if (lo == 0 && hi == 4) CHECK(hl.head[id] == 1);  // bakers
    if (lo == 2 && hi == 4) CHECK(hl.head[id] == 2);  // near
    if (lo == 3 && hi == 4) CHECK(hl.head[id] == 4);  // table
    if (hl.tree.nodes[id].leaf >= 0) {
      CHECK(hl.head[id] == hl.tree.nodes[id].leaf);
    }
  }
}

TEST_CASE("head lexicalization: projection and idempotence") {
  std::mt19937_64 rng(4);
  Grammar g = load_builtin_grammar(Variant::Test);
  for (int i = 0; i < 1000; ++i) {
    Example e = make_example(sample_derivation(g, rng));
    HeadLexTree hl = head_lexicalize(e.const_tree, e.dep_heads);
    for (size_t id = 0; id < hl.tree.nodes.size(); ++id) {
      const ConstTree::Node& n = hl.tree.nodes[id];
      if (n.leaf < 0) {
        bool from_child = hl.head[id] == hl.head[n.left] ||
                          hl.head[id] == hl.head[n.right];
        CHECK(from_child);
      }
    }
    CHECK(hl.head[hl.tree.root] == e.mask_index);
    HeadLexTree again = head_lexicalize(e.const_tree, e.dep_heads);
    CHECK(again.head == hl.head);
  }
}

TEST_CASE("head_lexicalize rejects inconsistent token counts") {
  ConstTree t = parse_tree("(0 1)");
  CHECK_THROWS_AS(head_lexicalize(t, {2, 0, 2}), std::runtime_error);
}

TEST_CASE("corpus file round trip") {
  std::string path = temp_path("synlab_corpus_test.jsonl");
  write_corpus(path, {});
  CHECK(read_corpus(path).empty());

  std::vector<Example> xs = sample_corpus(1000, 77);
  write_corpus(path, xs);
  std::vector<Example> ys = read_corpus(path);
  REQUIRE(ys.size() == xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(ys[i].tokens == xs[i].tokens);
    CHECK(ys[i].mask_index == xs[i].mask_index);
    CHECK(ys[i].label == xs[i].label);
    CHECK(serialize_tree(ys[i].const_tree) ==
          serialize_tree(xs[i].const_tree));
    CHECK(ys[i].dep_heads == xs[i].dep_heads);
    CHECK(ys[i].attractors == xs[i].attractors);
  }
  std::remove(path.c_str());
}

TEST_CASE("corpus read errors carry the line number") {
  std::string path = temp_path("synlab_corpus_bad.jsonl");
  {
    std::vector<Example> xs = sample_corpus(1, 5);
    write_corpus(path, xs);
    FILE* f = std::fopen(path.c_str(), "a");
    std::fputs("{not json\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(read_corpus(path), doctest::Contains(":2"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("balance_labels") {
  std::vector<Example> xs = sample_corpus(100, 13);
  auto relabel = [&](int sg_count) {
    Grammar g = load_builtin_grammar(Variant::Test);
    GenConstraints sg_only;
    // build 60 sg / 40 pl by filtering generated examples
    std::vector<Example> out;
    std::mt19937_64 rng(99);
    int sg = 0, pl = 0;
    while (sg < sg_count || pl < 100 - sg_count) {
      Example e = make_example(sample_derivation(g, rng));
      if (e.label == Label::Singular && sg < sg_count) {
        out.push_back(e);
        ++sg;
      } else if (e.label == Label::Plural && pl < 100 - sg_count) {
        out.push_back(e);
        ++pl;
      }
    }
    return out;
  };
  std::vector<Example> skewed = relabel(60);
  std::vector<Example> balanced = balance_labels(skewed, 1);
  int sg = 0, pl = 0;
  for (const Example& e : balanced) {
    (e.label == Label::Singular ? sg : pl) += 1;
  }
  CHECK(sg == 40);
  CHECK(pl == 40);

  std::vector<Example> even = relabel(50);
  std::vector<Example> still = balance_labels(even, 1);
  CHECK(still.size() == even.size());

  std::vector<Example> one_class;
  for (const Example& e : skewed) {
    if (e.label == Label::Singular) one_class.push_back(e);
  }
  CHECK_THROWS_AS(balance_labels(one_class, 1), std::runtime_error);
}

TEST_CASE("split_by_attractors partitions exhaustively and disjointly") {
  std::vector<Example> xs = sample_corpus(500, 21);
  auto split = split_by_attractors(xs);
  size_t total = 0;
  for (const auto& [key, group] : split) {
    total += group.size();
    for (const Example& e : group) {
      if (key == "4+") {
        CHECK(e.attractors >= 4);
      } else {
        CHECK(std::to_string(e.attractors) == key);
      }
    }
  }
  CHECK(total == xs.size());
  auto any = any_attractors(split);
  CHECK(any.size() == xs.size() - split.at("0").size());
  for (const Example& e : any) CHECK(e.attractors >= 1);
}

TEST_CASE("vocab has dense ids with reserved rows") {
  Vocab v = builtin_vocab();
  CHECK(v.id(Vocab::kMaskWord) == Vocab::kMask);
  CHECK(v.id(Vocab::kUnkWord) == Vocab::kUnk);
  CHECK(v.id("zzz-not-a-word") == Vocab::kUnk);
  CHECK(v.size() == 2 + 1 + 17 * 4 + 13 + 4);
  for (int i = 0; i < v.size(); ++i) CHECK(v.id(v.word(i)) == i);
}
