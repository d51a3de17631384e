#include "treebank/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <json.hpp>

namespace synlab {

using nlohmann::json;

void validate_example(const Example& e) {
  int n = static_cast<int>(e.tokens.size());
  if (n == 0) throw std::runtime_error("example: tokens empty");
  if (e.mask_index < 0 || e.mask_index >= n) {
    throw std::runtime_error("example: mask_index out of range");
  }
  if (static_cast<int>(e.dep_heads.size()) != n) {
    throw std::runtime_error("example: heads length mismatch");
  }
  validate_heads(e.dep_heads);
  if (e.dep_heads[e.mask_index] != 0) {
    throw std::runtime_error("example: masked token is not the dependency root");
  }
  validate_tree(e.const_tree, n);
  if (e.attractors < 0) throw std::runtime_error("example: attractors < 0");
}

void write_corpus(const std::string& path, const std::vector<Example>& xs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const Example& e : xs) {
    json j;
    j["tokens"] = e.tokens;
    j["mask_index"] = e.mask_index;
    j["label"] = label_str(e.label);
    j["const_tree"] = serialize_tree(e.const_tree);
    j["heads"] = e.dep_heads;
    j["attractors"] = e.attractors;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Example> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<Example> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Example e;
    try {
      json j = json::parse(line);
      e.tokens = j.at("tokens").get<std::vector<std::string>>();
      e.mask_index = j.at("mask_index").get<int>();
      std::string lab = j.at("label").get<std::string>();
      if (lab == "sg") {
        e.label = Label::Singular;
      } else if (lab == "pl") {
        e.label = Label::Plural;
      } else {
        throw std::runtime_error("label must be \"sg\" or \"pl\"");
      }
      e.const_tree = parse_tree(j.at("const_tree").get<std::string>());
      e.dep_heads = j.at("heads").get<std::vector<int>>();
      e.attractors = j.at("attractors").get<int>();
      validate_example(e);
    } catch (const std::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Example> balance_labels(const std::vector<Example>& xs,
                                    uint64_t seed) {
  std::vector<size_t> sg, pl;
  for (size_t i = 0; i < xs.size(); ++i) {
    (xs[i].label == Label::Singular ? sg : pl).push_back(i);
  }
  if (sg.empty() || pl.empty()) {
    throw std::runtime_error("balance_labels: a label class is absent");
  }
  std::mt19937_64 rng(seed);
  auto& major = sg.size() >= pl.size() ? sg : pl;
  size_t keep = std::min(sg.size(), pl.size());
  std::shuffle(major.begin(), major.end(), rng);
  major.resize(keep);

  std::vector<size_t> all;
  all.insert(all.end(), sg.begin(), sg.end());
  all.insert(all.end(), pl.begin(), pl.end());
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<Example> out;
  out.reserve(all.size());
  for (size_t i : all) out.push_back(xs[i]);
  return out;
}

std::map<std::string, std::vector<Example>> split_by_attractors(
    const std::vector<Example>& xs) {
  std::map<std::string, std::vector<Example>> out;
  for (const char* k : {"0", "1", "2", "3", "4+"}) out[k];
  for (const Example& e : xs) {
    std::string key =
        e.attractors >= 4 ? "4+" : std::to_string(e.attractors);
    out[key].push_back(e);
  }
  return out;
}

std::vector<Example> any_attractors(
    const std::map<std::string, std::vector<Example>>& split) {
  std::vector<Example> out;
  for (const auto& [key, xs] : split) {
    if (key == "0") continue;
    out.insert(out.end(), xs.begin(), xs.end());
  }
  return out;
}

}  // namespace synlab
