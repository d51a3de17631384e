#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "treebank/example.hpp"

namespace synlab {

enum class Sym {
  S,
  DetP_s,
  DetP_p,
  NP_s,
  NP_p,
  PP,
  VP_s,
  VP_p,
  Det,
  Noun_s,
  Noun_p,
  Verb_s,
  Verb_p,
  Adj,
  Prep,
};

const char* sym_name(Sym s);
bool is_preterminal(Sym s);

struct Production {
  Sym lhs;
  std::vector<Sym> rhs;
  double prob;
};

enum class Variant { Test, Augmentation };

Variant variant_from_string(const std::string& s);
const char* variant_str(Variant v);

struct Grammar {
  Variant variant;
  std::vector<Production> productions;
  std::map<Sym, std::vector<std::string>> lexicon;

  std::vector<int> prods_for(Sym lhs) const;
};

Grammar load_builtin_grammar(Variant variant);

struct GToken {
  std::string word;
  Sym tag;  // preterminal
};

struct DerivNode {
  Sym sym;
  int prod = -1;  // production index for expanded nonterminals
  std::vector<std::unique_ptr<DerivNode>> kids;
  int token = -1;  // token position for terminals
};

struct Derivation {
  std::unique_ptr<DerivNode> root;
  std::vector<GToken> tokens;
  int subject_index = -1;  // subject head noun
  int verb_index = -1;     // main verb
  int object_index = -1;   // object head noun
  bool has_pp = false;
  std::vector<int> production_counts;  // indexed like Grammar::productions

  std::string sentence() const;
};

struct SampleStats {
  long attempts = 0;
  long depth_rejections = 0;
};

// One complete derivation; terminals uniform over their lexicon. PP nesting
// depth is capped at 4; deeper draws are resampled (counted in stats).
Derivation sample_derivation(const Grammar& g, std::mt19937_64& rng,
                             SampleStats* stats = nullptr);

// Unary NP -> Noun collapses so the noun is a leaf; everything else in the
// grammar is binary already.
ConstTree derive_const_tree(const Derivation& d);

// Deterministic head rules: main verb is root; subject/object head nouns
// attach to the verb; determiners and adjectives attach to the head noun of
// their NP; a PP's preposition attaches to the head noun of the NP it
// modifies; the noun inside the PP attaches to the preposition.
std::vector<int> derive_dep_heads(const Derivation& d);

// Nouns strictly between subject and verb with the opposite number.
int count_attractors(const std::vector<GToken>& tokens, int subject_index,
                     int verb_index);

Example make_example(const Derivation& d);

struct GenConstraints {
  std::optional<int> min_attractors;
  std::optional<int> max_attractors;
  std::set<std::string> exclude;  // sentence strings
  bool balance = false;
  // When set, each slot draws a Bernoulli(pp_rate) target for PP presence
  // and resamples until it is met.
  std::optional<double> pp_rate;
  // Restrict to 5-token transitive clauses whose two nouns disagree in
  // number (the dependency model's ambiguous case).
  bool minimal_ambiguous = false;
  long max_attempts_per_example = 200000;
};

// n distinct examples satisfying the constraints, deterministic given seed.
// Throws std::runtime_error reporting attempts if a slot cannot be filled.
std::vector<Example> gen_corpus(const Grammar& g, int n, uint64_t seed,
                                const GenConstraints& c = {});

// CSV: label balance, attractor histogram, PP rate, length histogram.
std::string corpus_stats_csv(const std::vector<Example>& xs);

// All built-in grammar words plus *MASK* / UNK, in a fixed order.
class Vocab;
Vocab builtin_vocab();

// True if any token is one of the grammar's prepositions.
bool has_pp_token(const std::vector<std::string>& tokens);

}  // namespace synlab
