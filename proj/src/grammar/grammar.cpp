#include "grammar/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "treebank/corpus.hpp"

namespace synlab {

namespace {

const std::vector<std::string> kNounS = {
    "plane",    "plant",  "bear",  "bird",    "car",   "dancer",
    "singer",   "president", "squirrel", "cloud", "actor", "doctor",
    "nurse",    "chair",  "student", "teacher", "fern"};
const std::vector<std::string> kNounP = {
    "planes",   "plants", "bears", "birds",   "cars",  "dancers",
    "singers",  "presidents", "squirrels", "clouds", "actors", "doctors",
    "nurses",   "chairs", "students", "teachers", "ferns"};
const std::vector<std::string> kVerbS = {
    "eats",   "pleases", "loves",  "likes",  "hates",   "destroys",
    "creates", "fights", "bites",  "shoots", "arrests", "takes",
    "leaves", "buys",    "brings", "carries", "kicks"};
const std::vector<std::string> kVerbP = {
    "eat",   "please", "love",  "like",  "hate",   "destroy",
    "create", "fight", "bite",  "shoot", "arrest", "take",
    "leave", "buy",    "bring", "carry", "kick"};
const std::vector<std::string> kAdj = {
    "fancy", "green", "handsome", "pretty",    "large", "big", "scary",
    "nice",  "happy", "sad",      "dangerous", "evil",  "sloppy"};
const std::vector<std::string> kPrep = {"on", "by", "near", "around"};
const std::vector<std::string> kDet = {"the"};

constexpr int kPpDepthCap = 4;

struct DepthCapHit {};

}  // namespace

const char* sym_name(Sym s) {
  switch (s) {
    case Sym::S: return "S";
    case Sym::DetP_s: return "DetP_s";
    case Sym::DetP_p: return "DetP_p";
    case Sym::NP_s: return "NP_s";
    case Sym::NP_p: return "NP_p";
    case Sym::PP: return "PP";
    case Sym::VP_s: return "VP_s";
    case Sym::VP_p: return "VP_p";
    case Sym::Det: return "Det";
    case Sym::Noun_s: return "Noun_s";
    case Sym::Noun_p: return "Noun_p";
    case Sym::Verb_s: return "Verb_s";
    case Sym::Verb_p: return "Verb_p";
    case Sym::Adj: return "Adj";
    case Sym::Prep: return "Prep";
  }
  return "?";
}

bool is_preterminal(Sym s) {
  switch (s) {
    case Sym::Det:
    case Sym::Noun_s:
    case Sym::Noun_p:
    case Sym::Verb_s:
    case Sym::Verb_p:
    case Sym::Adj:
    case Sym::Prep:
      return true;
    default:
      return false;
  }
}

Variant variant_from_string(const std::string& s) {
  if (s == "test") return Variant::Test;
  if (s == "augmentation" || s == "aug") return Variant::Augmentation;
  throw std::invalid_argument("unknown grammar variant: " + s);
}

const char* variant_str(Variant v) {
  return v == Variant::Test ? "test" : "augmentation";
}

std::vector<int> Grammar::prods_for(Sym lhs) const {
  std::vector<int> out;
  for (size_t i = 0; i < productions.size(); ++i) {
    if (productions[i].lhs == lhs) out.push_back(static_cast<int>(i));
  }
  return out;
}

Grammar load_builtin_grammar(Variant variant) {
  Grammar g;
  g.variant = variant;
  // NP expansion probabilities ordered (Adj NP, NP PP, Noun).
  double p_adj, p_pp, p_noun;
  if (variant == Variant::Test) {
    p_adj = 0.1;
    p_pp = 0.1;
    p_noun = 0.8;
  } else {
    p_adj = 0.69;
    p_pp = 0.04;
    p_noun = 0.27;
  }
  auto& P = g.productions;
  P.push_back({Sym::S, {Sym::DetP_s, Sym::VP_s}, 0.5});
  P.push_back({Sym::S, {Sym::DetP_p, Sym::VP_p}, 0.5});
  P.push_back({Sym::DetP_s, {Sym::Det, Sym::NP_s}, 1.0});
  P.push_back({Sym::DetP_p, {Sym::Det, Sym::NP_p}, 1.0});
  P.push_back({Sym::NP_s, {Sym::Adj, Sym::NP_s}, p_adj});
  P.push_back({Sym::NP_s, {Sym::NP_s, Sym::PP}, p_pp});
  P.push_back({Sym::NP_s, {Sym::Noun_s}, p_noun});
  P.push_back({Sym::NP_p, {Sym::Adj, Sym::NP_p}, p_adj});
  P.push_back({Sym::NP_p, {Sym::NP_p, Sym::PP}, p_pp});
  P.push_back({Sym::NP_p, {Sym::Noun_p}, p_noun});
  P.push_back({Sym::PP, {Sym::Prep, Sym::DetP_s}, 0.5});
  P.push_back({Sym::PP, {Sym::Prep, Sym::DetP_p}, 0.5});
  P.push_back({Sym::VP_s, {Sym::Verb_s, Sym::DetP_s}, 0.5});
  P.push_back({Sym::VP_s, {Sym::Verb_s, Sym::DetP_p}, 0.5});
  P.push_back({Sym::VP_p, {Sym::Verb_p, Sym::DetP_s}, 0.5});
  P.push_back({Sym::VP_p, {Sym::Verb_p, Sym::DetP_p}, 0.5});

  g.lexicon[Sym::Det] = kDet;
  g.lexicon[Sym::Noun_s] = kNounS;
  g.lexicon[Sym::Noun_p] = kNounP;
  g.lexicon[Sym::Verb_s] = kVerbS;
  g.lexicon[Sym::Verb_p] = kVerbP;
  g.lexicon[Sym::Adj] = kAdj;
  g.lexicon[Sym::Prep] = kPrep;
  return g;
}

std::string Derivation::sentence() const {
  std::string s;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i].word;
  }
  return s;
}

namespace {

// Head noun token of an NP/DetP subtree.
int np_head(const DerivNode& n) {
  switch (n.sym) {
    case Sym::DetP_s:
    case Sym::DetP_p:
      return np_head(*n.kids[1]);
    case Sym::NP_s:
    case Sym::NP_p:
      if (n.kids.size() == 1) return np_head(*n.kids[0]);  // NP -> Noun
      if (n.kids[0]->sym == Sym::Adj) return np_head(*n.kids[1]);
      return np_head(*n.kids[0]);  // NP PP
    case Sym::Noun_s:
    case Sym::Noun_p:
      return n.token;
    default:
      throw std::logic_error("np_head: unexpected symbol");
  }
}

struct Sampler {
  const Grammar& g;
  std::mt19937_64& rng;
  Derivation d;
  int pp_depth = 0;

  std::unique_ptr<DerivNode> expand(Sym sym) {
    auto node = std::make_unique<DerivNode>();
    node->sym = sym;
    if (is_preterminal(sym)) {
      const auto& words = g.lexicon.at(sym);
      std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
      node->token = static_cast<int>(d.tokens.size());
      d.tokens.push_back({words[pick(rng)], sym});
      return node;
    }
    if (sym == Sym::PP) {
      if (pp_depth >= kPpDepthCap) throw DepthCapHit{};
      ++pp_depth;
    }
    std::vector<int> choices = g.prods_for(sym);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    int chosen = choices.back();
    double acc = 0.0;
    for (int pi : choices) {
      acc += g.productions[pi].prob;
      if (u < acc) {
        chosen = pi;
        break;
      }
    }
    node->prod = chosen;
    d.production_counts[chosen] += 1;
    if (sym == Sym::PP) d.has_pp = true;
    for (Sym child : g.productions[chosen].rhs) {
      node->kids.push_back(expand(child));
    }
    if (sym == Sym::PP) --pp_depth;
    return node;
  }
};

}  // namespace

Derivation sample_derivation(const Grammar& g, std::mt19937_64& rng,
                             SampleStats* stats) {
  for (;;) {
    if (stats) ++stats->attempts;
    Sampler s{g, rng};
    s.d.production_counts.assign(g.productions.size(), 0);
    try {
      s.d.root = s.expand(Sym::S);
    } catch (const DepthCapHit&) {
      if (stats) ++stats->depth_rejections;
      continue;
    }
    const DerivNode& root = *s.d.root;
    s.d.subject_index = np_head(*root.kids[0]);
    const DerivNode& vp = *root.kids[1];
    s.d.verb_index = vp.kids[0]->token;
    s.d.object_index = np_head(*vp.kids[1]);
    return std::move(s.d);
  }
}

ConstTree derive_const_tree(const Derivation& d) {
  ConstTree t;
  std::function<int(const DerivNode&)> rec = [&](const DerivNode& n) -> int {
    if (n.token >= 0) return t.add_leaf(n.token);
    if (n.kids.size() == 1) return rec(*n.kids[0]);  // collapse NP -> Noun
    int left = rec(*n.kids[0]);
    int right = rec(*n.kids[1]);
    return t.add_internal(left, right);
  };
  t.root = rec(*d.root);
  return t;
}

namespace {

// Attach everything inside an NP given the head noun it modifies is already
// known; heads are written as 1-based indices.
void attach_np(const DerivNode& np, int head_noun, std::vector<int>& heads);

void attach_detp(const DerivNode& detp, int attach_to,
                 std::vector<int>& heads) {
  int head = np_head(detp);
  heads[detp.kids[0]->token] = head + 1;  // determiner -> head noun
  heads[head] = attach_to + 1;
  attach_np(*detp.kids[1], head, heads);
}

void attach_np(const DerivNode& np, int head_noun, std::vector<int>& heads) {
  if (np.kids.size() == 1) return;  // bare noun
  if (np.kids[0]->sym == Sym::Adj) {
    heads[np.kids[0]->token] = head_noun + 1;
    attach_np(*np.kids[1], head_noun, heads);
    return;
  }
  // NP PP: the PP modifies the left NP (same head noun)
  attach_np(*np.kids[0], head_noun, heads);
  const DerivNode& pp = *np.kids[1];
  int prep = pp.kids[0]->token;
  heads[prep] = head_noun + 1;
  attach_detp(*pp.kids[1], prep, heads);
}

}  // namespace

std::vector<int> derive_dep_heads(const Derivation& d) {
  std::vector<int> heads(d.tokens.size(), -1);
  const DerivNode& root = *d.root;
  int verb = d.verb_index;
  heads[verb] = 0;
  // subject -> verb, with verb temporarily acting as 0-based attach target
  attach_detp(*root.kids[0], verb, heads);
  attach_detp(*root.kids[1]->kids[1], verb, heads);
  return heads;
}

int count_attractors(const std::vector<GToken>& tokens, int subject_index,
                     int verb_index) {
  if (subject_index >= verb_index) {
    throw std::invalid_argument("count_attractors: subject must precede verb");
  }
  Sym subj = tokens[subject_index].tag;
  Sym opposite = subj == Sym::Noun_s ? Sym::Noun_p : Sym::Noun_s;
  int n = 0;
  for (int i = subject_index + 1; i < verb_index; ++i) {
    if (tokens[i].tag == opposite) ++n;
  }
  return n;
}

Example make_example(const Derivation& d) {
  Example e;
  e.tokens.reserve(d.tokens.size());
  for (const GToken& t : d.tokens) e.tokens.push_back(t.word);
  e.mask_index = d.verb_index;
  e.label = d.tokens[d.verb_index].tag == Sym::Verb_s ? Label::Singular
                                                      : Label::Plural;
  e.const_tree = derive_const_tree(d);
  e.dep_heads = derive_dep_heads(d);
  e.attractors = count_attractors(d.tokens, d.subject_index, d.verb_index);
  return e;
}

bool has_pp_token(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    if (std::find(kPrep.begin(), kPrep.end(), t) != kPrep.end()) return true;
  }
  return false;
}

std::vector<Example> gen_corpus(const Grammar& g, int n, uint64_t seed,
                                const GenConstraints& c) {
  if (n < 1) throw std::invalid_argument("gen_corpus: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::vector<Example> out;
  out.reserve(n);
  int need_sg = n - n / 2;
  int need_pl = n / 2;
  for (int slot = 0; slot < n; ++slot) {
    bool want_pp = false;
    if (c.pp_rate) {
      want_pp = std::uniform_real_distribution<double>(0.0, 1.0)(rng) <
                *c.pp_rate;
    }
    long attempts = 0;
    for (;;) {
      if (++attempts > c.max_attempts_per_example) {
        throw std::runtime_error(
            "gen_corpus: constraints unsatisfiable for example " +
            std::to_string(slot) + " after " + std::to_string(attempts - 1) +
            " attempts");
      }
      Derivation d = sample_derivation(g, rng);
      if (c.minimal_ambiguous) {
        if (d.tokens.size() != 5) continue;
        Sym subj = d.tokens[d.subject_index].tag;
        Sym obj = d.tokens[d.object_index].tag;
        if (subj == obj) continue;
      }
      Example e = make_example(d);
      if (c.min_attractors && e.attractors < *c.min_attractors) continue;
      if (c.max_attractors && e.attractors > *c.max_attractors) continue;
      if (c.pp_rate && d.has_pp != want_pp) continue;
      if (c.balance) {
        if (e.label == Label::Singular && need_sg == 0) continue;
        if (e.label == Label::Plural && need_pl == 0) continue;
      }
      std::string s = e.sentence();
      if (seen.count(s) || c.exclude.count(s)) continue;
      seen.insert(std::move(s));
      if (c.balance) {
        (e.label == Label::Singular ? need_sg : need_pl) -= 1;
      }
      out.push_back(std::move(e));
      break;
    }
  }
  return out;
}

std::string corpus_stats_csv(const std::vector<Example>& xs) {
  size_t sg = 0;
  std::map<int, size_t> attractor_hist;
  std::map<size_t, size_t> length_hist;
  size_t with_pp = 0;
  for (const Example& e : xs) {
    if (e.label == Label::Singular) ++sg;
    ++attractor_hist[e.attractors];
    ++length_hist[e.tokens.size()];
    if (has_pp_token(e.tokens)) ++with_pp;
  }
  std::ostringstream os;
  os << "metric,key,value\n";
  os << "count,,"<< xs.size() << "\n";
  os << "label,sg," << sg << "\n";
  os << "label,pl," << xs.size() - sg << "\n";
  for (const auto& [k, v] : attractor_hist) os << "attractors," << k << "," << v << "\n";
  os << "pp_rate,,"
     << (xs.empty() ? 0.0 : static_cast<double>(with_pp) / xs.size()) << "\n";
  for (const auto& [k, v] : length_hist) os << "length," << k << "," << v << "\n";
  return os.str();
}

Vocab builtin_vocab() {
  Vocab v;
  for (const auto* lex :
       {&kDet, &kNounS, &kNounP, &kVerbS, &kVerbP, &kAdj, &kPrep}) {
    for (const std::string& w : *lex) v.add(w);
  }
  return v;
}

}  // namespace synlab
