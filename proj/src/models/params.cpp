#include "models/params.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace synlab {

using nlohmann::json;

Arch arch_from_string(const std::string& s) {
  if (s == "bilstm") return Arch::BiLstm;
  if (s == "constituency") return Arch::Constituency;
  if (s == "dependency") return Arch::Dependency;
  if (s == "headlex") return Arch::HeadLex;
  throw std::invalid_argument("unknown architecture: " + s);
}

const char* arch_str(Arch a) {
  switch (a) {
    case Arch::BiLstm: return "bilstm";
    case Arch::Constituency: return "constituency";
    case Arch::Dependency: return "dependency";
    case Arch::HeadLex: return "headlex";
  }
  return "?";
}

namespace {

Tensor uniform_tensor(int r, int c, std::mt19937_64& rng) {
  Tensor t(r, c);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (double& x : t.v) x = dist(rng);
  return t;
}

const char* kGates[4] = {"i", "f", "o", "u"};

}  // namespace

ParamBundle init_params(const ModelSpec& spec, std::mt19937_64& rng) {
  ParamBundle p;
  int de = spec.d_emb;
  int dh = spec.d_h;
  auto mat = [&](const std::string& name, int r, int c) {
    p[name] = uniform_tensor(r, c, rng);
  };
  switch (spec.arch) {
    case Arch::BiLstm:
      for (const char* dir : {"fwd", "bwd"}) {
        for (const char* g : kGates) {
          mat(std::string(dir) + ".W_" + g, dh, de);
          mat(std::string(dir) + ".U_" + g, dh, dh);
          mat(std::string(dir) + ".b_" + g, dh, 1);
        }
      }
      mat("cls.w", 1, 2 * dh);
      mat("cls.b", 1, 1);
      break;
    case Arch::Constituency:
    case Arch::HeadLex:
      for (const char* g : kGates) {
        mat(std::string("W_") + g, dh, de);
        mat(std::string("b_") + g, dh, 1);
      }
      for (const char* g : {"i", "o", "u"}) {
        mat(std::string("U_") + g + "_1", dh, dh);
        mat(std::string("U_") + g + "_2", dh, dh);
      }
      // four independent forget recurrences, W_f/b_f shared across k
      mat("U_f_11", dh, dh);
      mat("U_f_12", dh, dh);
      mat("U_f_21", dh, dh);
      mat("U_f_22", dh, dh);
      mat("cls.w", 1, dh);
      mat("cls.b", 1, 1);
      break;
    case Arch::Dependency:
      for (const char* g : kGates) {
        mat(std::string("W_") + g, dh, de);
        mat(std::string("U_") + g, dh, dh);
        mat(std::string("b_") + g, dh, 1);
      }
      mat("cls.w", 1, dh);
      mat("cls.b", 1, 1);
      break;
  }
  return p;
}

EmbeddingTable init_embeddings(int vocab_size, int dim, std::mt19937_64& rng,
                               bool trainable) {
  EmbeddingTable t;
  t.weights = uniform_tensor(vocab_size, dim, rng);
  t.trainable = trainable;
  return t;
}

Checkpoint init_checkpoint(const ModelSpec& spec, const Vocab& vocab,
                           uint64_t seed, bool emb_trainable) {
  std::mt19937_64 rng(seed);
  Checkpoint c;
  c.spec = spec;
  c.vocab = vocab;
  c.params = init_params(spec, rng);
  c.embeddings = init_embeddings(vocab.size(), spec.d_emb, rng, emb_trainable);
  return c;
}

namespace {

json tensor_to_json(const Tensor& t) {
  return json{{"rows", t.rows}, {"cols", t.cols}, {"data", t.v}};
}

Tensor tensor_from_json(const json& j) {
  Tensor t(j.at("rows").get<int>(), j.at("cols").get<int>());
  t.v = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(t.v.size()) != t.size()) {
    throw std::runtime_error("checkpoint tensor size mismatch");
  }
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json j;
  j["version"] = 1;
  j["arch"] = arch_str(ckpt.spec.arch);
  j["d_emb"] = ckpt.spec.d_emb;
  j["d_h"] = ckpt.spec.d_h;
  j["vocab"] = ckpt.vocab.words();
  j["embeddings"] = tensor_to_json(ckpt.embeddings.weights);
  j["embeddings_trainable"] = ckpt.embeddings.trainable;
  json params = json::object();
  for (const auto& [name, t] : ckpt.params) params[name] = tensor_to_json(t);
  j["params"] = params;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j = json::parse(in);
  if (j.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  Checkpoint c;
  c.spec.arch = arch_from_string(j.at("arch").get<std::string>());
  c.spec.d_emb = j.at("d_emb").get<int>();
  c.spec.d_h = j.at("d_h").get<int>();
  auto words = j.at("vocab").get<std::vector<std::string>>();
  for (const std::string& w : words) c.vocab.add(w);
  if (c.vocab.words() != words) {
    throw std::runtime_error("checkpoint vocab is malformed");
  }
  c.embeddings.weights = tensor_from_json(j.at("embeddings"));
  c.embeddings.trainable = j.at("embeddings_trainable").get<bool>();
  for (const auto& [name, tj] : j.at("params").items()) {
    c.params[name] = tensor_from_json(tj);
  }
  return c;
}

}  // namespace synlab
