#pragma once

// Loading of term files and the corpus manifest.

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../parser.hpp"
#include "../typing.hpp"

namespace pcfl::io {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CorpusTerm {
  std::string name;
  Term term;
  Type type;
  bool finite = true;  // the reduction graph is finite, so the semantics is computed exactly
};

struct CorpusPair {
  std::string left, right, expect;
  std::size_t test_depth = 4;
};

struct CorpusContext {
  std::string left, right;
  Context context;
  std::map<std::string, std::string> left_dist, right_dist;
};

struct Corpus {
  std::vector<CorpusTerm> terms;
  std::vector<CorpusPair> pairs;
  std::vector<CorpusContext> contexts;

  const CorpusTerm& at(const std::string& name) const {
    for (const auto& t : terms)
      if (t.name == name) return t;
    throw std::out_of_range("no corpus term " + name);
  }
};

inline Corpus load_corpus(const std::string& dir) {
  auto j = nlohmann::json::parse(read_file(dir + "/manifest.json"));
  Corpus c;
  for (const auto& e : j.at("terms")) {
    Term m = parse_term(read_file(dir + "/" + e.at("file").get<std::string>()));
    c.terms.push_back({e.at("name"), m, infer(m), e.value("finite", true)});
  }
  for (const auto& e : j.at("pairs"))
    c.pairs.push_back({e.at("left"), e.at("right"), e.at("expect"), e.value("test_depth", std::size_t{4})});
  for (const auto& e : j.value("contexts", nlohmann::json::array()))
    c.contexts.push_back({e.at("left"), e.at("right"), parse_context(e.at("context").get<std::string>()),
                          e.at("left_dist").get<std::map<std::string, std::string>>(),
                          e.at("right_dist").get<std::map<std::string, std::string>>()});
  return c;
}

}  // namespace pcfl::io
