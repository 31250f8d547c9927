// Command-line driver.
//
// Exit codes: 0 success, 1 the analysis found the terms apart, 2 bad input,
// 3 a resource cap was hit.

#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "pcfl/io/corpus.hpp"
#include "pcfl/io/json.hpp"
#include "pcfl/pcfl.hpp"

using namespace pcfl;
using nlohmann::json;

namespace {

struct Options {
  EquivConfig cfg;
  bool as_json = false;
};

void add_config(CLI::App* cmd, Options& o) {
  cmd->add_option("--fuel", o.cfg.fuel, "evaluation fuel")->check(CLI::PositiveNumber);
  cmd->add_option("--arg-size", o.cfg.arg_size, "size bound of argument values")->check(CLI::PositiveNumber);
  cmd->add_option("--depth", o.cfg.depth, "exploration depth of the Markov chain")->check(CLI::PositiveNumber);
  cmd->add_option("--test-depth", o.cfg.test_depth, "depth bound of distinguishing tests")->check(CLI::PositiveNumber);
  cmd->add_option("--state-cap", o.cfg.state_cap, "maximum number of chain states")->check(CLI::PositiveNumber);
  cmd->add_flag("--json", o.as_json, "print JSON");
}

struct Loaded {
  Term term;
  Type type;
};

Loaded load(const std::string& path) {
  Term m = parse_term(io::read_file(path));
  if (!m.closed()) throw TypeError("program is not closed: " + m.str());
  return {m, infer(m)};
}

std::pair<Loaded, Loaded> load_pair(const std::string& a, const std::string& b) {
  Loaded l = load(a), r = load(b);
  if (l.type != r.type) throw TypeError("the programs have different types: " + l.type.str() + " and " + r.type.str());
  return {l, r};
}

void print_dist(const ValueDist& d, const Rational& deficit) {
  std::cout << "mass " << d.mass().get_str();
  if (sgn(deficit) > 0) std::cout << " (up to " << Rational(d.mass() + deficit).get_str() << ")";
  std::cout << "\n";
  for (const auto& [k, e] : d.entries()) std::cout << "  " << e.prob.get_str() << "\t" << e.value.str() << "\n";
}

std::string config_line(const EquivConfig& c) {
  return "fuel=" + std::to_string(c.fuel) + " arg-size=" + std::to_string(c.arg_size) +
         " depth=" + std::to_string(c.depth) + " test-depth=" + std::to_string(c.test_depth) +
         " state-cap=" + std::to_string(c.state_cap);
}

int report_verdict(const Verdict& v, const Options& o) {
  if (o.as_json) {
    std::cout << io::to_json(v).dump(2) << "\n";
  } else if (v.equivalent()) {
    std::cout << "equivalent up to bound (" << config_line(v.cfg) << ", " << v.states << " states, "
              << v.arg_count << " argument values)\n";
    if (v.partition_separated) std::cout << "note: bisimulation separates the roots but no test up to the depth bound does\n";
  } else {
    std::cout << "not equivalent\n";
    for (const auto& [x, t] : v.closure) std::cout << "closure " << x << " := " << t.str() << "\n";
    std::cout << "witness " << v.witness->test.str() << "\n";
    std::cout << "left " << to_string(v.witness->left) << "\nright " << to_string(v.witness->right) << "\n";
  }
  return v.equivalent() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analyses for a probabilistic PCF with lazy lists"};
  app.require_subcommand(1);
  Options o;
  std::string file_a, file_b, text_a, text_b, contexts_file;
  std::size_t samples = 24;

  auto* check = app.add_subcommand("check", "type-check a program");
  check->add_option("file", file_a)->required();

  auto* eval = app.add_subcommand("eval", "evaluate a program");
  eval->add_option("file", file_a)->required();
  add_config(eval, o);

  auto* equiv = app.add_subcommand("equiv", "bounded equivalence check of two programs");
  equiv->add_option("left", file_a)->required();
  equiv->add_option("right", file_b)->required();
  add_config(equiv, o);

  auto* sim = app.add_subcommand("sim", "simulation in both directions");
  sim->add_option("left", file_a)->required();
  sim->add_option("right", file_b)->required();
  add_config(sim, o);

  auto* dist = app.add_subcommand("distinguish", "search for a separating test");
  dist->add_option("left", file_a)->required();
  dist->add_option("right", file_b)->required();
  add_config(dist, o);

  auto* frag = app.add_subcommand("fragment", "export the explored Markov chain");
  frag->add_option("file", file_a)->required();
  add_config(frag, o);

  auto* ct = app.add_subcommand("compile-test", "turn a test into contexts");
  ct->add_option("test", text_a)->required();
  ct->add_option("type", text_b)->required();
  ct->add_flag("--json", o.as_json, "print JSON");

  auto* emb = app.add_subcommand("embed", "untyped image of a program");
  emb->add_option("file", file_a)->required();
  add_config(emb, o);

  auto* dis = app.add_subcommand("disentangle", "solve a probability assignment given as JSON");
  dis->add_option("file", file_a, "JSON file, or - for stdin")->required();

  auto* spot = app.add_subcommand("spot-check", "compare convergence of two programs in contexts");
  spot->add_option("left", file_a)->required();
  spot->add_option("right", file_b)->required();
  spot->add_option("--contexts", contexts_file, "file with one context per line");
  spot->add_option("--samples", samples, "number of compiled test contexts when no file is given");
  add_config(spot, o);

  auto* corpus = app.add_subcommand("corpus", "check the manifest verdicts of the bundled corpus");
  std::string corpus_dir = PCFL_CORPUS_DIR;
  corpus->add_option("--dir", corpus_dir, "corpus directory");
  add_config(corpus, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      Loaded l = load(file_a);
      std::cout << l.type.str() << "\n";
      return 0;
    }
    if (*eval) {
      Loaded l = load(file_a);
      Approx a = approximate(l.term, o.cfg.fuel);
      if (o.as_json) {
        json j = io::to_json(a.dist);
        j["deficit"] = a.deficit.get_str();
        j["exact"] = a.exact;
        std::cout << j.dump(2) << "\n";
      } else {
        print_dist(a.dist, a.deficit);
      }
      return 0;
    }
    if (*equiv) {
      auto [l, r] = load_pair(file_a, file_b);
      return report_verdict(check_equiv(l.term, r.term, l.type, o.cfg), o);
    }
    if (*sim || *dist || *frag) {
      Loaded l = load(file_a);
      std::vector<LmcState> roots{LmcState::program(l.term, l.type)};
      if (!*frag) {
        auto [a, b] = load_pair(file_a, file_b);
        roots.push_back(LmcState::program(b.term, b.type));
      }
      LmcFragment f = build_fragment(roots, arg_universe_for(l.type, o.cfg.arg_size), lmc_config(o.cfg));
      if (*frag) {
        std::cout << io::to_json(f).dump(2) << "\n";
        return 0;
      }
      std::size_t s = 0, t = *f.find(roots[1]);
      if (*sim) {
        Relation r = sim_preorder(f);
        if (o.as_json) {
          std::cout << json{{"left_below_right", bool(r[s][t])},
                            {"right_below_left", bool(r[t][s])},
                            {"states", f.size()},
                            {"config", io::to_json(o.cfg)}}
                           .dump(2)
                    << "\n";
        } else {
          std::cout << "left <= right: " << (r[s][t] ? "not refuted" : "no") << "\n";
          std::cout << "right <= left: " << (r[t][s] ? "not refuted" : "no") << "\n";
        }
        return 0;
      }
      auto w = find_distinguishing_test(f, s, t, {o.cfg.test_depth, o.cfg.max_tests});
      if (o.as_json) {
        json j = w ? json{{"test", w->test.str()}, {"p_left", io::to_json(w->left)}, {"p_right", io::to_json(w->right)}}
                   : json{{"test", nullptr}};
        std::cout << j.dump(2) << "\n";
      } else if (w) {
        std::cout << w->test.str() << "\nleft " << to_string(w->left) << "\nright " << to_string(w->right) << "\n";
      } else {
        std::cout << "none\n";
      }
      return w ? 1 : 0;
    }
    if (*ct) {
      Test t = parse_test(text_a);
      Type sigma = parse_type(text_b);
      CompiledTest c = compile_test(t, sigma);
      if (o.as_json)
        std::cout << json{{"C", c.c.str()}, {"D", c.d.str()}}.dump(2) << "\n";
      else
        std::cout << "C = " << c.c.str() << "\nD = " << c.d.str() << "\n";
      return 0;
    }
    if (*emb) {
      Loaded l = load(file_a);
      std::cout << untyped::str(embed(l.term)) << "\n";
      return 0;
    }
    if (*dis) {
      std::string text = file_a == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : io::read_file(file_a);
      DisentangleResult r = disentangle(io::parse_assignment(json::parse(text)));
      std::cout << io::to_json(r).dump() << "\n";
      return 0;
    }
    if (*spot) {
      auto [l, r] = load_pair(file_a, file_b);
      std::vector<Context> cs;
      if (!contexts_file.empty()) {
        std::istringstream in(io::read_file(contexts_file));
        std::string line;
        while (std::getline(in, line))
          if (line.find_first_not_of(" \t\r") != std::string::npos && line[line.find_first_not_of(" \t")] != '#')
            cs.push_back(parse_context(line));
      } else {
        cs = sample_contexts(l.term, r.term, l.type, o.cfg, samples);
      }
      bool all = true;
      json rows = json::array();
      for (const auto& row : ctx_spot_check(l.term, r.term, l.type, cs, o.cfg.fuel)) {
        all = all && row.leq;
        if (o.as_json) {
          json j{{"context", row.context.str()}};
          if (row.error) {
            j["error"] = *row.error;
          } else {
            j["mass_left"] = io::to_json(row.mass_m);
            j["mass_right"] = io::to_json(row.mass_n);
            j["dist_left"] = io::to_json(row.dist_m);
            j["dist_right"] = io::to_json(row.dist_n);
            j["leq"] = row.leq;
          }
          rows.push_back(j);
        } else if (row.error) {
          std::cout << "error\t" << *row.error << "\t" << row.context.str() << "\n";
        } else {
          std::cout << to_string(row.mass_m) << "\t" << to_string(row.mass_n) << "\t" << (row.leq ? "<=" : ">") << "\t"
                    << row.context.str() << "\n";
        }
      }
      if (o.as_json) std::cout << rows.dump(2) << "\n";
      return all ? 0 : 1;
    }
    if (*corpus) {
      io::Corpus c = io::load_corpus(corpus_dir);
      bool ok = true;
      for (const auto& p : c.pairs) {
        const auto& l = c.at(p.left);
        const auto& r = c.at(p.right);
        EquivConfig cfg = o.cfg;
        cfg.test_depth = std::max(cfg.test_depth, p.test_depth);
        Verdict v = check_equiv(l.term, r.term, l.type, cfg);
        std::string got = v.equivalent() ? "equivalent" : "not_equivalent";
        ok = ok && got == p.expect;
        std::cout << (got == p.expect ? "ok   " : "FAIL ") << p.left << " vs " << p.right << ": " << got << "\n";
      }
      return ok ? 0 : 1;
    }
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error at " << e.what() << "\n";
    return 2;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
