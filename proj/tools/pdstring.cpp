// Command-line front end: group configuration, homology bases, string
// products, axiom verification, and a persistent computation cache.

#include <pdstring/builtin.hpp>
#include <pdstring/string_algebra.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace pd;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kLawFailure = 1, kSpecError = 2, kBound = 3, kInconclusive = 4;
constexpr const char* kCacheSchema = "1";

// ---------------------------------------------------------------- words ----

// Group-agnostic word codec for cache files (generator index ^ exponent).
std::string encode_word(const Word& w) {
  if (w.is_one()) return "1";
  std::string out;
  for (const Letter& l : w.letters()) {
    if (!out.empty()) out += ".";
    out += std::to_string(l.gen) + "^" + std::to_string(l.exp);
  }
  return out;
}

Word decode_word(const std::string& s) {
  if (s == "1") return Word::one();
  std::vector<Letter> ls;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, '.')) {
    auto caret = part.find('^');
    if (caret == std::string::npos) throw SpecError("bad word encoding '" + s + "'");
    ls.push_back(Letter{std::stoi(part.substr(0, caret)), std::stol(part.substr(caret + 1))});
  }
  return Word(std::move(ls));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Integer parse_integer(const std::string& s) {
  try {
    return Integer(s);
  } catch (const std::invalid_argument&) {
    throw SpecError("bad integer '" + s + "'");
  }
}

// ----------------------------------------------------------- class specs ----

// label:degree:coeffs with comma-separated integer coefficients.
LGClass parse_class_spec(StringAlgebra& A, const std::string& text) {
  std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3)
    throw SpecError("class spec '" + text + "' must be label:degree:coeffs");
  const Group& g = *A.group();
  Word label = g.normal_form(g.parse(parts[0]));
  int p = 0;
  try {
    size_t pos = 0;
    p = std::stoi(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
  } catch (const std::exception&) {
    throw SpecError("bad degree '" + parts[1] + "' in class spec");
  }
  if (p + A.dimension() < 0)
    throw SpecError("degree " + std::to_string(p) + " is below -" +
                    std::to_string(A.dimension()));
  const FGAbelianGroup& h = A.homology(A.centralizer(label), p + A.dimension());
  if (h.rank() == 0)
    throw SpecError("no classes at degree " + std::to_string(p) + " for label '" + parts[0] +
                    "'");
  std::vector<Integer> coeffs;
  if (!parts[2].empty())
    for (const std::string& c : split(parts[2], ',')) coeffs.push_back(parse_integer(c));
  if ((int)coeffs.size() != h.rank())
    throw SpecError("class spec '" + text + "' needs " + std::to_string(h.rank()) +
                    " coefficients (run the homology command for the basis)");
  return A.make_class(label, p, std::move(coeffs));
}

std::string coeffs_string(const std::vector<Integer>& coeffs) {
  std::string out;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (i) out += ",";
    out += coeffs[i].get_str();
  }
  return out;
}

std::string class_spec_string(const Group& g, const Word& label, int p,
                              const std::vector<Integer>& coeffs) {
  return g.format(label) + ":" + std::to_string(p) + ":" + coeffs_string(coeffs);
}

std::string basis_name(const Resolution& r, int deg, const std::vector<Integer>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Integer a = abs(v[i]);
    std::string term = (a == 1 ? "" : a.get_str()) + "[" + r.cell_name(deg, int(i)) + "]";
    if (out.empty())
      out = (v[i] < 0 ? "-" : "") + term;
    else
      out += (v[i] < 0 ? " - " : " + ") + term;
  }
  return out.empty() ? "0" : out;
}

// ----------------------------------------------------------------- cache ----

struct HomRecord {
  int rank = 0, free_rank = 0, ambient = 0;
  std::vector<Integer> torsion;
  std::vector<std::vector<Integer>> basis;
  friend bool operator==(const HomRecord&, const HomRecord&) = default;
};

struct CacheData {
  std::map<std::pair<int, int>, TensorChain> diag;
  std::map<std::string, std::map<std::pair<int, int>, FreeChain>> lifts;
  std::map<std::string, std::map<std::pair<int, int>, FreeChain>> pushes;
  std::map<std::tuple<std::string, int, int>, MCochain> dinv;
  std::map<std::pair<std::string, int>, HomRecord> hom;

  bool empty() const {
    return diag.empty() && lifts.empty() && pushes.empty() && dinv.empty() && hom.empty();
  }
};

std::string cache_signature(const Group& g) {
  const Options& o = g.options();
  return std::string("schema=") + kCacheSchema + ";" + g.describe() +
         ";conj=" + std::to_string(o.conjugacy_search_radius) +
         ";coset=" + std::to_string(o.coset_search_radius) +
         ";window=" + std::to_string(o.max_window_radius);
}

std::string cache_file(const std::string& dir, const std::string& signature) {
  std::ostringstream hex;
  hex << std::hex << fnv1a(signature);
  return dir + "/pd" + hex.str() + ".cache";
}

void write_freechain_lines(std::ostream& out, const FreeChain& c) {
  for (const auto& [cell, v] : c.terms())
    out << "lc\t" << cell.idx << "\t" << encode_word(cell.g) << "\t" << v.get_str() << "\n";
}

std::string serialize_cache(const std::string& signature, const CacheData& d) {
  std::ostringstream out;
  out << "pdstring-cache\t" << kCacheSchema << "\n";
  out << "signature\t" << signature << "\n";
  for (const auto& [key, chain] : d.diag) {
    out << "diag\t" << key.first << "\t" << key.second << "\t" << chain.terms().size() << "\n";
    for (const auto& [tc, v] : chain.terms())
      out << "dt\t" << tc.p << "\t" << tc.q << "\t" << tc.a.idx << "\t" << encode_word(tc.a.g)
          << "\t" << tc.b.idx << "\t" << encode_word(tc.b.g) << "\t" << v.get_str() << "\n";
  }
  for (const auto& [id, cells] : d.lifts)
    for (const auto& [key, chain] : cells) {
      out << "lift\t" << id << "\t" << key.first << "\t" << key.second << "\t"
          << chain.terms().size() << "\n";
      write_freechain_lines(out, chain);
    }
  for (const auto& [id, cells] : d.pushes)
    for (const auto& [key, chain] : cells) {
      out << "push\t" << id << "\t" << key.first << "\t" << key.second << "\t"
          << chain.terms().size() << "\n";
      write_freechain_lines(out, chain);
    }
  for (const auto& [key, phi] : d.dinv) {
    out << "dinv\t" << std::get<0>(key) << "\t" << std::get<1>(key) << "\t" << std::get<2>(key)
        << "\t" << phi.terms().size() << "\n";
    for (const auto& [t, v] : phi.terms())
      out << "mc\t" << t.idx << "\t" << encode_word(t.key) << "\t" << v.get_str() << "\n";
  }
  for (const auto& [key, rec] : d.hom) {
    out << "hom\t" << key.first << "\t" << key.second << "\t" << rec.rank << "\t"
        << rec.free_rank << "\t" << rec.ambient << "\n";
    out << "ht";
    for (const Integer& t : rec.torsion) out << "\t" << t.get_str();
    out << "\n";
    for (const auto& row : rec.basis) {
      out << "hb";
      for (const Integer& c : row) out << "\t" << c.get_str();
      out << "\n";
    }
  }
  std::string body = out.str();
  std::ostringstream hex;
  hex << std::hex << fnv1a(body);
  return body + "checksum\t" + hex.str() + "\n";
}

// Any malformed content discards the whole file with a warning; a cache can
// only ever save time.
std::optional<CacheData> load_cache(const std::string& path, const std::string& signature) {
  std::ifstream in(path);
  if (!in) return std::nullopt;  // cold start
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  auto fail = [&](const std::string& why) -> std::optional<CacheData> {
    std::cerr << "warning: ignoring cache '" << path << "': " << why << "\n";
    return std::nullopt;
  };
  auto mark = text.rfind("checksum\t");
  if (mark == std::string::npos || text.back() != '\n') return fail("missing checksum");
  std::string body = text.substr(0, mark);
  std::string sum = text.substr(mark + 9);
  sum.pop_back();
  std::ostringstream hex;
  hex << std::hex << fnv1a(body);
  if (sum != hex.str()) return fail("checksum mismatch");

  std::istringstream lines(body);
  std::string line;
  auto next_fields = [&](size_t want, const char* what) {
    if (!std::getline(lines, line)) throw SpecError(std::string("truncated ") + what);
    std::vector<std::string> f = split(line, '\t');
    if (f.size() < want) throw SpecError(std::string("short ") + what + " line");
    return f;
  };
  try {
    CacheData d;
    std::vector<std::string> f = next_fields(2, "header");
    if (f[0] != "pdstring-cache" || f[1] != kCacheSchema) throw SpecError("schema mismatch");
    f = next_fields(2, "signature");
    if (f[0] != "signature" || f[1] != signature) throw SpecError("signature mismatch");
    while (std::getline(lines, line)) {
      f = split(line, '\t');
      if (f[0] == "diag" && f.size() == 4) {
        std::pair<int, int> key{std::stoi(f[1]), std::stoi(f[2])};
        long n = std::stol(f[3]);
        TensorChain chain;
        for (long t = 0; t < n; ++t) {
          std::vector<std::string> g = next_fields(8, "diag term");
          if (g[0] != "dt") throw SpecError("bad diag term");
          chain.add(TensorCell{std::stoi(g[1]), std::stoi(g[2]),
                               Cell{std::stoi(g[3]), decode_word(g[4])},
                               Cell{std::stoi(g[5]), decode_word(g[6])}},
                    parse_integer(g[7]));
        }
        d.diag.emplace(key, std::move(chain));
      } else if ((f[0] == "lift" || f[0] == "push") && f.size() == 5) {
        std::pair<int, int> key{std::stoi(f[2]), std::stoi(f[3])};
        long n = std::stol(f[4]);
        FreeChain chain;
        for (long t = 0; t < n; ++t) {
          std::vector<std::string> g = next_fields(4, "lift term");
          if (g[0] != "lc") throw SpecError("bad lift term");
          chain.add(Cell{std::stoi(g[1]), decode_word(g[2])}, parse_integer(g[3]));
        }
        (f[0] == "lift" ? d.lifts : d.pushes)[f[1]].emplace(key, std::move(chain));
      } else if (f[0] == "dinv" && f.size() == 5) {
        auto key = std::make_tuple(f[1], std::stoi(f[2]), std::stoi(f[3]));
        long n = std::stol(f[4]);
        MCochain phi;
        for (long t = 0; t < n; ++t) {
          std::vector<std::string> g = next_fields(4, "dinv term");
          if (g[0] != "mc") throw SpecError("bad dinv term");
          phi.add(MTerm{std::stoi(g[1]), decode_word(g[2])}, parse_integer(g[3]));
        }
        d.dinv.emplace(key, std::move(phi));
      } else if (f[0] == "hom" && f.size() == 6) {
        HomRecord rec;
        rec.rank = std::stoi(f[3]);
        rec.free_rank = std::stoi(f[4]);
        rec.ambient = std::stoi(f[5]);
        std::vector<std::string> g = next_fields(1, "torsion");
        if (g[0] != "ht") throw SpecError("bad torsion line");
        for (size_t i = 1; i < g.size(); ++i) rec.torsion.push_back(parse_integer(g[i]));
        for (int i = 0; i < rec.rank; ++i) {
          g = next_fields(1, "basis row");
          if (g[0] != "hb" || (int)g.size() != rec.ambient + 1) throw SpecError("bad basis row");
          std::vector<Integer> row;
          for (size_t c = 1; c < g.size(); ++c) row.push_back(parse_integer(g[c]));
          rec.basis.push_back(std::move(row));
        }
        d.hom.emplace(std::make_pair(f[1], std::stoi(f[2])), std::move(rec));
      } else {
        throw SpecError("unknown record '" + f[0] + "'");
      }
    }
    return d;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

void apply_cache(const CacheData& d, StringAlgebra& A) {
  for (const auto& [key, chain] : d.diag) A.diagonal().prime(key.first, key.second, chain);
  for (const auto& [id, cells] : d.lifts) A.stage_lift(id, cells);
  for (const auto& [id, cells] : d.pushes) A.stage_push(id, cells);
  for (const auto& [key, phi] : d.dinv)
    A.stage_dinv(std::get<0>(key), std::get<1>(key), std::get<2>(key), phi);
}

CacheData collect_cache(const StringAlgebra& A) {
  CacheData d;
  d.diag = A.diagonal().snapshot();
  for (const auto& [id, s] : A.shapiro_cache()) {
    auto cells = s.fwd->snapshot();
    if (!cells.empty()) d.lifts.emplace(id, std::move(cells));
  }
  for (const auto& [id, cm] : A.push_cache()) {
    auto cells = cm->snapshot();
    if (!cells.empty()) d.pushes.emplace(id, std::move(cells));
  }
  d.dinv = A.dinv_cache();
  for (const auto& [key, h] : A.homology_cache()) {
    HomRecord rec;
    rec.rank = h.rank();
    rec.free_rank = h.free_rank();
    rec.ambient = h.ambient_dim();
    rec.torsion = h.torsion();
    for (int i = 0; i < h.rank(); ++i) rec.basis.push_back(h.basis_vector(i));
    d.hom.emplace(key, std::move(rec));
  }
  return d;
}

// Fresh entries win; loaded-only entries are retained so independent runs
// keep growing one file. Homology records are integrity witnesses (never fed
// back into computation), so a stale one is replaced with a warning.
void merge_cache(CacheData& into, CacheData&& fresh, const std::string& path) {
  for (const auto& [key, rec] : fresh.hom) {
    auto it = into.hom.find(key);
    if (it != into.hom.end() && !(it->second == rec))
      std::cerr << "warning: cache '" << path << "': replacing stale homology record for "
                << key.first << " degree " << key.second << "\n";
  }
  for (auto& [key, v] : fresh.diag) into.diag[key] = std::move(v);
  for (auto& [id, cells] : fresh.lifts)
    for (auto& [key, v] : cells) into.lifts[id][key] = std::move(v);
  for (auto& [id, cells] : fresh.pushes)
    for (auto& [key, v] : cells) into.pushes[id][key] = std::move(v);
  for (auto& [key, v] : fresh.dinv) into.dinv[key] = std::move(v);
  for (auto& [key, v] : fresh.hom) into.hom[key] = std::move(v);
}

void save_cache(const std::string& path, const std::string& signature, const CacheData& d) {
  try {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) {
        std::cerr << "warning: cannot write cache '" << path << "'\n";
        return;
      }
      out << serialize_cache(signature, d);
      if (!out) {
        std::cerr << "warning: short write to cache '" << path << "'\n";
        return;
      }
    }
    std::filesystem::rename(tmp, path);
  } catch (const std::exception& e) {
    std::cerr << "warning: cache save failed: " << e.what() << "\n";
  }
}

// --------------------------------------------------------------- context ----

struct Invocation {
  std::string group_file;
  std::string cache_dir;
  std::string format = "text";
  int jobs = 1;
  int max_window = 0;  // 0 = group file / default

  GroupPtr g;
  std::unique_ptr<StringAlgebra> algebra;
  std::string cache_path;
  CacheData loaded;

  StringAlgebra& open() {
    GroupSpec spec = load_group_spec(group_file);
    if (max_window > 0) spec.opts.max_window_radius = max_window;
    g = make_group(spec);
    algebra = std::make_unique<StringAlgebra>(g);
    if (cache_dir.empty())
      if (const char* env = std::getenv("PDSTRING_CACHE")) cache_dir = env;
    if (!cache_dir.empty()) {
      cache_path = cache_file(cache_dir, cache_signature(*g));
      if (auto d = load_cache(cache_path, cache_signature(*g))) {
        loaded = std::move(*d);
        apply_cache(loaded, *algebra);
      }
    }
    return *algebra;
  }

  void close() {
    if (cache_path.empty() || !algebra) return;
    merge_cache(loaded, collect_cache(*algebra), cache_path);
    if (!loaded.empty()) save_cache(cache_path, cache_signature(*g), loaded);
  }
};

// -------------------------------------------------------------- commands ----

int cmd_homology(Invocation& inv, const std::string& subgroup_word, int degree) {
  StringAlgebra& A = inv.open();
  const Group& g = *A.group();
  if (degree < 0) throw SpecError("degree must be >= 0");
  Word w = subgroup_word.empty() ? Word::one() : g.normal_form(g.parse(subgroup_word));
  const Subgroup& c = A.centralizer(w);
  const FGAbelianGroup& h = A.homology(c, degree);
  const Resolution& abs = *A.shapiro(c).abs;
  std::vector<std::string> names;
  for (int i = 0; i < h.rank(); ++i) names.push_back(basis_name(abs, degree, h.basis_vector(i)));
  if (inv.format == "json") {
    json out{{"group", g.describe()},
             {"subgroup", subgroup_word.empty() ? "whole" : g.format(w)},
             {"degree", degree},
             {"rank", h.rank()},
             {"free_rank", h.free_rank()},
             {"torsion", json::array()},
             {"basis", names}};
    for (const Integer& t : h.torsion()) out["torsion"].push_back(t.get_str());
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "group\t" << g.describe() << "\n";
    std::cout << "subgroup\t" << (subgroup_word.empty() ? "whole" : g.format(w)) << "\n";
    std::cout << "degree\t" << degree << "\n";
    std::cout << "rank\t" << h.rank() << "\n";
    std::string tors;
    for (const Integer& t : h.torsion()) tors += (tors.empty() ? "" : ",") + t.get_str();
    std::cout << "torsion\t" << (tors.empty() ? "none" : tors) << "\n";
    for (int i = 0; i < h.rank(); ++i) std::cout << "basis\t" << i << "\t" << names[i] << "\n";
  }
  inv.close();
  return kOk;
}

int cmd_product(Invocation& inv, const std::string& xs, const std::string& ys) {
  StringAlgebra& A = inv.open();
  const Group& g = *A.group();
  LGClass x = parse_class_spec(A, xs);
  LGClass y = parse_class_spec(A, ys);
  ProductOptions opts;
  opts.jobs = inv.jobs;
  LGElement prod = A.string_product(x, y, opts);
  const std::string xspec = class_spec_string(g, x.label, x.p, x.coeffs);
  const std::string yspec = class_spec_string(g, y.label, y.p, y.coeffs);
  if (inv.format == "json") {
    json out{{"group", g.describe()}, {"x", xspec}, {"y", yspec}, {"terms", json::array()}};
    for (const auto& [key, coeffs] : prod.terms()) {
      json term{{"label", g.format(key.label)},
                {"degree", key.p},
                {"coeffs", json::array()},
                {"spec", class_spec_string(g, key.label, key.p, coeffs)}};
      for (const Integer& c : coeffs) term["coeffs"].push_back(c.get_str());
      out["terms"].push_back(std::move(term));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "x\t" << xspec << "\n";
    std::cout << "y\t" << yspec << "\n";
    if (prod.empty()) std::cout << "zero\n";
    for (const auto& [key, coeffs] : prod.terms())
      std::cout << "term\t" << class_spec_string(g, key.label, key.p, coeffs) << "\n";
  }
  inv.close();
  return kOk;
}

const char* law_name(int i) {
  constexpr const char* names[] = {"unit", "commutativity", "associativity", "oracle",
                                   "representatives"};
  return names[i];
}

int cmd_axioms(Invocation& inv, int max_label_length, unsigned seed) {
  StringAlgebra& A = inv.open();
  AxiomOptions opts;
  opts.max_label_length = max_label_length;
  opts.seed = seed;
  opts.jobs = inv.jobs;
  AxiomReport rep = A.check_axioms(opts);
  const LawResult* laws[] = {&rep.unit, &rep.commutativity, &rep.associativity, &rep.oracle,
                             &rep.representatives};
  auto status_str = [](LawStatus s) {
    return s == LawStatus::Passed ? "passed" : s == LawStatus::Failed ? "failed" : "inconclusive";
  };
  const char* overall = rep.any_failed()         ? "failed"
                        : rep.any_inconclusive() ? "inconclusive"
                                                 : "passed";
  if (inv.format == "json") {
    json out{{"group", A.group()->describe()}, {"laws", json::object()}, {"overall", overall}};
    for (int i = 0; i < 5; ++i)
      out["laws"][law_name(i)] = {{"status", status_str(laws[i]->status)},
                                  {"checked", laws[i]->checked},
                                  {"detail", laws[i]->detail}};
    std::cout << out.dump(2) << "\n";
  } else {
    for (int i = 0; i < 5; ++i) {
      std::cout << "law\t" << law_name(i) << "\t" << status_str(laws[i]->status) << "\t"
                << laws[i]->checked;
      if (!laws[i]->detail.empty()) std::cout << "\t" << laws[i]->detail;
      std::cout << "\n";
    }
    std::cout << "overall\t" << overall << "\n";
  }
  inv.close();
  return rep.any_failed() ? kLawFailure : rep.any_inconclusive() ? kInconclusive : kOk;
}

int cmd_double_cosets(Invocation& inv, const std::string& kw, const std::string& hw,
                      const std::vector<std::string>& term_specs) {
  StringAlgebra& A = inv.open();
  const Group& g = *A.group();
  const Subgroup& K = A.centralizer(g.normal_form(g.parse(kw)));
  const Subgroup& H = A.centralizer(g.normal_form(g.parse(hw)));
  MPairChain chain;
  for (const std::string& spec : term_specs) {
    std::vector<std::string> f = split(spec, ':');
    if (f.size() != 3 && f.size() != 4)
      throw SpecError("chain term '" + spec + "' must be idx:key1:key2[:coeff]");
    Integer c = f.size() == 4 ? parse_integer(f[3]) : Integer(1);
    chain.add(MPairTerm{std::stoi(f[0]), g.normal_form(g.parse(f[1])),
                        g.normal_form(g.parse(f[2]))},
              c);
  }
  std::vector<PsiComponent> comps = psi_decompose(K, H, chain);
  if (inv.format == "json") {
    json out{{"group", g.describe()}, {"components", json::array()}};
    for (const PsiComponent& comp : comps) {
      json jc{{"key", g.format(comp.key)},
              {"stabilizer", comp.j.full_id()},
              {"terms", json::array()}};
      for (const auto& [t, v] : comp.chain.terms())
        jc["terms"].push_back(
            {{"idx", t.idx}, {"coset", g.format(t.key)}, {"coeff", v.get_str()}});
      out["components"].push_back(std::move(jc));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const PsiComponent& comp : comps) {
      std::cout << "component\t" << g.format(comp.key) << "\n";
      std::cout << "stabilizer\t" << comp.j.full_id() << "\n";
      for (const auto& [t, v] : comp.chain.terms())
        std::cout << "term\t" << t.idx << "\t" << g.format(t.key) << "\t" << v.get_str()
                  << "\n";
    }
    if (comps.empty()) std::cout << "zero\n";
  }
  inv.close();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact string-topology products on Poincare duality groups"};
  app.require_subcommand(1);

  Invocation inv;
  std::string subgroup_word, xs, ys, kw, hw;
  std::vector<std::string> chain_terms;
  bool whole = false;
  int degree = 0, max_label_length = 2;
  unsigned seed = 1;

  auto add_common = [&](CLI::App* c, bool with_jobs = true) {
    c->add_option("--group", inv.group_file, "group spec file (key=value)")->required();
    c->add_option("--format", inv.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    c->add_option("--cache-dir", inv.cache_dir, "cache directory (default $PDSTRING_CACHE)");
    c->add_option("--max-window", inv.max_window, "override duality window radius cap");
    if (with_jobs)
      c->add_option("--jobs", inv.jobs, "worker threads for independent summands")
          ->check(CLI::Range(1, 64));
  };

  CLI::App* hom = app.add_subcommand("homology", "print a homology basis (the coordinate"
                                                 " contract for class specs)");
  add_common(hom, false);
  hom->add_option("--subgroup", subgroup_word, "centralizer of this word");
  hom->add_flag("--whole", whole, "the whole group (default)");
  hom->add_option("--degree", degree, "homology degree k >= 0")->required();

  CLI::App* prod = app.add_subcommand("product", "string product of two classes");
  add_common(prod);
  prod->add_option("--x", xs, "first class, label:degree:coeffs")->required();
  prod->add_option("--y", ys, "second class, label:degree:coeffs")->required();

  CLI::App* ax = app.add_subcommand("axioms", "verify the algebra laws on sampled classes");
  add_common(ax);
  ax->add_option("--max-label-length", max_label_length, "label sample cutoff");
  ax->add_option("--seed", seed, "sampling seed");

  CLI::App* dc = app.add_subcommand("double-cosets",
                                    "decompose a pair-module chain over double cosets");
  add_common(dc, false);
  dc->add_option("--x", kw, "word whose centralizer is K")->required();
  dc->add_option("--y", hw, "word whose centralizer is H")->required();
  dc->add_option("terms", chain_terms, "chain terms idx:key1:key2[:coeff]");

  try {
    app.parse(argc, argv);
    if (hom->parsed()) {
      if (whole && !subgroup_word.empty())
        throw SpecError("--whole and --subgroup are mutually exclusive");
      return cmd_homology(inv, subgroup_word, degree);
    }
    if (prod->parsed()) return cmd_product(inv, xs, ys);
    if (ax->parsed()) return cmd_axioms(inv, max_label_length, seed);
    if (dc->parsed()) return cmd_double_cosets(inv, kw, hw, chain_terms);
    return kSpecError;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kSpecError;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSpecError;
  } catch (const BoundExceeded& e) {
    std::cerr << "bound exceeded: " << e.what() << "\n";
    return kBound;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSpecError;
  }
}
