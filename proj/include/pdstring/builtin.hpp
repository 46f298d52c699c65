#pragma once

#include <fstream>
#include <sstream>

#include "pdstring/free_abelian.hpp"
#include "pdstring/surface.hpp"

namespace pd {

// The built-in group menu. Genus-1 surfaces are the same group as Z^2, so
// they are constructed as such (generators then named e1, e2).
struct GroupSpec {
  std::string kind;  // "free_abelian" | "surface"
  int rank = 0;      // free_abelian
  int genus = 0;     // surface
  Options opts;
};

inline GroupPtr make_group(const GroupSpec& s) {
  if (s.kind == "free_abelian") {
    if (s.rank < 1) throw SpecError("free_abelian requires rank >= 1");
    return std::make_shared<FreeAbelianGroup>(s.rank, s.opts);
  }
  if (s.kind == "surface") {
    if (s.genus < 1) throw SpecError("surface requires genus >= 1");
    if (s.genus == 1) return std::make_shared<FreeAbelianGroup>(2, s.opts);
    return std::make_shared<SurfaceGroup>(s.genus, s.opts);
  }
  throw SpecError("unknown group kind '" + s.kind + "'");
}

// Flat key=value format, one entry per line; '#' starts a comment. Unknown
// keys are rejected so typos cannot silently change a computation.
inline GroupSpec parse_group_spec(const std::string& text) {
  GroupSpec s;
  bool have_kind = false, have_rank = false, have_genus = false;
  std::istringstream in(text);
  std::string line;
  auto to_long = [](const std::string& k, const std::string& v) {
    try {
      size_t pos = 0;
      long x = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw SpecError("bad integer for key '" + k + "': '" + v + "'");
    }
  };
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::string t;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw SpecError("expected key=value, got '" + t + "'");
    std::string key = t.substr(0, eq), val = t.substr(eq + 1);
    if (key == "kind") {
      s.kind = val;
      have_kind = true;
    } else if (key == "rank") {
      s.rank = int(to_long(key, val));
      have_rank = true;
    } else if (key == "genus") {
      s.genus = int(to_long(key, val));
      have_genus = true;
    } else if (key == "conjugacy_search_radius") {
      s.opts.conjugacy_search_radius = to_long(key, val);
    } else if (key == "coset_search_radius") {
      s.opts.coset_search_radius = to_long(key, val);
    } else if (key == "max_window_radius") {
      s.opts.max_window_radius = int(to_long(key, val));
    } else {
      throw SpecError("unknown key '" + key + "' in group spec");
    }
  }
  if (!have_kind) throw SpecError("group spec is missing 'kind'");
  if (s.kind != "free_abelian" && s.kind != "surface")
    throw SpecError("unknown group kind '" + s.kind + "'");
  if (s.kind == "free_abelian" && !have_rank)
    throw SpecError("free_abelian spec is missing 'rank'");
  if (s.kind == "surface" && !have_genus) throw SpecError("surface spec is missing 'genus'");
  return s;
}

inline GroupSpec load_group_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open group spec '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_group_spec(buf.str());
}

}  // namespace pd
