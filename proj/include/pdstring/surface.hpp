#pragma once

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "pdstring/group.hpp"

namespace pd {

// Fundamental group of the closed orientable surface of genus g >= 2:
//   < a1,b1,...,ag,bg | [a1,b1][a2,b2]...[ag,bg] >.
// The presentation is a Dehn presentation (all pieces have length 1), so
// Dehn's algorithm decides the word problem, words with no subword longer
// than half the relator are geodesic, and geodesics of the same element are
// connected by exchanges of exactly-half relator subwords. Normal forms are
// ShortLex minima over that exchange closure; conjugacy works cyclically.
class SurfaceGroup final : public Group {
 public:
  using Flat = std::vector<std::pair<int, int>>;  // (generator, +-1)

  explicit SurfaceGroup(int genus, Options opts = {}) : Group(opts), genus_(genus) {
    PD_CHECK(genus >= 2, "surface oracle requires genus >= 2");
    for (int i = 1; i <= genus; ++i) {
      names_.push_back("a" + std::to_string(i));
      names_.push_back("b" + std::to_string(i));
    }
    // relator [a1,b1]...[ag,bg]; generator 2i = a_{i+1}, 2i+1 = b_{i+1}
    for (int i = 0; i < genus; ++i) {
      int a = 2 * i, b = 2 * i + 1;
      relator_.insert(relator_.end(), {{a, 1}, {b, 1}, {a, -1}, {b, -1}});
    }
    const int L = relator_length();
    for (int eps : {1, -1}) {
      Flat base = eps == 1 ? relator_ : inverse_flat(relator_);
      for (int k = 0; k < L; ++k) {
        Reading rd;
        rd.eps = eps;
        rd.offset = k;
        rd.letters.assign(base.begin() + k, base.end());
        rd.letters.insert(rd.letters.end(), base.begin(), base.begin() + k);
        readings_.push_back(std::move(rd));
      }
    }
  }

  Kind kind() const override { return Kind::Surface; }
  int dimension() const override { return 2; }
  int genus() const { return genus_; }
  int generator_count() const override { return 2 * genus_; }
  const std::vector<std::string>& generator_names() const override { return names_; }
  std::string describe() const override { return "surface:" + std::to_string(genus_); }

  int relator_length() const { return 4 * genus_; }
  int half_length() const { return 2 * genus_; }
  const Flat& relator() const { return relator_; }

  Word normal_form(const Word& w) const override {
    {
      std::lock_guard<std::mutex> lock(nf_mutex_);
      auto it = nf_cache_.find(w);
      if (it != nf_cache_.end()) return it->second;
    }
    Word result = Word::from_flat(normalize_flat(free_reduce(w.flat())));
    std::lock_guard<std::mutex> lock(nf_mutex_);
    nf_cache_.emplace(w, result);
    return result;
  }

  std::optional<Word> conjugacy_witness(const Word& g, const Word& h) const override {
    const ConjData& cg = conj_data(g);
    const ConjData& ch = conj_data(h);
    if (cg.label != ch.label) return std::nullopt;
    // g = cg.to_label * label * cg.to_label^-1 and likewise for h.
    Word w = multiply(ch.to_label, invert(cg.to_label));
    PD_CHECK(equal(multiply(multiply(w, g), invert(w)), h), "conjugacy witness check");
    return w;
  }

  Word conjugacy_label(const Word& g) const override { return conj_data(g).label; }

  // g = root^k with k >= 1 and root not a proper power. Identity rejected.
  std::pair<Word, long> primitive_root(const Word& g) const override {
    Word cur = normal_form(g);
    PD_CHECK(!cur.is_one(), "primitive_root of identity");
    long power = 1;
    for (;;) {
      const ConjData& cd = conj_data(cur);
      bool split = false;
      for (const auto& [state, conj] : cd.states) {  // ShortLex order
        Flat f = state.flat();
        const int L = int(f.size());
        for (int p = 1; p < L; ++p) {
          if (L % p != 0) continue;
          bool periodic = true;
          for (int i = 0; i + p < L && periodic; ++i)
            if (f[size_t(i)] != f[size_t(i + p)]) periodic = false;
          if (!periodic) continue;
          // state = v^(L/p), so cur = (conj v conj^-1)^(L/p)
          Flat v(f.begin(), f.begin() + p);
          Word root = multiply(multiply(conj, Word::from_flat(v)), invert(conj));
          power *= L / p;
          cur = root;
          split = true;
          break;
        }
        if (split) break;
      }
      if (!split) break;
    }
    if (power < 0) PD_CHECK(false, "primitive_root sign");
    return {cur, power};
  }

  // m with r^m = u, or nullopt. Bounded by coset_search_radius.
  std::optional<long> power_of(const Word& r, const Word& u) const override {
    PD_CHECK(!is_identity(r), "power_of trivial base");
    Word nu = normal_form(u);
    if (nu.is_one()) return 0;
    const long cap = opts_.coset_search_radius;
    const long ulen = nu.length();
    const long margin = ulen + 8 * std::max<long>(1, normal_form(r).length()) + 16;
    long over = 0;
    for (long m = 1; m <= cap; ++m) {
      const Word& pos = root_power(r, m);
      const Word& neg = root_power(r, -m);
      if (pos == nu) return m;
      if (neg == nu) return -m;
      if (pos.length() > margin && neg.length() > margin) {
        if (++over >= 4) return std::nullopt;  // powers only grow from here
      } else {
        over = 0;
      }
    }
    throw BoundExceeded("power search exhausted coset_search_radius=" + std::to_string(cap) +
                        " for root " + format(r));
  }

  // Cached ShortLex-normal form of r^m.
  const Word& root_power(const Word& r, long m) const {
    std::lock_guard<std::mutex> lock(pow_mutex_);
    auto& tab = powers_[normal_form(r)];
    auto it = tab.find(m);
    if (it != tab.end()) return it->second;
    Word rm = normal_form(r);
    Word v = Word::one();
    // build from the nearest cached neighbor toward m
    long base = 0;
    for (auto& [mm, ww] : tab)
      if ((m >= 0) == (mm >= 0) && std::abs(mm) <= std::abs(m) && std::abs(mm) > std::abs(base))
        base = mm;
    if (tab.count(base)) v = tab[base];
    Word step = m >= 0 ? rm : normal_form(rm.inverse());
    for (long i = std::abs(base); i < std::abs(m); ++i) v = multiply(v, step);
    return tab.emplace(m, v).first->second;
  }

  // Dehn filling: a 2-chain with boundary the edge-cycle of the trivial word
  // W, returned as signed relator-cell translates. Hard error if W is not
  // trivial (the algorithm gets stuck exactly on nontrivial words).
  std::vector<std::pair<Word, int>> fill_trivial_word(const Flat& input) const {
    std::vector<std::pair<Word, int>> cells;
    Flat w = free_reduce(input);
    const int L = relator_length();
    while (!w.empty()) {
      auto m = find_match(w, half_length() + 1);
      PD_CHECK(m.has_value(), "Dehn filling: word is not trivial");
      auto [pos, reading, run] = *m;
      const Reading& rd = readings_[size_t(reading)];
      // Cell translate: the vertex where the full relator reading of this
      // cell starts is  prefix(w,pos) * (r^eps[:offset])^-1.
      Word prefix = Word::from_flat(Flat(w.begin(), w.begin() + pos));
      Flat rel_eps = rd.eps == 1 ? relator_ : inverse_flat(relator_);
      Word head = Word::from_flat(Flat(rel_eps.begin(), rel_eps.begin() + rd.offset));
      Word u = multiply(prefix, invert(head));
      cells.emplace_back(u, rd.eps);
      // replace matched P = reading[:run] by Q^-1, Q = reading[run:]
      Flat qinv = inverse_flat(Flat(rd.letters.begin() + run, rd.letters.end()));
      Flat next(w.begin(), w.begin() + pos);
      next.insert(next.end(), qinv.begin(), qinv.end());
      next.insert(next.end(), w.begin() + pos + run, w.end());
      PD_CHECK((int)next.size() < (int)w.size() + L, "Dehn filling growth");
      w = free_reduce(next);
    }
    return cells;
  }

  static Flat free_reduce(const Flat& in) {
    Flat out;
    for (auto l : in) {
      if (!out.empty() && out.back().first == l.first && out.back().second == -l.second)
        out.pop_back();
      else
        out.push_back(l);
    }
    return out;
  }

  static Flat inverse_flat(const Flat& in) {
    Flat out;
    out.reserve(in.size());
    for (auto it = in.rbegin(); it != in.rend(); ++it) out.emplace_back(it->first, -it->second);
    return out;
  }

 private:
  struct Reading {
    Flat letters;
    int eps;     // relator (+1) or its inverse (-1)
    int offset;  // rotation amount
  };

  // Longest run match of any reading as a subword of w with run >= min_run;
  // ties: smallest position, then smallest reading index.
  std::optional<std::tuple<int, int, int>> find_match(const Flat& w, int min_run) const {
    int best_run = min_run - 1, best_pos = -1, best_reading = -1;
    const int L = relator_length();
    for (int i = 0; i < (int)w.size(); ++i) {
      for (int r = 0; r < (int)readings_.size(); ++r) {
        const Flat& R = readings_[size_t(r)].letters;
        int run = 0;
        while (run < L && i + run < (int)w.size() && w[size_t(i + run)] == R[size_t(run)]) ++run;
        if (run > best_run) {
          best_run = run;
          best_pos = i;
          best_reading = r;
        }
      }
    }
    if (best_pos < 0) return std::nullopt;
    return std::make_tuple(best_pos, best_reading, best_run);
  }

  // Dehn-shorten to a geodesic (no subword longer than half the relator).
  Flat dehn_geodesic(Flat w) const {
    w = free_reduce(w);
    for (;;) {
      auto m = find_match(w, half_length() + 1);
      if (!m) return w;
      auto [pos, reading, run] = *m;
      const Reading& rd = readings_[size_t(reading)];
      Flat qinv = inverse_flat(Flat(rd.letters.begin() + run, rd.letters.end()));
      Flat next(w.begin(), w.begin() + pos);
      next.insert(next.end(), qinv.begin(), qinv.end());
      next.insert(next.end(), w.begin() + pos + run, w.end());
      w = free_reduce(next);
    }
  }

  // All geodesic spellings reachable by exchanging exactly-half relator
  // subwords; returns the ShortLex minimum. Restarts if an exchange exposes
  // a shorter spelling (possible only before full Dehn reduction).
  Flat normalize_flat(Flat w) const {
    for (;;) {
      w = dehn_geodesic(w);
      std::map<Word, bool, Word::ShortLex> seen;
      std::deque<Flat> queue{w};
      seen.emplace(Word::from_flat(w), true);
      std::optional<Flat> shorter;
      const int H = half_length();
      while (!queue.empty() && !shorter) {
        Flat cur = queue.front();
        queue.pop_front();
        for (int i = 0; i + H <= (int)cur.size() && !shorter; ++i) {
          for (int r = 0; r < (int)readings_.size(); ++r) {
            const Flat& R = readings_[size_t(r)].letters;
            bool match = true;
            for (int t = 0; t < H && match; ++t)
              if (cur[size_t(i + t)] != R[size_t(t)]) match = false;
            if (!match) continue;
            Flat qinv = inverse_flat(Flat(R.begin() + H, R.end()));
            Flat cand(cur.begin(), cur.begin() + i);
            cand.insert(cand.end(), qinv.begin(), qinv.end());
            cand.insert(cand.end(), cur.begin() + i + H, cur.end());
            cand = free_reduce(cand);
            if (cand.size() < w.size()) {
              shorter = cand;
              break;
            }
            if (seen.emplace(Word::from_flat(cand), true).second) queue.push_back(cand);
          }
        }
      }
      if (!shorter) return seen.begin()->first.flat();
      w = *shorter;
    }
  }

  struct ConjData {
    Word label;
    Word to_label;  // g = to_label * label * to_label^-1
    std::map<Word, Word, Word::ShortLex> states;  // state -> conj, g = conj*state*conj^-1
  };

  const ConjData& conj_data(const Word& g) const {
    Word key = normal_form(g);
    {
      std::lock_guard<std::mutex> lock(conj_mutex_);
      auto it = conj_cache_.find(key);
      if (it != conj_cache_.end()) return it->second;
    }
    ConjData data = compute_conj_data(key);
    std::lock_guard<std::mutex> lock(conj_mutex_);
    return conj_cache_.emplace(key, std::move(data)).first->second;
  }

  // Cyclic reduction with conjugator tracking: g = c * (result) * c^-1 and the
  // result is cyclically freely reduced and cyclically Dehn-reduced.
  std::pair<Flat, Word> cyclic_reduce(Flat w, Word c) const {
    for (;;) {
      w = Flat(dehn_geodesic(w));
      bool changed = false;
      while (w.size() >= 2 && w.front().first == w.back().first &&
             w.front().second == -w.back().second) {
        c = multiply(c, Word::from_flat({w.front()}));
        w = Flat(w.begin() + 1, w.end() - 1);
        changed = true;
      }
      if (changed) continue;
      // cyclic Dehn shortening: scan the doubled word for long runs
      if (!w.empty()) {
        Flat dbl = w;
        dbl.insert(dbl.end(), w.begin(), w.end());
        const int L = relator_length();
        bool shortened = false;
        for (int i = 0; i < (int)w.size() && !shortened; ++i) {
          for (int r = 0; r < (int)readings_.size() && !shortened; ++r) {
            const Flat& R = readings_[size_t(r)].letters;
            int run = 0;
            while (run < L && run < (int)w.size() &&
                   dbl[size_t(i + run)] == R[size_t(run)]) ++run;
            if (run <= half_length()) continue;
            // rotate so the match starts at 0, then replace linearly
            Word rot = Word::from_flat(Flat(w.begin(), w.begin() + i));
            c = multiply(c, rot);
            Flat rotated(w.begin() + i, w.end());
            rotated.insert(rotated.end(), w.begin(), w.begin() + i);
            // rotated = P ++ tail with P = R[:run]; replace P by Q^-1
            Flat next = inverse_flat(Flat(R.begin() + run, R.end()));
            next.insert(next.end(), rotated.begin() + run, rotated.end());
            w = free_reduce(next);
            shortened = true;
          }
        }
        if (shortened) continue;
      }
      return {w, c};
    }
  }

  ConjData compute_conj_data(const Word& g) const {
    auto [w0, c0] = cyclic_reduce(g.flat(), Word::one());
    for (;;) {
      ConjData data;
      std::deque<std::pair<Flat, Word>> queue{{w0, c0}};
      data.states.emplace(Word::from_flat(w0), c0);
      std::optional<std::pair<Flat, Word>> shorter;
      const int H = half_length();
      const long cap = opts_.conjugacy_search_radius;
      while (!queue.empty() && !shorter) {
        auto [cur, c] = queue.front();
        queue.pop_front();
        if ((long)data.states.size() > cap)
          throw BoundExceeded("conjugacy closure exceeded conjugacy_search_radius=" +
                              std::to_string(cap) + " at " + format(g));
        std::vector<std::pair<Flat, Word>> nbrs;
        if (!cur.empty()) {
          // rotation by one letter
          Flat rot(cur.begin() + 1, cur.end());
          rot.push_back(cur.front());
          nbrs.emplace_back(std::move(rot),
                            multiply(c, Word::from_flat({cur.front()})));
        }
        // exactly-half exchanges (linear positions; rotations cover wraps)
        for (int i = 0; i + H <= (int)cur.size(); ++i) {
          for (int r = 0; r < (int)readings_.size(); ++r) {
            const Flat& R = readings_[size_t(r)].letters;
            bool match = true;
            for (int t = 0; t < H && match; ++t)
              if (cur[size_t(i + t)] != R[size_t(t)]) match = false;
            if (!match) continue;
            Flat qinv = inverse_flat(Flat(R.begin() + H, R.end()));
            Flat cand(cur.begin(), cur.begin() + i);
            cand.insert(cand.end(), qinv.begin(), qinv.end());
            cand.insert(cand.end(), cur.begin() + i + H, cur.end());
            cand = free_reduce(cand);
            nbrs.emplace_back(std::move(cand), c);
          }
        }
        for (auto& [nb, nc] : nbrs) {
          if (nb.size() < w0.size()) {
            shorter = {nb, nc};
            break;
          }
          if (data.states.emplace(Word::from_flat(nb), nc).second)
            queue.emplace_back(nb, nc);
        }
      }
      if (shorter) {
        std::tie(w0, c0) = cyclic_reduce(shorter->first, shorter->second);
        continue;
      }
      data.label = data.states.begin()->first;
      data.to_label = normal_form(data.states.begin()->second);
      return data;
    }
  }

  int genus_;
  std::vector<std::string> names_;
  Flat relator_;
  std::vector<Reading> readings_;

  mutable std::mutex nf_mutex_;
  mutable std::unordered_map<Word, Word, WordHash> nf_cache_;
  mutable std::mutex conj_mutex_;
  mutable std::unordered_map<Word, ConjData, WordHash> conj_cache_;
  mutable std::mutex pow_mutex_;
  mutable std::map<Word, std::map<long, Word>, Word::ShortLex> powers_;
};

}  // namespace pd
