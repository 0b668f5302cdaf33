#include "wedge/chart.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wedge::geo {

using sym::IndexGroup;

namespace {

std::vector<std::pair<char, int>> shape_of(const std::vector<IndexGroup>& gs) {
  std::vector<std::pair<char, int>> s;
  for (const IndexGroup& g : gs) s.push_back({g.sep, (int)g.idx.size()});
  return s;
}

std::vector<std::vector<int>> digits_of(const std::vector<IndexGroup>& gs) {
  std::vector<std::vector<int>> key;
  for (const IndexGroup& g : gs) {
    std::vector<int> d;
    for (char ch : g.idx) d.push_back(ch - '0');
    key.push_back(std::move(d));
  }
  return key;
}

// sort each group (indices are antisymmetric within a group), then sort the
// groups of every swap run (slot transpositions); returns the sign, 0 when a
// repeated index or repeated group kills the component
int normalize_key(std::vector<std::vector<int>>& key,
                  const std::vector<SwapRun>& swap_runs) {
  int sign = 1;
  for (std::vector<int>& g : key)
    for (size_t i = 1; i < g.size(); ++i)
      for (size_t j = i; j > 0 && g[j - 1] >= g[j]; --j) {
        if (g[j - 1] == g[j]) return 0;
        std::swap(g[j - 1], g[j]);
        sign = -sign;
      }
  for (const SwapRun& r : swap_runs) {
    // insertion sort over chunks of r.chunk groups; one chunk swap flips sign
    auto chunk_at = [&](int i) {
      return std::vector<std::vector<int>>(key.begin() + r.begin + i * r.chunk,
                                           key.begin() + r.begin + (i + 1) * r.chunk);
    };
    int chunks = (r.end - r.begin) / r.chunk;
    for (int i = 1; i < chunks; ++i)
      for (int j = i; j > 0 && chunk_at(j - 1) >= chunk_at(j); --j) {
        if (chunk_at(j - 1) == chunk_at(j)) return 0;
        std::swap_ranges(key.begin() + r.begin + (j - 1) * r.chunk,
                         key.begin() + r.begin + j * r.chunk,
                         key.begin() + r.begin + j * r.chunk);
        sign = -sign;
      }
  }
  return sign;
}

std::string render_name(const std::string& head,
                        const std::vector<IndexGroup>& gs) {
  std::string n = head;
  for (const IndexGroup& g : gs) {
    n += g.sep;
    n += g.idx;
  }
  return n;
}

// split a user-supplied base label into head + groups
void parse_label(const std::string& name, std::string& head,
                 std::vector<IndexGroup>& groups) {
  size_t i = 0;
  while (i < name.size() && std::isalpha((unsigned char)name[i])) ++i;
  if (i == 0) throw std::invalid_argument("coordinate name must start with letters: " + name);
  head = name.substr(0, i);
  groups.clear();
  while (i < name.size()) {
    char sep = name[i];
    if (sep != '_' && sep != '^')
      throw std::invalid_argument("coordinate name is head plus index groups: " + name);
    ++i;
    std::string idx;
    while (i < name.size() && std::isdigit((unsigned char)name[i])) idx += name[i++];
    if (idx.empty())
      throw std::invalid_argument("empty index group in coordinate name: " + name);
    groups.push_back({sep, idx});
  }
}

struct Family {
  std::vector<std::pair<char, int>> shape;
  std::vector<SwapRun> swap_runs;
  std::vector<int> members;
  std::map<std::vector<std::vector<int>>, int> index;
};

} // namespace

struct Chart::Impl {
  std::string label;
  int depth = 0;
  int base_count = 0;
  std::vector<Coordinate> coords;
  std::map<std::string, int> by_name;
  std::map<std::string, std::vector<Family>> families;
  std::vector<std::pair<std::string, size_t>> coord_family;

  bool is_base(int pos) const {
    const Coordinate& c = coords[pos];
    return c.d1 == 0 && c.d2 == 0;
  }

  bool head_taken(const std::string& h) const { return families.count(h) != 0; }

  bool head_shape_taken(const std::string& h,
                        const std::vector<std::pair<char, int>>& shape) const {
    auto it = families.find(h);
    if (it == families.end()) return false;
    for (const Family& f : it->second)
      if (f.shape == shape) return true;
    return false;
  }

  void finalize() {
    by_name.clear();
    families.clear();
    coord_family.assign(coords.size(), {});
    if (base_count > 9)
      throw std::invalid_argument("base dimension exceeds 9 on " + label);
    for (int pos = 0; pos < (int)coords.size(); ++pos) {
      Coordinate& c = coords[pos];
      if (!by_name.emplace(c.name, pos).second)
        throw std::runtime_error("duplicate coordinate " + c.name + " on " + label);
      std::vector<Family>& fams = families[c.head];
      auto shape = shape_of(c.groups);
      size_t fi = 0;
      while (fi < fams.size() && fams[fi].shape != shape) ++fi;
      if (fi == fams.size()) {
        fams.push_back(Family{});
        fams[fi].shape = shape;
        fams[fi].swap_runs = c.swap_runs;
      }
      Family& f = fams[fi];
      f.members.push_back(pos);
      auto key = digits_of(c.groups);
      if (normalize_key(key, f.swap_runs) != 1 && !key.empty())
        throw std::logic_error("non-canonical coordinate name " + c.name);
      f.index.emplace(std::move(key), pos);
      coord_family[pos] = {c.head, fi};
    }
  }
};

// ---------------------------------------------------------------------------
// accessors
// ---------------------------------------------------------------------------

const std::string& Chart::label() const { return impl_->label; }
int Chart::dim() const { return (int)impl_->coords.size(); }
int Chart::base_dim() const { return impl_->base_count; }
int Chart::depth() const { return impl_->depth; }
const std::vector<Coordinate>& Chart::coords() const { return impl_->coords; }
const Coordinate& Chart::coord(int pos) const { return impl_->coords.at(pos); }

int Chart::position(const std::string& name) const {
  auto it = impl_->by_name.find(name);
  return it == impl_->by_name.end() ? -1 : it->second;
}

bool Chart::has(const std::string& name) const { return position(name) >= 0; }

Expr Chart::v(int pos) const { return sym::var(coord(pos).name); }

std::optional<Chart::Hit> Chart::query(
    const std::string& head, const std::vector<std::vector<int>>& digits) const {
  auto it = impl_->families.find(head);
  if (it == impl_->families.end()) return std::nullopt;
  for (const Family& f : it->second) {
    if (f.shape.size() != digits.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < digits.size(); ++i)
      if ((int)digits[i].size() != f.shape[i].second) ok = false;
    if (!ok) continue;
    auto key = digits;
    int sign = normalize_key(key, f.swap_runs);
    if (sign == 0) return Hit{-1, 0};
    auto hit = f.index.find(key);
    if (hit == f.index.end()) return std::nullopt;
    return Hit{hit->second, sign};
  }
  return std::nullopt;
}

std::vector<int> Chart::family_of(int pos) const {
  const auto& [head, fi] = impl_->coord_family.at(pos);
  return impl_->families.at(head).at(fi).members;
}

sym::SymbolResolver Chart::resolver() const {
  auto impl = impl_;
  return [impl](const std::string& head, const std::vector<IndexGroup>& gs)
             -> std::optional<Expr> {
    auto it = impl->families.find(head);
    if (it == impl->families.end()) return std::nullopt;
    for (const IndexGroup& g : gs)
      for (char ch : g.idx)
        if (ch < '1' || ch > '9') return std::nullopt;
    auto shape = shape_of(gs);
    for (const Family& f : it->second) {
      if (f.shape != shape) continue;
      auto key = digits_of(gs);
      int sign = normalize_key(key, f.swap_runs);
      if (sign == 0) return sym::num(0);
      auto hit = f.index.find(key);
      if (hit == f.index.end()) return std::nullopt;
      Expr x = sym::var(impl->coords[hit->second].name);
      return sign < 0 ? sym::neg(x) : x;
    }
    return std::nullopt;
  };
}

Expr Chart::parse(const std::string& text) const {
  sym::ParseOptions opts;
  opts.resolve = resolver();
  return sym::parse(text, opts);
}

std::vector<std::string> Chart::foreign_atoms(const Expr& e) const {
  std::vector<std::string> out;
  for (const sym::AtomKey& k : sym::atoms(e))
    if (k.is_dif || !has(k.name)) out.push_back(sym::atom_name(k));
  return out;
}

bool Chart::same_coords(const Chart& other) const {
  if (dim() != other.dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (coord(i).name != other.coord(i).name) return false;
  return true;
}

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

Chart base_chart(const std::vector<std::string>& names, const std::string& label) {
  auto im = std::make_shared<Chart::Impl>();
  im->label = label;
  im->depth = 0;
  im->base_count = (int)names.size();
  for (const std::string& n : names) {
    Coordinate c;
    c.name = n;
    parse_label(n, c.head, c.groups);
    im->coords.push_back(std::move(c));
  }
  im->finalize();
  return Chart(std::move(im));
}

Chart base_chart(int m) {
  std::vector<std::string> names;
  for (int i = 1; i <= m; ++i) names.push_back("x_" + std::to_string(i));
  return base_chart(names);
}

Chart bundle_chart(int m, int k, const std::string& fiber_head, char fiber_sep) {
  auto im = std::make_shared<Chart::Impl>();
  im->label = "E{" + fiber_head + "}";
  im->depth = 1;
  im->base_count = m;
  for (int i = 1; i <= m; ++i) {
    Coordinate c;
    c.name = "x_" + std::to_string(i);
    c.head = "x";
    c.groups = {{'_', std::to_string(i)}};
    im->coords.push_back(std::move(c));
  }
  for (int a = 1; a <= k; ++a) {
    Coordinate c;
    c.head = fiber_head;
    c.groups = {{fiber_sep, std::to_string(a)}};
    c.name = render_name(c.head, c.groups);
    c.d1 = 0;
    c.d2 = 1;
    im->coords.push_back(std::move(c));
  }
  im->finalize();
  return Chart(std::move(im));
}

Chart bundle_chart(int m, const std::vector<std::string>& fiber_labels) {
  auto im = std::make_shared<Chart::Impl>();
  im->label = "E";
  im->depth = 1;
  im->base_count = m;
  for (int i = 1; i <= m; ++i) {
    Coordinate c;
    c.name = "x_" + std::to_string(i);
    c.head = "x";
    c.groups = {{'_', std::to_string(i)}};
    im->coords.push_back(std::move(c));
  }
  for (const std::string& n : fiber_labels) {
    Coordinate c;
    c.name = n;
    parse_label(n, c.head, c.groups);
    c.d1 = 0;
    c.d2 = 1;
    im->coords.push_back(std::move(c));
  }
  im->finalize();
  return Chart(std::move(im));
}

Chart fiber_product(const Chart& a, const Chart& b) {
  if (a.base_dim() != b.base_dim())
    throw std::invalid_argument("fiber product needs a shared base");
  for (int i = 0; i < a.base_dim(); ++i)
    if (a.coord(i).name != b.coord(i).name)
      throw std::invalid_argument("fiber product needs a shared base");
  if (a.depth() > 1 || b.depth() > 1)
    throw std::invalid_argument("fiber product of iterated bundles is not supported");
  auto im = std::make_shared<Chart::Impl>();
  im->label = a.label() + " x " + b.label();
  im->depth = std::max(a.depth(), b.depth());
  im->base_count = a.base_dim();
  im->coords = a.coords();
  for (int i = b.base_dim(); i < b.dim(); ++i) {
    Coordinate c = b.coord(i);
    for (int& p : c.parents)
      if (p >= b.base_dim())
        throw std::invalid_argument("fiber product fibers must sit over the base");
    im->coords.push_back(std::move(c));
  }
  im->finalize();
  return Chart(std::move(im));
}

namespace {

// first head in the chain not yet used the given way
std::string pick_head(const std::vector<std::string>& chain,
                      const std::function<bool(const std::string&)>& taken) {
  for (const std::string& h : chain)
    if (!taken(h)) return h;
  throw std::runtime_error("ran out of head names for " + chain.front());
}

} // namespace

Chart tangent(const Chart& c) {
  if (c.depth() >= 2)
    throw std::invalid_argument("functor nesting deeper than two is not supported");
  auto im = std::make_shared<Chart::Impl>(*c.impl_);
  im->label = "T" + im->label;
  im->depth = c.depth() + 1;
  int n0 = (int)im->coords.size();
  // heads are chosen once per input family, in coordinate order
  std::map<std::pair<std::string, size_t>, std::string> fam_head;
  std::vector<std::string> assigned;
  for (int pos = 0; pos < n0; ++pos) {
    auto famkey = c.impl_->coord_family[pos];
    if (!fam_head.count(famkey)) {
      std::string h = c.impl_->coords[pos].head;
      fam_head[famkey] = pick_head({h + "d", h + "p"}, [&](const std::string& cand) {
        if (c.impl_->head_taken(cand)) return true;
        return std::find(assigned.begin(), assigned.end(), cand) != assigned.end();
      });
      assigned.push_back(fam_head[famkey]);
    }
    const Coordinate& src = c.impl_->coords[pos];
    Coordinate d;
    d.head = fam_head[famkey];
    d.groups = src.groups;
    if (c.impl_->is_base(pos)) // dotting a base label makes a vector index
      for (IndexGroup& g : d.groups) g.sep = '^';
    d.name = render_name(d.head, d.groups);
    d.parents = {pos};
    d.swap_runs = src.swap_runs;
    if (im->depth == 1) {
      d.d1 = 0;
      d.d2 = 1;
    } else {
      d.d1 = 1;
      d.d2 = src.d2;
    }
    im->coords.push_back(std::move(d));
  }
  im->finalize();
  return Chart(std::move(im));
}

Chart cotangent(const Chart& c) {
  if (c.depth() >= 2)
    throw std::invalid_argument("functor nesting deeper than two is not supported");
  auto im = std::make_shared<Chart::Impl>(*c.impl_);
  im->label = "T*" + im->label;
  im->depth = c.depth() + 1;
  int n0 = (int)im->coords.size();
  static const std::map<std::string, std::string> conj_head = {
      {"e", "pi"}, {"xi", "phi"}, {"xd", "f"}, {"p", "q"}};
  std::map<std::pair<std::string, size_t>, std::string> fam_head;
  std::vector<std::string> assigned;
  for (int pos = 0; pos < n0; ++pos) {
    auto famkey = c.impl_->coord_family[pos];
    const Coordinate& src = c.impl_->coords[pos];
    if (!fam_head.count(famkey)) {
      auto taken = [&](const std::string& cand) {
        if (c.impl_->head_taken(cand)) return true;
        return std::find(assigned.begin(), assigned.end(), cand) != assigned.end();
      };
      std::string h;
      if (c.impl_->is_base(pos)) {
        h = pick_head({"p", "f"}, taken);
      } else {
        auto it = conj_head.find(src.head);
        if (it == conj_head.end() || taken(it->second))
          throw std::runtime_error("no cotangent naming rule for head " + src.head);
        h = it->second;
      }
      fam_head[famkey] = h;
      assigned.push_back(h);
    }
    Coordinate d;
    d.head = fam_head[famkey];
    d.groups = src.groups;
    if (!c.impl_->is_base(pos)) // conjugating a fiber flips the index case
      for (IndexGroup& g : d.groups) g.sep = (g.sep == '_') ? '^' : '_';
    d.name = render_name(d.head, d.groups);
    d.parents = {pos};
    d.swap_runs = src.swap_runs;
    if (im->depth == 1) {
      d.d1 = 0;
      d.d2 = 1;
    } else {
      d.d1 = 1;
      d.d2 = 1 - src.d2;
    }
    im->coords.push_back(std::move(d));
  }
  im->finalize();
  return Chart(std::move(im));
}

Chart wedge_tangent(int n, const Chart& c) {
  if (n < 1) throw std::invalid_argument("wedge degree must be positive");
  if (n == 1) return tangent(c);
  if (c.depth() >= 2)
    throw std::invalid_argument("functor nesting deeper than two is not supported");
  auto im = std::make_shared<Chart::Impl>(*c.impl_);
  im->label = "/\\" + std::to_string(n) + "T" + im->label;
  im->depth = c.depth() + 1;
  int n0 = (int)im->coords.size();

  // a run signature: base block coordinates count as one pseudo-family
  auto run_fam = [&](int pos) -> std::pair<std::string, size_t> {
    if (c.impl_->is_base(pos)) return {"", 0};
    return c.impl_->coord_family[pos];
  };

  std::map<std::vector<std::pair<std::pair<std::string, size_t>, int>>, std::string>
      sig_head;
  std::vector<std::pair<std::string, std::vector<std::pair<char, int>>>> assigned;

  std::vector<int> tup(n);
  std::function<void(int, int)> emit = [&](int slot, int from) {
    if (slot == n) {
      // split the tuple into family runs
      std::vector<std::pair<std::pair<std::string, size_t>, int>> sig;
      for (int i = 0; i < n; ++i) {
        auto f = run_fam(tup[i]);
        if (!sig.empty() && sig.back().first == f)
          ++sig.back().second;
        else
          sig.push_back({f, 1});
      }
      // groups: runs of single-digit parents merge, others copy verbatim
      std::vector<IndexGroup> under, over; // '_' groups print first
      std::vector<SwapRun> swap_runs;
      int i = 0;
      for (auto& [fam, len] : sig) {
        bool mergeable = true;
        for (int j = i; j < i + len; ++j) {
          const Coordinate& p = c.impl_->coords[tup[j]];
          if (p.groups.size() > 1 || (p.groups.size() == 1 && p.groups[0].idx.size() > 1))
            mergeable = false;
        }
        bool base_run = fam.first.empty();
        if (mergeable) {
          char sep = '^';
          std::string idx;
          for (int j = i; j < i + len; ++j) {
            const Coordinate& p = c.impl_->coords[tup[j]];
            if (!base_run && !p.groups.empty()) sep = p.groups[0].sep;
            if (p.groups.empty())
              idx += std::to_string(tup[j] + 1); // unindexed label: use position
            else
              idx += p.groups[0].idx;
          }
          (sep == '_' ? under : over).push_back({sep, idx});
        } else {
          std::vector<IndexGroup>& side =
              (c.impl_->coords[tup[i]].groups[0].sep == '_') ? under : over;
          int gpp = (int)c.impl_->coords[tup[i]].groups.size();
          int begin = (int)side.size();
          for (int j = i; j < i + len; ++j)
            for (const IndexGroup& g : c.impl_->coords[tup[j]].groups)
              side.push_back(g);
          if (len > 1) {
            // remember the offset from the '_'/'^' merge below
            swap_runs.push_back({begin, begin + len * gpp, gpp});
            if (&side == &over) {
              swap_runs.back().begin -= 1000;
              swap_runs.back().end -= 1000;
            }
          }
        }
        i += len;
      }
      // assemble groups in printing order and fix up swap run offsets
      std::vector<IndexGroup> groups = under;
      groups.insert(groups.end(), over.begin(), over.end());
      for (auto& [b, e, chunk] : swap_runs)
        if (b < -500) {
          b += 1000 + (int)under.size();
          e += 1000 + (int)under.size();
        }
      // head for this signature
      if (!sig_head.count(sig)) {
        std::vector<std::string> chain;
        bool has_base = sig.front().first.first.empty();
        size_t nfam = sig.size() - (has_base ? 1 : 0);
        if (nfam == 0) {
          std::string bh = c.impl_->coords[0].head;
          chain = {bh + "d", bh + "p", bh + "q"};
        } else if (!has_base && nfam == 1) {
          std::string fh = sig.back().first.first;
          if (!fh.empty() && fh.back() == 'd')
            chain = {"z", "zz", "zzz"};
          else
            chain = {fh + "d", fh + "p", fh + "q"};
        } else if (has_base && nfam == 1) {
          chain = {"y", "yy", "yyy"};
        } else {
          chain = {"v", "vv", "vvv"};
        }
        auto shp = shape_of(groups);
        sig_head[sig] = pick_head(chain, [&](const std::string& cand) {
          if (c.impl_->head_shape_taken(cand, shp)) return true;
          for (auto& [h, s] : assigned)
            if (h == cand && s == shp) return true;
          return false;
        });
        assigned.push_back({sig_head[sig], shape_of(groups)});
      }
      Coordinate d;
      d.head = sig_head[sig];
      d.groups = std::move(groups);
      d.name = render_name(d.head, d.groups);
      d.parents = std::vector<int>(tup.begin(), tup.end());
      d.swap_runs = std::move(swap_runs);
      if (im->depth == 1) {
        d.d1 = 0;
        d.d2 = 1;
      } else {
        d.d1 = 1;
        d.d2 = 0;
        for (int p : d.parents) d.d2 += c.impl_->coords[p].d2;
      }
      im->coords.push_back(std::move(d));
      return;
    }
    for (int p = from; p < n0; ++p) {
      tup[slot] = p;
      emit(slot + 1, p + 1);
    }
  };
  emit(0, 0);
  im->finalize();
  return Chart(std::move(im));
}

Chart wedge_cotangent(int n, const Chart& c) {
  if (n < 1) throw std::invalid_argument("wedge degree must be positive");
  if (n == 1) return cotangent(c);
  if (c.depth() != 0)
    throw std::invalid_argument("/\\nT* applies to base charts");
  auto im = std::make_shared<Chart::Impl>(*c.impl_);
  im->label = "/\\" + std::to_string(n) + "T*" + im->label;
  im->depth = 1;
  int n0 = (int)im->coords.size();
  std::string h = c.impl_->head_taken("p") ? "f" : "p";
  std::vector<int> tup(n);
  std::function<void(int, int)> emit = [&](int slot, int from) {
    if (slot == n) {
      Coordinate d;
      d.head = h;
      std::string idx;
      for (int i = 0; i < n; ++i) {
        const Coordinate& p = c.impl_->coords[tup[i]];
        idx += p.groups.empty() ? std::to_string(tup[i] + 1) : p.groups[0].idx;
      }
      d.groups = {{'_', idx}};
      d.name = render_name(d.head, d.groups);
      d.parents = std::vector<int>(tup.begin(), tup.end());
      d.d1 = 0;
      d.d2 = 1;
      im->coords.push_back(std::move(d));
      return;
    }
    for (int p = from; p < n0; ++p) {
      tup[slot] = p;
      emit(slot + 1, p + 1);
    }
  };
  emit(0, 0);
  im->finalize();
  return Chart(std::move(im));
}

Chart truncate_degree(const Chart& c, int maxdeg) {
  auto im = std::make_shared<Chart::Impl>();
  im->label = c.label() + " (deg<=" + std::to_string(maxdeg) + ")";
  im->depth = c.depth();
  im->base_count = c.base_dim();
  std::vector<int> remap(c.dim(), -1);
  for (int pos = 0; pos < c.dim(); ++pos) {
    if (c.coord(pos).d2 > maxdeg) continue;
    remap[pos] = (int)im->coords.size();
    im->coords.push_back(c.coord(pos));
  }
  for (Coordinate& co : im->coords)
    for (int& p : co.parents) {
      if (remap[p] < 0)
        throw std::invalid_argument("truncation drops a parent of " + co.name);
      p = remap[p];
    }
  im->finalize();
  return Chart(std::move(im));
}

} // namespace wedge::geo
