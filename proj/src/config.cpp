// SPDX-License-Identifier: Apache-2.0
#include "toralrig/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <toml.hpp>

#include "toralrig/error.hpp"

namespace toralrig {
namespace {

[[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& what) {
  std::string where;
  if (node && node->source().begin.line > 0) where = "line " + std::to_string(node->source().begin.line) + ": ";
  throw Error(ErrorKind::Config, where + "field '" + field + "': " + what,
              {node ? static_cast<long long>(node->source().begin.line) : 0});
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const toml::table& t, const std::string& prefix, std::initializer_list<const char*> allowed) {
  for (const auto& [key, node] : t) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key.str() == a;
    if (!ok) fail(&node, join(prefix, std::string(key.str())), "unknown key");
  }
}

double as_double(const toml::node& n, const std::string& field) {
  if (auto v = n.value<double>()) return *v;
  fail(&n, field, "expected a number");
}

long long as_int(const toml::node& n, const std::string& field) {
  if (const auto* i = n.as_integer()) return i->get();
  fail(&n, field, "expected an integer");
}

const toml::array& as_array(const toml::node& n, const std::string& field) {
  if (const auto* a = n.as_array()) return *a;
  fail(&n, field, "expected an array");
}

const toml::table& as_table(const toml::node& n, const std::string& field) {
  if (const auto* t = n.as_table()) return *t;
  fail(&n, field, "expected a table");
}

template <typename T>
void read_int(const toml::table& t, const std::string& prefix, const char* key, T& out, long long lo, long long hi) {
  if (const toml::node* n = t.get(key)) {
    const long long v = as_int(*n, join(prefix, key));
    if (v < lo || v > hi)
      fail(n, join(prefix, key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out = static_cast<T>(v);
  }
}

void read_double(const toml::table& t, const std::string& prefix, const char* key, double& out, double lo, double hi) {
  if (const toml::node* n = t.get(key)) {
    const double v = as_double(*n, join(prefix, key));
    if (!(v >= lo && v <= hi)) {
      std::ostringstream s;
      s << "must lie in [" << lo << ", " << hi << "]";
      fail(n, join(prefix, key), s.str());
    }
    out = v;
  }
}

void read_resolution(const toml::table& t, const std::string& prefix, const char* key, int& out) {
  if (const toml::node* n = t.get(key)) {
    const long long v = as_int(*n, join(prefix, key));
    if (v < 16 || v > (1 << 20) || (v & (v - 1)) != 0) fail(n, join(prefix, key), "must be a power of two >= 16");
    out = static_cast<int>(v);
  }
}

IntMatrix read_matrix(const toml::node& n, const std::string& field) {
  const toml::array& rows = as_array(n, field);
  const int d = static_cast<int>(rows.size());
  if (d == 0) fail(&n, field, "empty matrix");
  IntMatrix m(d, d);
  for (int r = 0; r < d; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    const toml::array& row = as_array(rows[r], rf);
    if (static_cast<int>(row.size()) != d) fail(&rows[r], rf, "matrix must be square");
    for (int c = 0; c < d; ++c) m(r, c) = as_int(row[c], rf + "[" + std::to_string(c) + "]");
  }
  return m;
}

// Entry [index_vector, re, im].
struct RawTerm {
  std::vector<long long> index;
  std::complex<double> c;
  const toml::node* node = nullptr;
};

std::vector<RawTerm> read_terms(const toml::node& n, const std::string& field, std::size_t index_size) {
  std::vector<RawTerm> out;
  const toml::array& arr = as_array(n, field);
  for (std::size_t t = 0; t < arr.size(); ++t) {
    const std::string tf = field + "[" + std::to_string(t) + "]";
    const toml::array& triple = as_array(arr[t], tf);
    if (triple.size() != 3) fail(&arr[t], tf, "expected [index, re, im]");
    RawTerm term;
    term.node = &arr[t];
    const toml::array& idx = as_array(triple[0], tf + "[0]");
    if (idx.size() != index_size)
      fail(&triple[0], tf + "[0]", "index vector must have " + std::to_string(index_size) + " entries");
    for (const auto& v : idx) term.index.push_back(as_int(v, tf + "[0]"));
    term.c = {as_double(triple[1], tf + "[1]"), as_double(triple[2], tf + "[2]")};
    out.push_back(std::move(term));
  }
  return out;
}

CircleMap read_circle_map(const toml::node& n, const std::string& field) {
  const toml::table& t = as_table(n, field);
  reject_unknown(t, field, {"shift", "terms"});
  double shift = 0.0;
  if (const toml::node* s = t.get("shift")) shift = as_double(*s, field + ".shift");
  std::vector<std::complex<double>> coef;
  if (const toml::node* terms = t.get("terms")) {
    for (const RawTerm& term : read_terms(*terms, field + ".terms", 1)) {
      long long k = term.index[0];
      std::complex<double> c = term.c;
      if (k == 0) {
        shift += c.real();
        continue;
      }
      if (k < 0) {
        k = -k;
        c = std::conj(c);
      }
      if (k > FourierField::kDegreeCap) fail(term.node, field + ".terms", "frequency exceeds the degree cap");
      if (static_cast<long long>(coef.size()) < k) coef.resize(static_cast<std::size_t>(k));
      coef[static_cast<std::size_t>(k - 1)] += c;
    }
  }
  return CircleMap(shift, std::move(coef));
}

FourierField read_field(const toml::node& n, const std::string& field, int d) {
  const toml::table& t = as_table(n, field);
  reject_unknown(t, field, {"rotation", "terms", "recipe", "eps", "coordinate"});
  if (const toml::node* r = t.get("recipe")) {
    const auto name = r->value<std::string>();
    if (!name || *name != "sine_product") fail(r, field + ".recipe", "only \"sine_product\" is known");
    double eps = 0.05;
    long long coord = 0;
    if (const toml::node* e = t.get("eps")) eps = as_double(*e, field + ".eps");
    if (const toml::node* c = t.get("coordinate")) coord = as_int(*c, field + ".coordinate");
    if (coord < 0 || coord >= d) fail(t.get("coordinate"), field + ".coordinate", "out of range");
    try {
      return sine_product_field(d, eps, static_cast<int>(coord));
    } catch (const Error& e) {
      fail(&n, field, e.what());
    }
  }
  double rotation = 0.0;
  if (const toml::node* r = t.get("rotation")) rotation = as_double(*r, field + ".rotation");
  std::vector<FourierTerm> terms;
  if (const toml::node* tn = t.get("terms")) {
    for (const RawTerm& raw : read_terms(*tn, field + ".terms", static_cast<std::size_t>(d) + 1)) {
      FourierTerm term;
      term.m = Eigen::VectorXi(d);
      for (int i = 0; i < d; ++i) term.m(i) = static_cast<int>(raw.index[i]);
      term.n = static_cast<int>(raw.index[d]);
      term.c = raw.c;
      terms.push_back(term);
    }
  }
  try {
    return FourierField(d, rotation, std::move(terms));
  } catch (const Error& e) {
    fail(&n, field, e.what());
  }
}

void read_action(const toml::table& root, RunConfig& cfg) {
  const toml::node* an = root.get("action");
  if (!an) throw Error(ErrorKind::Config, "field 'action': missing table");
  const toml::table& action = as_table(*an, "action");
  reject_unknown(action, "action", {"generators"});
  const toml::node* gn = action.get("generators");
  if (!gn) fail(an, "action.generators", "missing");
  const toml::array& gens = as_array(*gn, "action.generators");
  if (gens.empty()) fail(gn, "action.generators", "at least one generator required");
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const std::string f = "action.generators[" + std::to_string(j) + "]";
    IntMatrix m = read_matrix(gens[j], f);
    if (!cfg.generators.empty() && m.rows() != cfg.generators.front().rows())
      fail(&gens[j], f, "all generators must have the same size");
    cfg.generators.push_back(std::move(m));
  }
}

void read_beta0(const toml::table& t, RunConfig& cfg) {
  const int k = cfg.rank();
  if (const toml::node* a = t.get("angles")) {
    const toml::array& arr = as_array(*a, "cocycle.angles");
    if (static_cast<int>(arr.size()) != k) fail(a, "cocycle.angles", "one angle per generator required");
    for (const auto& v : arr) cfg.cocycle.angles.push_back(as_double(v, "cocycle.angles"));
  }
  if (const toml::node* m = t.get("maps")) {
    const toml::array& arr = as_array(*m, "cocycle.maps");
    if (static_cast<int>(arr.size()) != k) fail(m, "cocycle.maps", "one map per generator required");
    for (std::size_t j = 0; j < arr.size(); ++j)
      cfg.cocycle.maps.push_back(read_circle_map(arr[j], "cocycle.maps[" + std::to_string(j) + "]"));
  }
}

void read_cocycle(const toml::table& root, RunConfig& cfg) {
  const toml::node* cn = root.get("cocycle");
  if (!cn) return;
  const toml::table& t = as_table(*cn, "cocycle");
  reject_unknown(t, "cocycle", {"kind", "angles", "maps", "phi", "fields", "words"});
  const toml::node* kn = t.get("kind");
  const std::string kind = kn ? kn->value<std::string>().value_or("") : "identity";
  CocycleSpec& spec = cfg.cocycle;
  const int d = cfg.dimension();
  const int k = cfg.rank();
  if (kind == "identity") {
    spec.kind = CocycleKind::Identity;
  } else if (kind == "rotations") {
    spec.kind = CocycleKind::Rotations;
    read_beta0(t, cfg);
    if (spec.angles.empty()) fail(cn, "cocycle.angles", "required for rotations");
  } else if (kind == "constant") {
    spec.kind = CocycleKind::Constant;
    read_beta0(t, cfg);
    if (spec.maps.empty()) fail(cn, "cocycle.maps", "required for constant cocycles");
  } else if (kind == "coboundary") {
    spec.kind = CocycleKind::Coboundary;
    read_beta0(t, cfg);
    const toml::node* phi = t.get("phi");
    if (!phi) fail(cn, "cocycle.phi", "required for coboundaries");
    spec.fields.push_back(read_field(*phi, "cocycle.phi", d));
  } else if (kind == "fourier") {
    spec.kind = CocycleKind::Fourier;
    const toml::node* fn = t.get("fields");
    const toml::node* wn = t.get("words");
    if (!fn || !wn) fail(cn, "cocycle", "fourier cocycles need 'fields' and 'words'");
    const toml::array& fields = as_array(*fn, "cocycle.fields");
    for (std::size_t i = 0; i < fields.size(); ++i)
      spec.fields.push_back(read_field(fields[i], "cocycle.fields[" + std::to_string(i) + "]", d));
    const toml::array& words = as_array(*wn, "cocycle.words");
    if (static_cast<int>(words.size()) != k) fail(wn, "cocycle.words", "one word per generator required");
    for (std::size_t j = 0; j < words.size(); ++j) {
      const std::string wf = "cocycle.words[" + std::to_string(j) + "]";
      GeneratorWord word;
      const toml::array& factors = as_array(words[j], wf);
      for (std::size_t f = 0; f < factors.size(); ++f) {
        const std::string ff = wf + "[" + std::to_string(f) + "]";
        const toml::table& ft = as_table(factors[f], ff);
        reject_unknown(ft, ff, {"field", "base", "inverse"});
        WordFactor factor;
        factor.base = identity_matrix(d);
        const toml::node* idx = ft.get("field");
        if (!idx) fail(&factors[f], ff + ".field", "missing");
        const long long i = as_int(*idx, ff + ".field");
        if (i < 0 || i >= static_cast<long long>(spec.fields.size())) fail(idx, ff + ".field", "no such field");
        factor.field = static_cast<int>(i);
        if (const toml::node* b = ft.get("base")) {
          factor.base = read_matrix(*b, ff + ".base");
          if (factor.base.rows() != d) fail(b, ff + ".base", "must be " + std::to_string(d) + "x" + std::to_string(d));
        }
        if (const toml::node* inv = ft.get("inverse")) {
          const auto v = inv->value<bool>();
          if (!v) fail(inv, ff + ".inverse", "expected a boolean");
          factor.inverse = *v;
        }
        word.push_back(std::move(factor));
      }
      spec.words.push_back(std::move(word));
    }
  } else {
    fail(kn, "cocycle.kind", "expected identity, rotations, constant, coboundary or fourier");
  }
}

void read_grids(const toml::table& root, RunConfig& cfg) {
  const toml::node* gn = root.get("grids");
  if (!gn) return;
  const toml::table& t = as_table(*gn, "grids");
  reject_unknown(t, "grids", {"base", "fiber", "section_base", "section_fiber", "transfer_base", "transfer_fiber"});
  read_resolution(t, "grids", "base", cfg.grids.certify.base);
  read_resolution(t, "grids", "fiber", cfg.grids.certify.fiber);
  read_resolution(t, "grids", "section_base", cfg.grids.section.base);
  read_resolution(t, "grids", "section_fiber", cfg.grids.section.fiber);
  read_resolution(t, "grids", "transfer_base", cfg.grids.transfer.base);
  read_resolution(t, "grids", "transfer_fiber", cfg.grids.transfer.fiber);
}

void read_tolerances(const toml::table& root, RunConfig& cfg) {
  const toml::node* tn = root.get("tolerances");
  if (!tn) return;
  const toml::table& t = as_table(*tn, "tolerances");
  reject_unknown(t, "tolerances",
                 {"tol", "safety", "search_bound", "witness_bound", "sample_bound", "k_max", "ph_samples", "norm_cap",
                  "section_tol", "section_max_iter", "cone_samples", "growth_samples", "path_samples",
                  "coboundary_samples", "max_period"});
  Tolerances& o = cfg.tolerances;
  read_double(t, "tolerances", "tol", o.tol, 1e-12, 1e-4);
  read_double(t, "tolerances", "safety", o.safety, 1e-6, 1.0);
  read_int(t, "tolerances", "search_bound", o.search_bound, 1, 1000);
  read_int(t, "tolerances", "witness_bound", o.witness_bound, 1, 100);
  read_int(t, "tolerances", "sample_bound", o.sample_bound, 1, 100);
  read_int(t, "tolerances", "k_max", o.k_max, 1, 64);
  read_int(t, "tolerances", "ph_samples", o.ph_samples, 0, 100000);
  read_double(t, "tolerances", "norm_cap", o.norm_cap, 1.0, 1e6);
  read_double(t, "tolerances", "section_tol", o.section_tol, 1e-14, 1e-2);
  read_int(t, "tolerances", "section_max_iter", o.section_max_iter, 1, 100000);
  read_int(t, "tolerances", "cone_samples", o.cone_samples, 1, 10000000);
  read_int(t, "tolerances", "growth_samples", o.growth_samples, 1, 10000000);
  read_int(t, "tolerances", "path_samples", o.path_samples, 0, 100000);
  read_int(t, "tolerances", "coboundary_samples", o.coboundary_samples, 0, 100000);
  read_int(t, "tolerances", "max_period", o.max_period, 0, 64);
}

void read_outputs(const toml::table& root, RunConfig& cfg) {
  const toml::node* on = root.get("outputs");
  if (!on) return;
  const toml::table& t = as_table(*on, "outputs");
  reject_unknown(t, "outputs", {"report", "diagram", "dumps"});
  for (const char* key : {"report", "diagram"}) {
    if (const toml::node* n = t.get(key)) {
      const auto v = n->value<std::string>();
      if (!v || v->empty()) fail(n, std::string("outputs.") + key, "expected a file name");
      (std::string(key) == "report" ? cfg.outputs.report : cfg.outputs.diagram) = *v;
    }
  }
  if (const toml::node* n = t.get("dumps")) {
    const auto v = n->value<bool>();
    if (!v) fail(n, "outputs.dumps", "expected a boolean");
    cfg.outputs.dumps = *v;
  }
}

void read_certify(const toml::table& root, RunConfig& cfg) {
  const toml::node* cn = root.get("certify");
  if (!cn) return;
  const toml::table& t = as_table(*cn, "certify");
  reject_unknown(t, "certify", {"element", "r"});
  if (const toml::node* e = t.get("element")) {
    const toml::array& arr = as_array(*e, "certify.element");
    if (static_cast<int>(arr.size()) != cfg.rank()) fail(e, "certify.element", "needs one entry per generator");
    LatticePoint a(cfg.rank());
    for (int i = 0; i < cfg.rank(); ++i) a(i) = static_cast<int>(as_int(arr[i], "certify.element"));
    cfg.element = a;
  }
  if (const toml::node* r = t.get("r")) {
    if (const auto s = r->value<std::string>(); s && (*s == "inf" || *s == "infinity")) {
      cfg.bunching_r = std::numeric_limits<double>::infinity();
    } else {
      cfg.bunching_r = as_double(*r, "certify.r");
      if (!(cfg.bunching_r >= 0.0)) fail(r, "certify.r", "must be non-negative");
    }
  }
}

RunConfig from_table(const toml::table& root, const std::string& source) {
  reject_unknown(root, "", {"seed", "action", "cocycle", "grids", "tolerances", "outputs", "certify"});
  RunConfig cfg;
  cfg.source = source;
  if (const toml::node* s = root.get("seed")) {
    const long long v = as_int(*s, "seed");
    if (v < 0) fail(s, "seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  read_action(root, cfg);
  read_cocycle(root, cfg);
  read_grids(root, cfg);
  read_tolerances(root, cfg);
  read_outputs(root, cfg);
  read_certify(root, cfg);
  return cfg;
}

RunConfig parse(std::string_view text, const std::string& source) {
  try {
    const toml::table root = toml::parse(text, source);
    return from_table(root, source);
  } catch (const toml::parse_error& e) {
    const auto line = e.source().begin.line;
    throw Error(ErrorKind::Config,
                source + ": line " + std::to_string(line) + ": " + std::string(e.description()),
                {static_cast<long long>(line)});
  }
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse(buf.str(), path);
}

RunConfig parse_config_string(const std::string& text, const std::string& source) { return parse(text, source); }

CircleCocycle build_cocycle(const RunConfig& config, const GeneratorSet& gens) {
  const CocycleSpec& spec = config.cocycle;
  auto beta0 = [&] {
    std::vector<CircleMap> maps = spec.maps;
    if (maps.empty())
      for (int j = 0; j < gens.rank(); ++j)
        maps.push_back(CircleMap::rotation(spec.angles.empty() ? 0.0 : spec.angles[static_cast<std::size_t>(j)]));
    return maps;
  };
  switch (spec.kind) {
    case CocycleKind::Identity:
      return identity_cocycle(gens);
    case CocycleKind::Rotations:
      return constant_rotations(gens, spec.angles);
    case CocycleKind::Constant:
      return constant_cocycle(gens, spec.maps);
    case CocycleKind::Coboundary:
      return coboundary_construct(spec.fields.front(), beta0(), gens);
    case CocycleKind::Fourier:
      return CircleCocycle(gens, spec.fields, spec.words, 1e-10, config.seed);
  }
  throw Error(ErrorKind::InvalidInput, "unknown cocycle kind");
}

}  // namespace toralrig
