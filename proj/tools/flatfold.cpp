// Command line front end: table verification, invariants, identification and builders.
#include "flatfold/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace flatfold;

namespace {

struct Options {
  SearchBounds bounds;
  long escalation_bound = 3;
  std::size_t closure_cap = kDefaultClosureCap;
  std::string format = "text";
  bool strict = false;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SpaceGroup load_group_arg(const Atlas& atlas, const std::string& arg, std::size_t cap) {
  std::ifstream probe(arg);
  if (probe) {
    GroupFile g = read_group_file(arg);
    return close_group(g.dim, g.gens, cap);
  }
  auto names = atlas.group_names();
  if (std::find(names.begin(), names.end(), arg) == names.end())
    throw IoError("cannot open group file or atlas group: " + arg);
  GroupFile g = atlas.load_group_file(arg);
  return close_group(g.dim, g.gens, cap);
}

std::vector<RatVector> parse_vectors(const std::string& text, std::size_t dim) {
  std::vector<RatVector> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::istringstream ws(part);
    RatVector v;
    std::string x;
    while (ws >> x) v.emplace_back(x);
    for (auto& q : v) q.canonicalize();
    if (v.size() != dim) throw ParseError("span vector has wrong length: " + part);
    out.push_back(std::move(v));
  }
  return out;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
  return s;
}

void print_kv(std::ostream& os, const std::string& format, const std::string& k, const std::string& v) {
  if (format == "tsv")
    os << k << "\t" << v << "\n";
  else
    os << k << ": " << v << "\n";
}

int cmd_invariants(const Options& o, const std::string& file) {
  Atlas atlas;
  SpaceGroup G = load_group_arg(atlas, file, o.closure_cap);
  InvariantRecord r = invariant_record(G);
  auto& os = std::cout;
  print_kv(os, o.format, "dim", std::to_string(r.dim));
  print_kv(os, o.format, "orientable", r.orientable ? "yes" : "no");
  print_kv(os, o.format, "betti", std::to_string(r.betti));
  print_kv(os, o.format, "H1", format_homology(r.betti, r.h1_torsion));
  print_kv(os, o.format, "holonomy", r.holonomy_label);
  print_kv(os, o.format, "holonomy order", std::to_string(r.holonomy_order));
  print_kv(os, o.format, "torsion-free", is_torsion_free(G) ? "yes" : "no");
  CalabiData cd = calabi_data(G);
  print_kv(os, o.format, "span I dim", std::to_string(cd.I.V.size()));
  print_kv(os, o.format, "Z rank", std::to_string(cd.Z_rank));
  print_kv(os, o.format, "structure group", cd.structure_group.label.value_or("?"));
  print_kv(os, o.format, "J torsion-free", cd.J_torsion_free ? "yes" : "no");
  print_kv(os, o.format, "J betti", std::to_string(cd.J_fixed_dim));
  if (!r.orientable)
    print_kv(os, o.format, "orientation double cover", format_record(invariant_record(orientation_double_cover(G))));
  if (is_torsion_free(G) && r.dim >= 2 && r.dim <= 4) {
    try {
      print_kv(os, o.format, "candidates", join(atlas.identify(atlas.full_query(G)), " "));
    } catch (const EmptyCandidateSet&) {
      print_kv(os, o.format, "candidates", "none");
    }
  }
  return 0;
}

int cmd_identify(const Options& o, const std::string& file, const std::string& span) {
  Atlas atlas;
  SpaceGroup G = load_group_arg(atlas, file, o.closure_cap);
  std::vector<std::string> names;
  try {
    names = atlas.identify(atlas.full_query(G));
  } catch (const EmptyCandidateSet& e) {
    std::cout << "no candidates: " << e.what() << "\n";
    return 1;
  }
  print_kv(std::cout, o.format, "candidates", join(names, " "));
  if (span.empty()) return names.size() == 1 ? 0 : 1;

  auto V = parse_vectors(span, G.dim());
  auto rows = atlas.load_all_tables();
  FibrationMatch m = identify_fibration(atlas, rows, G, V, o.bounds);
  print_kv(std::cout, o.format, "fiber", m.fiber);
  print_kv(std::cout, o.format, "base", m.kind == OrbifoldType::InfiniteCyclic ? "circle" : "interval");
  print_kv(std::cout, o.format, "m", std::to_string(m.m));
  print_kv(std::cout, o.format, "beta", format_element(m.beta));
  if (m.gamma) print_kv(std::cout, o.format, "gamma", format_element(*m.gamma));
  for (const auto& [row, v] : m.verdicts) {
    if (v.kind == EquivalenceVerdict::Kind::InequivalentByInvariant) continue;
    print_kv(std::cout, o.format,
             "table " + std::to_string(row->table_id) + " row " + std::to_string(row->row_no) + " " + row->manifold,
             to_string(v.kind));
  }
  print_kv(std::cout, o.format, "manifold", m.manifolds.empty() ? "?" : join(m.manifolds, " "));
  return m.manifolds.size() == 1 ? 0 : 1;
}

int cmd_classify(const Options& o, std::size_t n) {
  if (n < 1 || n > 3) throw std::invalid_argument("classify-glnz: n must be 1, 2 or 3");
  auto elems = finite_order_elements(n, o.bounds);
  Partition conj = conjugacy_classes(elems, o.bounds);
  Partition pairs = inverse_pair_classes(conj);
  std::cout << "n " << n << ": " << elems.size() << " elements, " << conj.count << " conjugacy classes, "
            << pairs.count << " inverse-pair classes\n";
  std::size_t k = 0;
  for (const auto& cls : pairs.classes()) {
    const IntMatrix& A = pairs.elements[cls.front()];
    std::cout << "class " << ++k << " (" << cls.size() << " elements): " << format_element(AffineMap::linear(A)) << "\n";
  }
  return 0;
}

int cmd_build(const Options& o, const std::string& fiber, const std::string& beta, const std::string& gamma, long m,
              const std::string& out) {
  Atlas atlas;
  SpaceGroup M = load_group_arg(atlas, fiber, o.closure_cap);
  AffineMap b = parse_element(beta, M.dim());
  BuiltTotal T = gamma.empty() ? build_circle_total(M, b, m)
                               : build_interval_total(M, b, parse_element(gamma, M.dim()), m);
  if (!is_torsion_free(T.G)) throw TorsionDetected("built group has torsion");
  GroupFile g{T.G.dim(), T.G.normal_generators()};
  std::string text = write_group_file(g);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!(f << text)) throw IoError("cannot write " + out);
  }
  std::cerr << format_record(invariant_record(T.G)) << "\n";
  return 0;
}

int cmd_emit(const Options& o, const std::vector<int>& ids, const std::string& out_dir) {
  const std::string fmt = o.format == "tsv" ? "tsv" : "markdown";
  Atlas atlas;
  for (int id : ids.empty() ? Atlas::table_ids() : ids) {
    std::string text = emit_table(atlas, id, fmt);
    if (out_dir.empty()) {
      std::cout << text << "\n";
    } else {
      char name[64];
      std::snprintf(name, sizeof name, "/table-%02d.%s", id, fmt == "tsv" ? "tsv" : "md");
      std::ofstream f(out_dir + name);
      if (!(f << text)) throw IoError("cannot write " + out_dir + name);
    }
  }
  return 0;
}

int cmd_verify(const Options& o, const std::vector<int>& ids, bool no_pairs) {
  Atlas atlas;
  VerifyOptions vo;
  vo.bounds = o.bounds;
  vo.escalation_bound = o.escalation_bound;
  vo.pairwise = !no_pairs;
  VerificationReport rep = verify_tables(atlas, ids.empty() ? Atlas::table_ids() : ids, vo);
  std::cout << (o.format == "tsv" ? rep.to_tsv() : rep.to_text());
  return rep.exit_code(o.strict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fibrations of closed flat manifolds over 1-orbifolds"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--entry-bound", o.bounds.entry_bound, "matrix entry bound of searches")->capture_default_str();
    sub->add_option("--denom-bound", o.bounds.denom_bound, "translation denominator bound")->capture_default_str();
    sub->add_option("--conj-bound", o.bounds.conj_bound, "entry bound of the conjugacy walk")->capture_default_str();
    sub->add_option("--closure-cap", o.closure_cap, "largest point group closed")->capture_default_str();
    sub->add_option("--jobs", o.bounds.jobs, "worker threads")->capture_default_str();
    sub->add_option("--format", o.format, "text, tsv or markdown")->capture_default_str();
    sub->add_flag("--strict", o.strict, "treat unknown verdicts as failures");
  };

  std::vector<int> ids;
  bool no_pairs = false;
  auto* verify = app.add_subcommand("verify-tables", "verify every table row");
  add_common(verify);
  verify->add_option("--tables", ids, "table numbers (default all)");
  verify->add_option("--escalation-bound", o.escalation_bound, "entry bound of the retry for unknown pairs")
      ->capture_default_str();
  verify->add_flag("--no-pairs", no_pairs, "skip the pairwise inequivalence checks");

  std::string file, span;
  auto* inv = app.add_subcommand("invariants", "print invariants and Calabi data of a group");
  add_common(inv);
  inv->add_option("group", file, "group file or atlas name")->required();

  auto* ident = app.add_subcommand("identify", "identify a flat manifold group");
  add_common(ident);
  ident->add_option("group", file, "group file or atlas name")->required();
  ident->add_option("--span", span, "comma separated vectors spanning the fiber, e.g. \"1 0 0 0,0 1 0 0,0 0 1 0\"");

  std::size_t n = 2;
  auto* cls = app.add_subcommand("classify-glnz", "inverse-pair classes of finite order matrices in GL(n,Z)");
  add_common(cls);
  cls->add_option("n", n, "dimension 1, 2 or 3")->required();

  std::string fiber, beta, gamma, out;
  long m = 1;
  auto* circ = app.add_subcommand("build-circle", "mapping torus of a fiber affinity");
  add_common(circ);
  circ->add_option("--fiber", fiber, "fiber group file or atlas name")->required();
  circ->add_option("--beta", beta, "monodromy \"t_1 ... | a_11 ...\"")->required();
  circ->add_option("--m", m, "affinity order")->required();
  circ->add_option("--out", out, "output group file");

  auto* intv = app.add_subcommand("build-interval", "union of two twisted I-bundles");
  add_common(intv);
  intv->add_option("--fiber", fiber, "fiber group file or atlas name")->required();
  intv->add_option("--beta", beta, "first reflection monodromy")->required();
  intv->add_option("--gamma", gamma, "second reflection monodromy")->required();
  intv->add_option("--m", m, "order of gamma beta")->required();
  intv->add_option("--out", out, "output group file");

  std::string out_dir;
  auto* emit = app.add_subcommand("emit-tables", "regenerate the fibration tables");
  add_common(emit);
  emit->add_option("--tables", ids, "table numbers (default all)");
  emit->add_option("--out-dir", out_dir, "write one file per table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(o, ids, no_pairs);
    if (*inv) return cmd_invariants(o, file);
    if (*ident) return cmd_identify(o, file, span);
    if (*cls) return cmd_classify(o, n);
    if (*circ) return cmd_build(o, fiber, beta, "", m, out);
    if (*intv) return cmd_build(o, fiber, beta, gamma, m, out);
    if (*emit) return cmd_emit(o, ids, out_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ChecksumMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
