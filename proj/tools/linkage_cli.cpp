// linkage: command-line front end for the planar linkage library.
//
//   linkage describe FILE
//   linkage solve FILE [--seed N] [--out PATH]
//   linkage field FILE [--seed N]
//   linkage flow FILE [--t T] [--dt DT] [--piece I] [--seed N] [--out PATH]
//   linkage commute FILE [--s S] [--t T] [--dt DT] [--tol TOL] [--seed N]
//   linkage integrals FILE [--t T] [--dt DT] [--tol TOL] [--seed N]
//   linkage critical FILE [--diagonal A,B] [--starts N] [--tol TOL] [--seed N]
//   linkage svg FILE [--seed N] [--out PATH]
//
// Exit status: 0 success, 1 numerical failure, 2 input error.

#include "linkage/linkage.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace linkage;

namespace {

struct Options {
  std::string input;
  std::string out;
  double dt = 1e-3;
  double t = 1.0;
  double s = 0.1;
  std::uint64_t seed = 42;
  int starts = 200;
  std::optional<double> tol;
  std::optional<std::size_t> piece;
  std::string diagonal;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

/// Writes to --out if given, stdout otherwise.
void emit(const Options &o, const std::string &text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError("cannot write " + o.out);
  f << text;
}

LinkageFile load_valid(const Options &o) {
  LinkageFile file = load_linkage(o.input);
  const auto violations = validate_spec(file.spec);
  if (!violations.empty()) {
    std::string msg = "invalid linkage:";
    for (const auto &v : violations) msg += "\n  " + v.message;
    throw InputError(msg);
  }
  return file;
}

const Decomposition &require_decomposition(const LinkageFile &file) {
  if (!file.decomposition) throw InputError("this command needs a decomposition block");
  return *file.decomposition;
}

void check_decomposition(const LinkageFile &file, std::uint64_t seed) {
  const auto report = validate_decomposition(file.spec, require_decomposition(file), seed);
  if (!report.ok()) {
    std::string msg = "invalid decomposition:";
    for (const auto &v : report.violations) msg += "\n  " + v;
    throw InputError(msg);
  }
}

Coordinates start_point(const ConstraintSystem &system, std::uint64_t seed) {
  return random_feasible(system, derive_seed(seed, 0)).coordinates;
}

struct NamedField {
  std::string name;
  FieldEvaluator field;
};

/// Lifted fields of the pieces that carry one, or the canonical Nambu field
/// of a 1DOF linkage without a decomposition.
std::vector<NamedField> vector_fields(const LinkageFile &file, const ConstraintSystem &whole, std::uint64_t seed) {
  std::vector<NamedField> out;
  if (!file.decomposition) {
    out.push_back({"canonical", as_evaluator(NambuField(whole))});
    return out;
  }
  check_decomposition(file, seed);
  const auto type = system_type(file.spec, *file.decomposition);
  for (std::size_t i = 0; i < file.decomposition->pieces.size(); ++i)
    if (type.per_piece[i] > 0)
      out.push_back({"piece " + std::to_string(i), as_evaluator(LiftedField(file.spec, *file.decomposition, i))});
  if (out.empty()) throw InputError("no piece carries a vector field");
  return out;
}

std::string pair_name(const VertexId &a, const VertexId &b) { return a + "-" + b; }

// ---------------------------------------------------------------------------

int cmd_describe(const Options &o) {
  const LinkageFile file = load_linkage(o.input);
  const auto &spec = file.spec;
  std::ostringstream os;
  os << "vertices: " << spec.vertices.size() << "\n"
     << "edges: " << spec.edges.size() << "\n"
     << "diagonals: " << spec.diagonals.size() << "\n"
     << "base vertices: " << spec.base.size() << "\n";

  const auto violations = validate_spec(spec);
  if (!violations.empty()) {
    std::cout << os.str();
    for (const auto &v : violations) std::cerr << "violation: " << v.message << "\n";
    return 2;
  }

  const PinnedSpec pinned = pin(spec);
  switch (pinned.report.mode) {
  case PinMode::Identity:
    os << "pinning: base vertices used as given\n";
    break;
  case PinMode::OneBase: {
    const auto &bar = *pinned.report.removed_bar;
    os << "pinning: bar " << pair_name(bar.a, bar.b) << " laid along +x from the base vertex\n";
    break;
  }
  case PinMode::NoBase: {
    const auto &bar = *pinned.report.removed_bar;
    os << "pinning: bar " << pair_name(bar.a, bar.b) << " from (0,0) to (" << g17(bar.length) << ",0)\n";
    break;
  }
  }
  const auto q = pinned.active_bars().size();
  os << "movable vertices: " << pinned.movable_count() << "\n"
     << "constraints: " << q << "\n";

  const auto redundant = detect_redundant_bars(pinned, 8, o.seed);
  os << redundant.size() << " redundant bar" << (redundant.size() == 1 ? "" : "s");
  for (std::size_t i = 0; i < redundant.size(); ++i)
    os << (i ? ", " : ": ") << pair_name(redundant[i].edge.a, redundant[i].edge.b);
  os << "\n";
  const auto dim = static_cast<long>(2 * pinned.movable_count()) - static_cast<long>(q - redundant.size());

  if (!file.decomposition) {
    os << "dim M = " << dim << "\n";
    std::cout << os.str();
    return 0;
  }
  const auto &dec = *file.decomposition;
  const auto report = validate_decomposition(spec, dec, o.seed);
  os << "decomposition: " << (report.ok() ? "valid" : "invalid") << " (" << dec.pieces.size() << " pieces, "
     << dec.joints.size() << " joints)\n";
  for (const auto &w : report.warnings) os << "warning: " << w << "\n";
  if (!report.ok()) {
    std::cout << os.str();
    for (const auto &v : report.violations) std::cerr << "violation: " << v << "\n";
    return 2;
  }
  const auto type = system_type(spec, dec);
  os << "dim M = " << dim << ", type (" << type.p << "," << type.q << ")\n";
  std::cout << os.str();
  return 0;
}

int cmd_solve(const Options &o) {
  const LinkageFile file = load_valid(o);
  const ConstraintSystem system(pin(file.spec));
  const Realization r = random_feasible(system, derive_seed(o.seed, 0));
  std::ostringstream os;
  os << "vertex,x,y\n";
  for (const auto &v : file.spec.vertices) {
    const Point &p = r.assignment.at(v);
    os << v << ',' << g17(p.x()) << ',' << g17(p.y()) << '\n';
  }
  emit(o, os.str());
  std::cerr << "residual " << fmt("%.3e", r.residual) << " after " << r.iterations << " iterations\n";
  return 0;
}

int cmd_field(const Options &o) {
  const LinkageFile file = load_valid(o);
  const ConstraintSystem whole(pin(file.spec));
  const Coordinates x = start_point(whole, o.seed);
  std::ostringstream os;
  os << "point";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << ' ' << g17(x[i]);
  os << '\n';
  const auto rows = whole.bar_count() + whole.diagonal_count();
  if (!file.decomposition && rows == whole.dimension()) {
    os << "scalar " << g17(evaluate_scalar(NambuField(whole), x)) << '\n';
  } else {
    for (const auto &f : vector_fields(file, whole, o.seed)) {
      const Coordinates v = f.field(x);
      os << f.name;
      for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << g17(v[i]);
      os << '\n';
    }
  }
  emit(o, os.str());
  return 0;
}

int cmd_flow(const Options &o) {
  const LinkageFile file = load_valid(o);
  const ConstraintSystem whole(pin(file.spec));
  FieldEvaluator field;
  if (file.decomposition) {
    check_decomposition(file, o.seed);
    const auto type = system_type(file.spec, *file.decomposition);
    std::optional<std::size_t> chosen = o.piece;
    if (!chosen)
      for (std::size_t i = 0; i < type.per_piece.size() && !chosen; ++i)
        if (type.per_piece[i] > 0) chosen = i;
    if (!chosen || *chosen >= type.per_piece.size()) throw InputError("no such piece");
    field = as_evaluator(LiftedField(file.spec, *file.decomposition, *chosen));
  } else {
    if (o.piece) throw InputError("--piece needs a decomposition block");
    field = as_evaluator(NambuField(whole));
  }
  const Trajectory traj = integrate(field, whole, start_point(whole, o.seed), o.t, o.dt);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  emit(o, os.str());
  if (traj.halted_singular) std::cerr << "halted at a singular point (field norm below 1e-12)\n";
  return 0;
}

int cmd_commute(const Options &o) {
  const LinkageFile file = load_valid(o);
  const ConstraintSystem whole(pin(file.spec));
  const auto fields = vector_fields(file, whole, o.seed);
  if (fields.size() < 2) throw InputError("commute needs at least two vector fields");
  const double tol = o.tol.value_or(1e-6);
  const Coordinates x = start_point(whole, o.seed);
  std::ostringstream os;
  bool ok = true;
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      const double defect = commutation_defect(fields[i].field, fields[j].field, whole, x, o.s, o.t, o.dt);
      const double bracket = lie_bracket_fd(fields[i].field, fields[j].field, whole, x).norm();
      ok = ok && defect <= tol;
      os << fields[i].name << " / " << fields[j].name << ": defect " << fmt("%.6e", defect) << ", bracket "
         << fmt("%.6e", bracket) << (defect <= tol ? "" : "  exceeds tolerance") << '\n';
    }
  emit(o, os.str());
  return ok ? 0 : 1;
}

int cmd_integrals(const Options &o) {
  const LinkageFile file = load_valid(o);
  const ConstraintSystem whole(pin(file.spec));
  if (whole.diagonal_count() == 0) throw InputError("no marked diagonals");
  const double tol = o.tol.value_or(1e-8);
  const Coordinates x = start_point(whole, o.seed);
  std::ostringstream os;
  os << "integrals";
  for (const auto &d : file.spec.diagonals) os << ' ' << pair_name(d.a, d.b);
  os << '\n';
  bool ok = true;
  for (const auto &f : vector_fields(file, whole, o.seed)) {
    const double drift = integral_drift(f.field, whole, x, o.t, o.dt);
    ok = ok && drift <= tol;
    os << f.name << ": drift " << fmt("%.6e", drift) << (drift <= tol ? "" : "  exceeds tolerance") << '\n';
  }
  emit(o, os.str());
  return ok ? 0 : 1;
}

/// Bar lengths around a base-free hexagon, read from `d.a` to `d.b` and back,
/// if the linkage is one and the diagonal joins opposite corners.
std::optional<std::array<double, 6>> hexagon_chain(const LinkageSpec &spec, const VertexPair &d) {
  if (spec.vertices.size() != 6 || spec.edges.size() != 6 || !spec.base.empty()) return std::nullopt;
  std::array<double, 6> lengths{};
  VertexId prev, cur = d.a;
  int hit = -1;
  for (int step = 0; step < 6; ++step) {
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < spec.edges.size(); ++i) {
      const auto &e = spec.edges[i];
      if ((e.a == cur && e.b != prev) || (e.b == cur && e.a != prev)) next.push_back(i);
    }
    if (next.empty()) return std::nullopt;
    const auto &e = spec.edges[next.front()];
    lengths[static_cast<std::size_t>(step)] = e.length;
    prev = cur;
    cur = e.a == cur ? e.b : e.a;
    if (cur == d.b) hit = step;
  }
  if (cur != d.a || hit != 2) return std::nullopt;
  return lengths;
}

int cmd_critical(const Options &o) {
  const LinkageFile file = load_valid(o);
  VertexPair diag;
  if (!o.diagonal.empty()) {
    const auto comma = o.diagonal.find(',');
    if (comma == std::string::npos) throw InputError("--diagonal expects A,B");
    diag = {o.diagonal.substr(0, comma), o.diagonal.substr(comma + 1)};
    if (!file.spec.has_vertex(diag.a) || !file.spec.has_vertex(diag.b))
      throw InputError("--diagonal names an unknown vertex");
  } else if (!file.spec.diagonals.empty()) {
    diag = file.spec.diagonals.front();
  } else {
    throw InputError("no marked diagonal; pass --diagonal A,B");
  }
  const double tol = o.tol.value_or(1e-5);
  std::ostringstream os;
  std::vector<double> listed;
  if (const auto chain = hexagon_chain(file.spec, diag)) {
    const auto report = hexagon_critical_values(*chain, HexagonLabeling::AsGiven);
    os << "formula values of |" << pair_name(diag.a, diag.b) << "|\n";
    os << "max " << fmt("%.10g", report.max_value) << "\nsaddles";
    for (double v : report.saddle_values) os << ' ' << fmt("%.10g", v);
    os << "\nmin " << fmt("%.10g", report.min_value) << '\n';
    for (const auto &w : report.warnings) os << "warning: " << w << '\n';
    listed = report.saddle_values;
    listed.push_back(report.max_value);
    listed.push_back(report.min_value);
  }
  const auto found = numeric_critical_values(file.spec, diag, o.seed, o.starts);
  os << "numeric critical values (" << o.starts << " starts)\n";
  os << "value,gradient_norm,index,multiplicity" << (listed.empty() ? "" : ",listed") << '\n';
  for (const auto &c : found) {
    os << fmt("%.10f", c.value) << ',' << fmt("%.3e", c.gradient_norm) << ',' << c.index << ',' << c.multiplicity;
    if (!listed.empty()) {
      bool match = false;
      for (double v : listed) match = match || std::abs(v - c.value) <= tol;
      os << ',' << (match ? "yes" : "no");
    }
    os << '\n';
  }
  emit(o, os.str());
  return 0;
}

int cmd_svg(const Options &o) {
  const LinkageFile file = load_valid(o);
  const ConstraintSystem system(pin(file.spec));
  const Realization r = random_feasible(system, derive_seed(o.seed, 0));
  emit(o, render_svg(file.spec, r.assignment));
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Planar linkages: Nambu fields, integrable systems, critical values"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("file", o.input, "linkage JSON file")->required();
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
  };
  auto add_out = [&](CLI::App *sub) { sub->add_option("--out", o.out, "output path (default stdout)"); };
  auto add_dt = [&](CLI::App *sub) {
    sub->add_option("--dt", o.dt, "integration step")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto add_t = [&](CLI::App *sub) { sub->add_option("--t", o.t, "flow time")->capture_default_str(); };
  auto add_tol = [&](CLI::App *sub) { sub->add_option("--tol", o.tol, "acceptance tolerance")->check(CLI::PositiveNumber); };

  struct Entry {
    CLI::App *app;
    int (*run)(const Options &);
  };
  std::vector<Entry> entries;

  auto *describe = app.add_subcommand("describe", "counts, pinning, redundancy, system type");
  add_common(describe);
  entries.push_back({describe, cmd_describe});

  auto *solve = app.add_subcommand("solve", "find a realization");
  add_common(solve);
  add_out(solve);
  entries.push_back({solve, cmd_solve});

  auto *field = app.add_subcommand("field", "evaluate the Nambu or lifted fields at a realization");
  add_common(field);
  add_out(field);
  entries.push_back({field, cmd_field});

  auto *flow = app.add_subcommand("flow", "integrate a field and write a trajectory CSV");
  add_common(flow);
  add_out(flow);
  add_dt(flow);
  add_t(flow);
  flow->add_option("--piece", o.piece, "piece whose lifted field to follow");
  entries.push_back({flow, cmd_flow});

  auto *commute = app.add_subcommand("commute", "commutation defect of every pair of fields");
  add_common(commute);
  add_out(commute);
  add_dt(commute);
  add_t(commute);
  add_tol(commute);
  commute->add_option("--s", o.s, "flow time of the first field")->capture_default_str();
  entries.push_back({commute, cmd_commute});

  auto *integrals = app.add_subcommand("integrals", "drift of the diagonal integrals along each field");
  add_common(integrals);
  add_out(integrals);
  add_dt(integrals);
  add_t(integrals);
  add_tol(integrals);
  entries.push_back({integrals, cmd_integrals});

  auto *critical = app.add_subcommand("critical", "critical values of a diagonal length");
  add_common(critical);
  add_out(critical);
  add_tol(critical);
  critical->add_option("--starts", o.starts, "random starts")->check(CLI::PositiveNumber)->capture_default_str();
  critical->add_option("--diagonal", o.diagonal, "vertex pair A,B (default: first marked diagonal)");
  entries.push_back({critical, cmd_critical});

  auto *svg = app.add_subcommand("svg", "draw a realization");
  add_common(svg);
  add_out(svg);
  entries.push_back({svg, cmd_svg});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto &entry : entries)
      if (entry.app->parsed()) return entry.run(o);
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
