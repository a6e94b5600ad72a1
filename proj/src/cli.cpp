#include "dtcausal/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "dtcausal/augment.hpp"
#include "dtcausal/decision.hpp"
#include "dtcausal/dsep.hpp"
#include "dtcausal/dsl.hpp"
#include "dtcausal/eci.hpp"
#include "dtcausal/error.hpp"
#include "dtcausal/model_io.hpp"
#include "dtcausal/oracle.hpp"
#include "dtcausal/study.hpp"

namespace dtc {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw Error(std::string(flag) + " expects NAME=VALUE, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Json dag_json(const Dag& dag, const std::string& name) {
  Json j;
  j["name"] = name;
  std::vector<const Node*> nodes;
  for (const auto& n : dag.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) { return a->name < b->name; });
  Json ns = Json::array();
  for (const Node* n : nodes) {
    Json o;
    o["name"] = n->name;
    o["kind"] = n->is_regime() ? "regime" : "stochastic";
    if (n->is_regime()) {
      o["target"] = n->target;
    } else {
      o["latent"] = n->latent;
      o["deterministic"] = n->deterministic;
      o["states"] = n->states;
    }
    ns.push_back(std::move(o));
  }
  j["nodes"] = std::move(ns);
  std::vector<Edge> edges = dag.edges();
  std::sort(edges.begin(), edges.end());
  Json es = Json::array();
  for (const auto& e : edges) es.push_back(Json{{"from", e.from}, {"to", e.to}, {"dashed", e.dashed}});
  j["edges"] = std::move(es);
  return j;
}

Json load_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(path + ": " + e.what());
  }
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;

  void emit(const Json& j) const { out << j.dump(2) << '\n'; }
};

// Each command registers its options and returns the action to run.
using Command = std::function<int(const Context&)>;

Command add_dsep(CLI::App& app) {
  auto* sub = app.add_subcommand("dsep", "Decide a statement on a graph by d-separation");
  auto file = std::make_shared<std::string>();
  auto query = std::make_shared<std::string>();
  auto paths = std::make_shared<bool>(false);
  sub->add_option("file", *file, ".cadt graph file")->required();
  sub->add_option("--query,-q", *query, "statement, e.g. \"Y _||_ F_T | T\"; default: the file's statements");
  sub->add_flag("--paths", *paths, "use path blocking instead of moralisation");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const GraphDoc doc = load_graph_doc(*file);
    auto decide = [&](const EciStatement& s) { return *paths ? d_separated_paths(doc.dag, s) : d_separated(doc.dag, s); };
    if (!query->empty()) {
      const EciStatement s = parse_statement(*query);
      const bool holds = decide(s);
      if (c.json)
        c.emit(Json{{"statement", format_statement(s)}, {"holds", holds}});
      else
        c.out << (holds ? "holds" : "does not hold") << ": " << format_statement(s) << '\n';
      return holds ? kExitOk : kExitFails;
    }
    if (doc.statements.empty()) throw Error("no --query given and the file has no statements");
    bool all = true;
    Json list = Json::array();
    for (const auto& [name, s] : doc.statements) {
      const bool holds = decide(s);
      all = all && holds;
      if (c.json)
        list.push_back(Json{{"name", name}, {"statement", format_statement(s)}, {"holds", holds}});
      else
        c.out << name << ": " << format_statement(s) << ": " << (holds ? "holds" : "does not hold") << '\n';
    }
    if (c.json) c.emit(Json{{"statements", list}, {"all_hold", all}});
    return all ? kExitOk : kExitFails;
  };
}

Command add_derive(CLI::App& app) {
  auto* sub = app.add_subcommand("derive", "Derive a statement from premises with the semigraphoid axioms");
  auto file = std::make_shared<std::string>();
  auto target = std::make_shared<std::string>();
  auto opts = std::make_shared<ClosureOptions>();
  sub->add_option("premises", *file, ".eci premise file")->required();
  sub->add_option("--target,-t", *target, "statement to derive")->required();
  sub->add_flag("--regimes-stochastic", opts->regimes_as_stochastic,
                "treat regime indicators as random variables");
  sub->add_option("--max-statements", opts->max_statements, "closure size limit");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const PremiseFile pf = load_premises(*file);
    const EciStatement t = parse_statement(*target);
    auto all = pf.premises;
    all.push_back(t);
    const Universe u = Universe::from_statements(all, pf.regimes);
    const Derivation d = derivable(pf.premises, t, u, *opts);
    if (c.json) {
      Json steps = Json::array();
      if (d.trace) {
        for (std::size_t i = 0; i < d.trace->steps.size(); ++i) {
          const auto& s = d.trace->steps[i];
          Json inputs = Json::array();
          for (auto in : s.inputs) inputs.push_back(in + 1);
          steps.push_back(Json{{"step", i + 1},
                               {"rule", axiom_name(s.axiom)},
                               {"side", s.side == Side::Left ? "left" : "right"},
                               {"inputs", inputs},
                               {"statement", format_statement(s.output)}});
        }
      }
      c.emit(Json{{"target", format_statement(t)}, {"derived", d.derived}, {"trace", steps}});
    } else if (d.derived) {
      c.out << "derived: " << format_statement(t) << '\n' << format_trace(*d.trace);
    } else {
      c.out << "not derivable by this engine: " << format_statement(t) << '\n';
    }
    return d.derived ? kExitOk : kExitUndecided;
  };
}

void print_graph(const Context& c, const Dag& dag, const std::string& name) {
  if (c.json)
    c.emit(dag_json(dag, name));
  else
    c.out << format_dag(dag, name);
}

Command add_augment(CLI::App& app) {
  auto* sub = app.add_subcommand("augment", "Build the augmented (or ITT) DAG for the file's plan");
  auto file = std::make_shared<std::string>();
  auto name = std::make_shared<std::string>();
  auto itt = std::make_shared<bool>(false);
  sub->add_option("file", *file, ".cadt graph file with a plan")->required();
  sub->add_flag("--itt", *itt, "emit the node-split ITT DAG");
  sub->add_option("--name", *name, "name of the output graph");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const GraphDoc doc = load_graph_doc(*file);
    if (!doc.plan) throw Error(*file + " has no plan");
    const Dag g = *itt ? build_itt_dag(doc.dag, *doc.plan) : build_augmented_dag(doc.dag, *doc.plan);
    print_graph(c, g, name->empty() ? doc.name : *name);
    return kExitOk;
  };
}

Command add_project(CLI::App& app) {
  auto* sub = app.add_subcommand("project", "Eliminate nodes while keeping the separations among the rest");
  auto file = std::make_shared<std::string>();
  auto name = std::make_shared<std::string>();
  auto drop = std::make_shared<std::vector<std::string>>();
  sub->add_option("file", *file, ".cadt graph file")->required();
  sub->add_option("--drop", *drop, "comma-separated nodes to eliminate")->required()->delimiter(',');
  sub->add_option("--name", *name, "name of the output graph");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const GraphDoc doc = load_graph_doc(*file);
    const NodeSet d(drop->begin(), drop->end());
    for (const auto& n : d) doc.dag.node(n);
    Dag g;
    try {
      g = eliminate_nodes(doc.dag, d);
    } catch (const GraphError& e) {
      c.err << "error: " << e.what() << '\n';
      return kExitFails;
    }
    print_graph(c, g, name->empty() ? doc.name : *name);
    return kExitOk;
  };
}

Command add_verify(CLI::App& app) {
  auto* sub = app.add_subcommand("verify", "Check a property numerically on a model");
  auto file = std::make_shared<std::string>();
  auto check = std::make_shared<std::vector<std::string>>();
  auto y = std::make_shared<std::string>();
  auto action = std::make_shared<std::string>();
  auto vars = std::make_shared<std::vector<std::string>>();
  auto tol = std::make_shared<Tolerance>();
  sub->add_option("model", *file, "JSON model file")->required();
  sub->add_option("--check", *check,
                  "eci STMT | consistency | ignorability | sufficient-covariate X")
      ->required()
      ->expected(1, 2);
  sub->add_option("--y", *y, "response variable");
  sub->add_option("--action", *action, "intervention target (default: the only regime's target)");
  sub->add_option("--vars", *vars, "variables for the consistency check")->delimiter(',');
  sub->add_option("--tol", tol->tv, "total-variation tolerance");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const MultiRegimeModel m = load_model(*file);
    const std::string kind = check->front();
    const std::string arg = check->size() > 1 ? (*check)[1] : "";
    auto act = [&] {
      if (!action->empty()) return *action;
      if (m.regimes().size() != 1) throw Error("--action is required when the model has several regimes");
      return m.dag().node(m.regimes().front()).target;
    };
    auto need_y = [&] {
      if (y->empty()) throw Error("--y is required for this check");
      return *y;
    };
    bool holds = false;
    std::string what;
    if (kind == "eci") {
      if (arg.empty()) throw Error("--check eci needs a statement");
      const EciStatement s = parse_statement(arg);
      holds = eci_holds(m, s, *tol);
      what = format_statement(s);
    } else if (kind == "consistency") {
      const std::string a = act();
      NodeSet v(vars->begin(), vars->end());
      if (v.empty()) {
        const std::string itt = m.itt_of(m.regime_of(a));
        for (const auto& x : m.variables())
          if (x != a && x != itt) v.insert(x);
      }
      holds = check_distributional_consistency(m, v, a, *tol);
      what = "distributional consistency for " + a;
    } else if (kind == "ignorability") {
      const std::string a = act();
      holds = check_ignorability(m, need_y(), a, *tol);
      what = "ignorability of " + a + " for " + *y;
    } else if (kind == "sufficient-covariate") {
      if (arg.empty()) throw Error("--check sufficient-covariate needs a covariate");
      const std::string a = act();
      holds = check_sufficient_covariate(m, arg, need_y(), a, *tol);
      what = arg + " sufficient covariate for " + a + " on " + *y;
    } else {
      throw Error("unknown check '" + kind + "'");
    }
    if (c.json)
      c.emit(Json{{"check", kind}, {"subject", what}, {"holds", holds}});
    else
      c.out << (holds ? "holds" : "does not hold") << ": " << what << '\n';
    return holds ? kExitOk : kExitFails;
  };
}

Command add_identify(CLI::App& app) {
  auto* sub = app.add_subcommand("identify", "Two-stage g-computation identification check");
  auto file = std::make_shared<std::string>();
  auto names = std::make_shared<std::array<std::string, 4>>();
  sub->add_option("file", *file, ".cadt observational graph")->required();
  sub->add_option("--y", (*names)[0], "response")->required();
  sub->add_option("--x0", (*names)[1], "first action")->required();
  sub->add_option("--x1", (*names)[2], "second action")->required();
  sub->add_option("--z", (*names)[3], "intermediate variable")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const GraphDoc doc = load_graph_doc(*file);
    const auto& n = *names;
    const IdentificationResult r = identify_two_stage(doc.dag, n[1], n[2], n[3], n[0]);
    if (c.json) {
      Json checks = Json::array();
      for (const auto& k : r.checks)
        checks.push_back(Json{{"label", k.label},
                              {"rule", k.rule == Rule::Rule2 ? 2 : 3},
                              {"remove_incoming", std::vector<std::string>(k.remove_incoming.begin(), k.remove_incoming.end())},
                              {"remove_outgoing", std::vector<std::string>(k.remove_outgoing.begin(), k.remove_outgoing.end())},
                              {"statement", format_statement(k.statement)},
                              {"holds", k.holds}});
      c.emit(Json{{"identified", r.identified}, {"estimand", r.estimand}, {"checks", checks}});
    } else {
      c.out << r.report();
    }
    return r.identified ? kExitOk : kExitFails;
  };
}

Command add_gformula(CLI::App& app) {
  auto* sub = app.add_subcommand("gformula", "Evaluate sum_z p(y | x1, z) p(z | x0) from observational data");
  auto file = std::make_shared<std::string>();
  auto args = std::make_shared<std::array<std::string, 4>>();
  auto compare = std::make_shared<bool>(false);
  sub->add_option("model", *file, "JSON model file")->required();
  sub->add_option("--y", (*args)[0], "Y=VALUE")->required();
  sub->add_option("--x0", (*args)[1], "X0=VALUE")->required();
  sub->add_option("--x1", (*args)[2], "X1=VALUE")->required();
  sub->add_option("--z", (*args)[3], "intermediate variable")->required();
  sub->add_flag("--compare", *compare, "also compute the interventional probability");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const MultiRegimeModel m = load_model(*file);
    GFormulaQuery q;
    std::tie(q.y, q.y_value) = split_assignment((*args)[0], "--y");
    std::tie(q.x0, q.x0_value) = split_assignment((*args)[1], "--x0");
    std::tie(q.x1, q.x1_value) = split_assignment((*args)[2], "--x1");
    q.z = (*args)[3];
    const double g = gformula_eval(m, q);
    Json j{{"gformula", g}};
    if (!c.json) c.out << "g-formula: " << num(g) << '\n';
    if (*compare) {
      const RegimeAssignment a{{m.regime_of(q.x0), RegimeValue::set(q.x0_value)},
                               {m.regime_of(q.x1), RegimeValue::set(q.x1_value)}};
      const double p = interventional_query(m, q.y, a)[m.state_index(q.y, q.y_value)];
      j["interventional"] = p;
      if (!c.json) c.out << "interventional: " << num(p) << '\n';
    }
    if (c.json) c.emit(j);
    return kExitOk;
  };
}

Command add_ace(CLI::App& app) {
  auto* sub = app.add_subcommand("ace", "Average causal effect from a model or decision problem");
  auto file = std::make_shared<std::string>();
  auto y = std::make_shared<std::string>();
  auto action = std::make_shared<std::string>();
  auto treated = std::make_shared<std::string>("1");
  auto control = std::make_shared<std::string>("0");
  sub->add_option("file", *file, "JSON model or decision problem")->required();
  sub->add_option("--y", *y, "response variable (models)");
  sub->add_option("--action", *action, "intervention target (models)");
  sub->add_option("--treated", *treated, "treated action (problems)");
  sub->add_option("--control", *control, "control action (problems)");
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const Json doc = load_json(*file);
    double value = 0;
    if (doc.contains("actions")) {
      const DecisionProblem p = problem_from_json(doc);
      for (const auto& a : {*treated, *control})
        if (!p.hypothetical.count(a)) throw Error("unknown action '" + a + "'");
      value = ace(p.hypothetical.at(*treated), p.hypothetical.at(*control));
    } else {
      const MultiRegimeModel m = model_from_json(doc);
      if (y->empty()) throw Error("--y is required for models");
      std::string a = *action;
      if (a.empty()) {
        if (m.regimes().size() != 1) throw Error("--action is required when the model has several regimes");
        a = m.dag().node(m.regimes().front()).target;
      }
      value = model_ace(m, *y, a);
    }
    if (c.json)
      c.emit(Json{{"ace", value}});
    else
      c.out << "ace: " << num(value) << '\n';
    return kExitOk;
  };
}

Command add_ett(CLI::App& app) {
  auto* sub = app.add_subcommand("ett", "Effect of treatment on the treated for a model");
  auto file = std::make_shared<std::string>();
  auto y = std::make_shared<std::string>();
  auto action = std::make_shared<std::string>();
  sub->add_option("model", *file, "JSON model file")->required();
  sub->add_option("--y", *y, "response variable")->required();
  sub->add_option("--action", *action, "intervention target")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const double v = ett(load_model(*file), *y, *action);
    if (c.json)
      c.emit(Json{{"ett", v}});
    else
      c.out << "ett: " << num(v) << '\n';
    return kExitOk;
  };
}

Command add_lognormal(CLI::App& app) {
  auto* sub = app.add_subcommand("lognormal", "Effect measures for a lognormal response");
  auto np = std::make_shared<NormalPair>();
  sub->add_option("--mu1", np->mu1, "log-scale mean under treatment")->required();
  sub->add_option("--mu0", np->mu0, "log-scale mean under control")->required();
  sub->add_option("--sigma2", np->sigma2, "log-scale variance")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const LognormalEffects e = lognormal_effects(*np);
    if (c.json) {
      c.emit(Json{{"ace_y", e.ace_y}, {"ace_z", e.ace_z}, {"ratio", e.ratio}, {"var_z_1", e.var_z_1}, {"var_z_0", e.var_z_0}});
    } else {
      c.out << "ace_y: " << num(e.ace_y) << "\nace_z: " << num(e.ace_z) << "\nratio: " << num(e.ratio)
            << "\nvar_z_1: " << num(e.var_z_1) << "\nvar_z_0: " << num(e.var_z_0) << '\n';
    }
    return kExitOk;
  };
}

Command add_simulate(CLI::App& app) {
  auto* sub = app.add_subcommand("simulate", "Simulate an observational study");
  auto file = std::make_shared<std::string>();
  auto n = std::make_shared<std::size_t>(0);
  auto seed = std::make_shared<std::uint64_t>(0);
  sub->add_option("spec", *file, "JSON study spec")->required();
  sub->add_option("--n", *n, "number of units")->required();
  sub->add_option("--seed", *seed, "random seed")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const StudyResult r = simulate_study(study_from_json(load_json(*file)), *n, *seed);
    auto arm = [](const ArmSummary& a) {
      Json j{{"count", a.count}};
      j["mean"] = a.mean ? Json(*a.mean) : Json(nullptr);
      j["standard_error"] = a.standard_error ? Json(*a.standard_error) : Json(nullptr);
      return j;
    };
    if (c.json) {
      c.emit(Json{{"n", r.n},
                  {"treated", arm(r.treated)},
                  {"control", arm(r.control)},
                  {"interventional_mean_1", r.interventional_mean_1},
                  {"interventional_mean_0", r.interventional_mean_0},
                  {"observational_mean_1", r.observational_mean_1},
                  {"observational_mean_0", r.observational_mean_0}});
      return kExitOk;
    }
    auto line = [&](const char* label, const ArmSummary& a) {
      c.out << label << ": n=" << a.count;
      if (a.mean) c.out << " mean=" << num(*a.mean);
      else c.out << " mean=absent";
      if (a.standard_error) c.out << " se=" << num(*a.standard_error);
      c.out << '\n';
    };
    line("treated", r.treated);
    line("control", r.control);
    c.out << "interventional mean (t=1): " << num(r.interventional_mean_1) << '\n'
          << "interventional mean (t=0): " << num(r.interventional_mean_0) << '\n';
    return kExitOk;
  };
}

Command add_solve(CLI::App& app) {
  auto* sub = app.add_subcommand("solve", "Expected losses and the optimal action of a decision problem");
  auto file = std::make_shared<std::string>();
  sub->add_option("problem", *file, "JSON decision problem")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const Solution s = solve(problem_from_json(load_json(*file)));
    if (c.json) {
      Json losses = Json::object();
      for (const auto& [a, l] : s.expected_loss) losses[a] = l;
      c.emit(Json{{"expected_loss", losses}, {"optimal", s.optimal}, {"optimal_set", s.optimal_set}});
    } else {
      for (const auto& [a, l] : s.expected_loss) c.out << "L(" << a << ") = " << num(l) << '\n';
      c.out << "optimal: " << s.optimal << '\n';
    }
    return kExitOk;
  };
}

Command add_render(CLI::App& app) {
  auto* sub = app.add_subcommand("render", "Write a graph as Graphviz DOT");
  auto file = std::make_shared<std::string>();
  auto dot = std::make_shared<std::string>();
  sub->add_option("file", *file, ".cadt graph file")->required();
  sub->add_option("--dot", *dot, "output path, '-' for standard output")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const GraphDoc doc = load_graph_doc(*file);
    const std::string text = to_dot(doc.dag, doc.name);
    if (*dot == "-") {
      c.out << text;
    } else {
      std::ofstream f(*dot);
      if (!f) throw Error("cannot write '" + *dot + "'");
      f << text;
    }
    return kExitOk;
  };
}

Command add_print(CLI::App& app) {
  auto* sub = app.add_subcommand("print", "Print a graph file in canonical form");
  auto file = std::make_shared<std::string>();
  sub->add_option("file", *file, ".cadt graph file")->required();
  return [=, sub = sub](const Context& c) -> int {
    if (!sub->parsed()) return -1;
    const GraphDoc doc = load_graph_doc(*file);
    if (c.json)
      c.emit(dag_json(doc.dag, doc.name));
    else
      c.out << format_graph_doc(doc);
    return kExitOk;
  };
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-theoretic causal reasoning over augmented DAGs", "cadt"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "machine-readable output");

  std::vector<Command> commands{add_dsep(app),     add_derive(app),   add_augment(app), add_project(app),
                                add_verify(app),   add_identify(app), add_gformula(app), add_ace(app),
                                add_ett(app),      add_lognormal(app), add_simulate(app), add_solve(app),
                                add_render(app),   add_print(app)};
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Context ctx{out, err, json};
  try {
    for (const auto& cmd : commands)
      if (int code = cmd(ctx); code >= 0) return code;
  } catch (const PositivityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUndecided;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!e.expected().empty()) {
      err << "expected:";
      for (const auto& t : e.expected()) err << ' ' << t;
      err << '\n';
    }
    return kExitUsage;
  } catch (const StatementError& e) {
    err << "error: " << e.what();
    if (e.column()) err << " (column " << e.column() << ")";
    err << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dtc
