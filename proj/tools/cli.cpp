#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <optional>

#include "ibq/admissibility.hpp"
#include "ibq/engine.hpp"
#include "ibq/local_oracle.hpp"
#include "ibq/net.hpp"
#include "ibq/rules.hpp"
#include "ibq/tableau.hpp"
#include "ibq/text.hpp"

namespace ibq::cli {
namespace {

constexpr const char* kProtocolHelp =
    "Oracle wire protocol (version 1): one request per line, one response per line.\n"
    "  HELLO                         -> OK type=<t> gamma=c:NAME,...,r:NAME,... logic=<profile>\n"
    "  CSAT <concept>                -> TRUE | FALSE | ERR <code> <message>\n"
    "  ASAT <a1>;<a2>;...            -> TRUE | FALSE | ERR <code> <message>\n"
    "  AENT <a1>;... ENTAILS <a|FALSUM>\n"
    "Error codes: BAD_SYNTAX, SIG_VIOLATION, NOT_CONNECTED, UNSUPPORTED.\n"
    "Exit codes: 0 sat/entailed/admissible, 1 unsat/not entailed, 2 inadmissible,\n"
    "3 unknown, 64 usage, 65 parse error, 70 internal error.";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A missing or unreadable input file is a usage error, not an internal one.
std::string read_input(const std::string& path) {
  try {
    return read_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

KnowledgeBase load_kb(const std::string& path) { return parse_kb(read_input(path)); }
Signature load_signature(const std::string& path) { return parse_signature(read_input(path)); }

// Common options of check-sat and entails.
struct ImportArgs {
  std::string visible, gamma, hidden, oracle, type = "auto", mode = "auto";
  bool assume_admissible = false, stats = false;

  void add(CLI::App* app) {
    app->add_option("--visible", visible, "visible knowledge base")->required();
    app->add_option("--gamma", gamma, "public signature file")->required();
    auto* h = app->add_option("--hidden", hidden, "hidden knowledge base (local oracle)");
    auto* o = app->add_option("--oracle", oracle, "remote oracle, tcp:HOST:PORT");
    h->excludes(o);
    app->add_option("--type", type, "local oracle type: auto|csat|asat|aent")
        ->check(CLI::IsMember({"auto", "csat", "asat", "aent"}));
    app->add_option("--mode", mode, "auto|alchiq-a|horn-e|el-e")
        ->check(CLI::IsMember({"auto", "alchiq-a", "horn-e", "el-e"}));
    app->add_flag("--assume-admissible", assume_admissible, "skip the admissibility checks");
    app->add_flag("--stats", stats, "print key=value statistics");
  }

  OracleHandle oracle_handle(const Signature& g) const {
    if (!oracle.empty()) return connect(parse_endpoint(oracle));
    if (hidden.empty()) throw UsageError("one of --hidden or --oracle is required");
    KnowledgeBase h = load_kb(hidden);
    OracleType t;
    if (type == "auto") {
      LogicProfile p = h.logic_declared ? h.logic : infer_profile(h);
      t = p.horn ? OracleType::Aent : OracleType::Asat;
    } else {
      t = parse_oracle_type(type);
    }
    return local_oracle(h, g, t);
  }

  std::optional<IbqMode> ibq_mode() const {
    if (mode == "auto") return std::nullopt;
    return parse_mode(mode);
  }

  IbqOptions options() const {
    IbqOptions o;
    o.assume_admissible = assume_admissible;
    return o;
  }
};

void print_stats(std::ostream& out, const IbqResult& r) {
  out << "mode=" << to_string(r.mode) << "\n"
      << "queries=" << r.queries.queries << "\n"
      << "distinct_queries=" << r.queries.distinct << "\n"
      << "max_query_size=" << r.queries.max_query_size << "\n"
      << "branches=" << r.stats.branches << "\n"
      << "rule_apps=" << r.stats.rule_apps << "\n"
      << "max_individuals=" << r.stats.max_individuals << "\n";
}

int report_inadmissible(const Inadmissible& e, std::ostream& out, std::ostream& err) {
  err << "ibq: " << e.what() << "\n";
  if (e.result.cycle && !e.result.cycle->acyclic) out << render(*e.result.cycle);
  return e.result.verdict == Verdict::Unknown ? kUnknown : kInadmissible;
}

int cmd_check_sat(const ImportArgs& a, std::ostream& out, std::ostream& err) {
  KnowledgeBase v = load_kb(a.visible);
  Signature g = load_signature(a.gamma);
  OracleHandle o = a.oracle_handle(g);
  try {
    IbqResult r = import_check_sat(v, g, o, a.ibq_mode(), a.options());
    out << (r.sat ? "SAT" : "UNSAT") << "\n";
    if (a.stats) print_stats(out, r);
    return r.sat ? kOk : kNegative;
  } catch (const Inadmissible& e) {
    return report_inadmissible(e, out, err);
  }
}

int cmd_entails(const ImportArgs& a, const std::string& query, std::ostream& out, std::ostream& err) {
  auto pos = query.find(" sub ");
  if (pos == std::string::npos) throw UsageError("--query must have the form \"C sub D\"");
  Concept sub = parse_concept(query.substr(0, pos));
  Concept sup = parse_concept(query.substr(pos + 5));
  KnowledgeBase v = load_kb(a.visible);
  Signature g = load_signature(a.gamma);
  OracleHandle o = a.oracle_handle(g);
  try {
    IbqResult r;
    bool yes = import_entails(v, g, o, sub, sup, a.ibq_mode(), a.options(), &r);
    out << (yes ? "ENTAILED" : "NOT ENTAILED") << "\n";
    if (a.stats) print_stats(out, r);
    return yes ? kOk : kNegative;
  } catch (const Inadmissible& e) {
    return report_inadmissible(e, out, err);
  }
}

int cmd_direct_sat(const std::vector<std::string>& files, bool dump_leaf, std::ostream& out) {
  KnowledgeBase kb;
  for (auto& f : files) {
    KnowledgeBase part = load_kb(f);
    kb.tbox.insert(kb.tbox.end(), part.tbox.begin(), part.tbox.end());
    kb.abox.insert(kb.abox.end(), part.abox.begin(), part.abox.end());
    kb.nominals.insert(kb.nominals.end(), part.nominals.begin(), part.nominals.end());
  }
  SatResult r = check_sat_kb(kb);
  out << (r.sat ? "SAT" : "UNSAT") << "\n"
      << "rule_apps=" << r.stats.rule_apps << "\n"
      << "branches=" << r.stats.branches << "\n"
      << "max_individuals=" << r.stats.max_individuals << "\n";
  if (r.sat) out << "leaf_assertions=" << r.leaf.size() << "\n";
  if (r.sat && dump_leaf) out << render_canonical(r.leaf, "\n") << "\n";
  return r.sat ? kOk : kNegative;
}

int cmd_check_admissible(const std::string& visible, const std::string& gamma, const std::string& hidden_logic,
                         const std::string& mode, std::ostream& out) {
  KnowledgeBase v = load_kb(visible);
  Signature g = load_signature(gamma);
  LogicProfile hidden = LogicProfile::parse(hidden_logic);
  ModalRewrite rw = gamma_modal_rewrite(v, g);
  bool el = mode == "el";
  Clausified c = el ? clausify_el(rw.kb) : clausify_alchiq(rw.kb);
  AdmissibilityResult r =
      check_admissible(c.rules, c.abox, rw.gamma, hidden, el ? IbqMode::ElOmegaE : IbqMode::AlchiqOmegaA);
  out << render(r.safety, c.rules);
  if (r.cycle) out << render(*r.cycle);
  out << "verdict: " << to_string(r.verdict);
  if (!r.reason.empty()) out << " (" << r.reason << ")";
  out << "\n";
  switch (r.verdict) {
    case Verdict::Admissible: return kOk;
    case Verdict::Inadmissible: return kInadmissible;
    case Verdict::Unknown: return kUnknown;
  }
  return kInternal;
}

int cmd_clausify(const std::string& file, bool el, bool abox, std::ostream& out) {
  KnowledgeBase kb = load_kb(file);
  Clausified c = el ? clausify_el(kb) : clausify_alchiq(kb);
  out << render(c.rules);
  if (abox)
    for (auto& as : c.abox) out << render(as) << "\n";
  return kOk;
}

int cmd_serve(const std::string& hidden, const std::string& gamma, const std::string& type, const std::string& listen,
              std::size_t max_line, std::ostream& out) {
  OracleHandle o = local_oracle(load_kb(hidden), load_signature(gamma), parse_oracle_type(type));
  auto server = serve(o, parse_endpoint(listen), max_line);
  out << "listening on port " << server->port() << std::endl;
  server->wait();
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Import-by-query reasoning over a visible knowledge base and a hidden oracle", "ibq"};
  app.footer(kProtocolHelp);
  app.require_subcommand(1);

  ImportArgs check_args;
  auto* check = app.add_subcommand("check-sat", "satisfiability of visible KB plus hidden TBox via the oracle");
  check_args.add(check);

  ImportArgs ent_args;
  std::string query;
  auto* ent = app.add_subcommand("entails", "entailment of \"C sub D\" by visible KB plus hidden TBox");
  ent_args.add(ent);
  ent->add_option("--query", query, "\"C sub D\"")->required();

  std::vector<std::string> kbs;
  bool dump_leaf = false;
  auto* direct = app.add_subcommand("direct-sat", "hypertableau satisfiability of the union of the given KBs");
  direct->add_option("--kb", kbs, "knowledge base file (repeatable)")->required();
  direct->add_flag("--dump-leaf", dump_leaf, "print the clash-free leaf ABox");

  std::string adm_visible, adm_gamma, adm_logic = "alchiq", adm_mode = "ht";
  auto* adm = app.add_subcommand("check-admissible", "HT/EL-safety and acyclicity report");
  adm->add_option("--visible", adm_visible, "visible knowledge base")->required();
  adm->add_option("--gamma", adm_gamma, "public signature file")->required();
  adm->add_option("--hidden-logic", adm_logic, "logic profile of the hidden TBox (default alchiq)");
  adm->add_option("--mode", adm_mode, "ht|el")->check(CLI::IsMember({"ht", "el"}));

  std::string cl_kb;
  bool cl_el = false, cl_abox = false;
  auto* cl = app.add_subcommand("clausify", "print the HT-rules of a knowledge base");
  cl->add_option("--kb", cl_kb, "knowledge base file")->required();
  cl->add_flag("--el", cl_el, "use the EL-rule clausification");
  cl->add_flag("--abox", cl_abox, "also print the normalized ABox");

  std::string sv_hidden, sv_gamma, sv_type, sv_listen;
  std::size_t sv_max = kDefaultMaxLineBytes;
  auto* sv = app.add_subcommand("serve", "expose a hidden TBox as an oracle over TCP");
  sv->add_option("--hidden", sv_hidden, "hidden knowledge base")->required();
  sv->add_option("--gamma", sv_gamma, "public signature file")->required();
  sv->add_option("--type", sv_type, "csat|asat|aent")->required()->check(CLI::IsMember({"csat", "asat", "aent"}));
  sv->add_option("--listen", sv_listen, "HOST:PORT (port 0 picks a free port)")->required();
  sv->add_option("--max-line-bytes", sv_max, "longest accepted request line");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check_sat(check_args, out, err);
    if (*ent) return cmd_entails(ent_args, query, out, err);
    if (*direct) return cmd_direct_sat(kbs, dump_leaf, out);
    if (*adm) return cmd_check_admissible(adm_visible, adm_gamma, adm_logic, adm_mode, out);
    if (*cl) return cmd_clausify(cl_kb, cl_el, cl_abox, out);
    if (*sv) return cmd_serve(sv_hidden, sv_gamma, sv_type, sv_listen, sv_max, out);
  } catch (const UsageError& e) {
    err << "ibq: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "ibq: " << e.what() << "\n";
    return kUsage;
  } catch (const BadSyntax& e) {
    err << "ibq: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const DuplicateDeclaration& e) {
    err << "ibq: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const UnsupportedConstruct& e) {
    err << "ibq: unsupported input: " << e.what() << "\n";
    return kParse;
  } catch (const NoViableMode& e) {
    err << "ibq: " << e.what() << "\n";
    return kUnknown;
  } catch (const NoReduction& e) {
    err << "ibq: " << e.what() << "\n";
    return kUnknown;
  } catch (const std::exception& e) {
    err << "ibq: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace ibq::cli
