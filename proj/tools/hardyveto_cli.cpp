// Command-line front end. Talks to the library through the C interface only.
#include <hardyveto/hardyveto.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAbort = 3;

struct CliError {
  hv_status status;
  std::string message;
};

void check(hv_status status) {
  if (status != HV_OK) throw CliError{status, hv_last_error()};
}

int exit_code_for(hv_status status) {
  switch (status) {
    case HV_ERR_INVALID_ARGUMENT:
    case HV_ERR_DIMENSION_MISMATCH:
    case HV_ERR_DEGENERATE_OBSERVABLES:
    case HV_ERR_TOO_LARGE:
    case HV_ERR_INSUFFICIENT_RUNS:
    case HV_ERR_PARSE:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

struct StateDeleter {
  void operator()(hv_state* s) const { hv_state_free(s); }
};
struct ObsDeleter {
  void operator()(hv_observables* o) const { hv_observables_free(o); }
};
struct SimDeleter {
  void operator()(hv_simulation* s) const { hv_simulation_free(s); }
};
using StatePtr = std::unique_ptr<hv_state, StateDeleter>;
using ObsPtr = std::unique_ptr<hv_observables, ObsDeleter>;
using SimPtr = std::unique_ptr<hv_simulation, SimDeleter>;

// Takes ownership of a library string.
Json take_json(char* raw) {
  std::unique_ptr<char, void (*)(char*)> guard(raw, hv_string_free);
  return Json::parse(raw);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_value(const Json& v) {
  if (v.is_string()) return csv_field(v.get<std::string>());
  if (v.is_null()) return "";
  return v.dump();
}

hv_variant variant_from(const std::string& name) {
  return name == "conventional" ? HV_VARIANT_CONVENTIONAL : HV_VARIANT_MODIFIED;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError{HV_ERR_INVALID_ARGUMENT, "bad number in list: '" + item + "'"};
    }
  }
  return out;
}

void write_file(const Json& doc, const std::string& json_path) {
  if (json_path.empty()) return;
  std::ofstream out(json_path);
  if (!out) throw CliError{HV_ERR_INVALID_ARGUMENT, "cannot write " + json_path};
  out << doc.dump(2) << '\n';
}

// JSON goes to stdout unless --csv was given; --json always writes the file.
void emit(const Json& doc, const std::string& json_path, bool csv) {
  write_file(doc, json_path);
  if (!csv) std::cout << doc.dump(2) << '\n';
}

void emit_state_csv(const Json& state) {
  std::cout << "index,re,im\n";
  std::size_t i = 0;
  for (const auto& a : state.at("amps")) std::cout << i++ << ',' << a[0].dump() << ',' << a[1].dump() << '\n';
}

void emit_conditions_csv(const Json& conditions) {
  std::cout << "label,value,must_vanish,pass\n";
  for (const auto& c : conditions) {
    std::cout << csv_field(c.at("label").get<std::string>()) << ',' << c.at("value").dump() << ','
              << c.at("must_vanish").dump() << ',' << c.at("pass").dump() << '\n';
  }
}

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HARDY_VETO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CliError{HV_ERR_INVALID_ARGUMENT, "HARDY_VETO_SEED is not an unsigned integer"};
    }
  }
  return 0;
}

struct ProtocolFlags {
  std::optional<int> n;
  std::uint64_t rounds = 1'000'000;
  double p_test = 0.1;
  std::uint64_t list_length = 0;
  std::uint64_t tau_plus = 0;
  std::uint64_t tau_minus = 0;
  double noise = 0.0;
  std::optional<std::uint64_t> seed;
  std::string ratio_mode = "born";
  double tolerance = 0.01;

  void add_to(CLI::App* app) {
    app->add_option("--n", n, "jury size")->check(CLI::Range(2, 10));
    app->add_option("--rounds", rounds, "total rounds M");
    app->add_option("--p-test", p_test, "fraction of test rounds")->check(CLI::Range(0.0, 1.0));
    app->add_option("--list-length", list_length, "reduced list length L (0: default)");
    app->add_option("--tau-plus", tau_plus, "all-(+1) threshold (0: default)");
    app->add_option("--tau-minus", tau_minus, "all-(-1) threshold (0: default)");
    app->add_option("--noise", noise, "depolarizing strength")->check(CLI::Range(0.0, 1.0));
    app->add_option("--seed", seed, "RNG seed (default $HARDY_VETO_SEED or 0)");
    app->add_option("--ratio-mode", ratio_mode, "sift target")->check(CLI::IsMember({"born", "paper"}));
    app->add_option("--tolerance", tolerance, "test-round tolerance for zero conditions");
  }

  hv_protocol_params params(int jury) const {
    hv_protocol_params p;
    hv_protocol_params_default(&p);
    p.n = jury;
    p.rounds = rounds;
    p.p_test = p_test;
    p.list_length = list_length;
    p.tau_plus = tau_plus;
    p.tau_minus = tau_minus;
    p.noise = noise;
    p.seed = seed_or_env(seed);
    p.ratio_mode = ratio_mode == "paper" ? HV_RATIO_PAPER_STATED : HV_RATIO_BORN_DERIVED;
    p.test_tolerance = tolerance;
    return p;
  }

  int jury_for(const std::string& votes) const {
    const int len = static_cast<int>(votes.size());
    if (n && *n != len) {
      throw CliError{HV_ERR_INVALID_ARGUMENT,
                     "--n " + std::to_string(*n) + " does not match " + std::to_string(len) + " votes"};
    }
    return len;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-paradox states, nonlocality bounds and an anonymous veto simulator"};
  app.require_subcommand(1);
  bool csv = false;
  std::string json_path;
  app.add_flag("--csv", csv, "print tables as CSV");

  auto* state_cmd = app.add_subcommand("state", "build a veto or Hardy state");
  bool veto = false;
  int state_n = 3;
  std::optional<int> qubits;
  std::string alpha_text;
  std::string variant = "modified";
  const auto variant_check = CLI::IsMember({"modified", "conventional"});
  state_cmd->add_flag("--veto", veto, "the protocol state for N parties");
  state_cmd->add_option("--n", state_n, "parties for --veto")->check(CLI::Range(2, 12));
  state_cmd->add_option("--qubits", qubits, "Hardy state on this many qubits")->check(CLI::Range(2, 12));
  state_cmd->add_option("--alpha", alpha_text, "comma-separated |alpha| per qubit");
  state_cmd->add_option("--variant", variant)->check(variant_check);
  state_cmd->add_option("--json", json_path, "also write JSON here");
  state_cmd->add_flag("--csv", csv, "print amplitudes as CSV");

  auto* verify_cmd = app.add_subcommand("verify", "check the Hardy conditions of a stored state");
  std::string state_path;
  verify_cmd->add_option("--state", state_path, "state JSON file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--alpha", alpha_text, "comma-separated |alpha| per qubit (default: sigma_z / -sigma_x)");
  verify_cmd->add_option("--variant", variant)->check(variant_check);
  verify_cmd->add_option("--json", json_path, "also write JSON here");
  verify_cmd->add_flag("--csv", csv, "print condition values as CSV");

  auto* bound_cmd = app.add_subcommand("bound", "LHV and no-signaling maxima of q");
  int bound_n = 3;
  int bound_d = 2;
  bound_cmd->add_option("--n", bound_n, "parties")->check(CLI::Range(2, 6));
  bound_cmd->add_option("--d", bound_d, "outcomes per measurement")->check(CLI::Range(2, 6));
  bound_cmd->add_option("--variant", variant)->check(variant_check);
  bound_cmd->add_option("--json", json_path, "also write JSON here");
  bound_cmd->add_flag("--csv", csv, "print as CSV");

  auto* sim_cmd = app.add_subcommand("simulate", "run the anonymous veto protocol");
  ProtocolFlags sim_flags;
  std::string votes;
  sim_flags.add_to(sim_cmd);
  sim_cmd->add_option("--votes", votes, "one F or V per member")->required();
  sim_cmd->add_option("--json", json_path, "also write the transcript here");
  sim_cmd->add_flag("--csv", csv, "print summary as CSV");

  auto* audit_cmd = app.add_subcommand("audit", "compare one member's FAVOR and VETO runs");
  ProtocolFlags audit_flags;
  std::size_t runs = 50;
  int member = 1;
  std::string base_votes;
  double alpha = 0.01;
  bool no_sift = false;
  audit_flags.add_to(audit_cmd);
  audit_cmd->add_option("--runs", runs, "paired runs per class");
  audit_cmd->add_option("--member", member, "audited member (1-based)");
  audit_cmd->add_option("--base-votes", base_votes, "votes of the others (default: all F)");
  audit_cmd->add_option("--alpha", alpha, "family-wise significance")->check(CLI::Range(0.0, 1.0));
  audit_cmd->add_flag("--no-sift", no_sift, "disable vetoer sifting (negative control)");
  audit_cmd->add_option("--json", json_path, "also write JSON here");
  audit_cmd->add_flag("--csv", csv, "print tests as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*state_cmd) {
      if (veto == qubits.has_value()) throw CliError{HV_ERR_INVALID_ARGUMENT, "give exactly one of --veto or --qubits"};
      hv_state* raw_state = nullptr;
      hv_observables* raw_obs = nullptr;
      if (veto) {
        check(hv_state_veto(state_n, &raw_state));
        StatePtr s(raw_state);
        check(hv_observables_protocol(static_cast<size_t>(state_n), &raw_obs));
        raw_state = s.release();
      } else {
        std::vector<double> a = alpha_text.empty() ? std::vector<double>(*qubits, 0.70710678118654752)
                                                   : parse_list(alpha_text);
        if (static_cast<int>(a.size()) != *qubits) throw CliError{HV_ERR_INVALID_ARGUMENT, "--alpha needs one value per qubit"};
        check(hv_observables_qubit(a.data(), nullptr, nullptr, nullptr, a.size(), &raw_obs));
        ObsPtr o(raw_obs);
        check(hv_hardy_build(o.get(), variant_from(variant), &raw_state, nullptr, nullptr, nullptr));
        raw_obs = o.release();
      }
      StatePtr s(raw_state);
      ObsPtr o(raw_obs);
      char* raw = nullptr;
      check(hv_hardy_report(s.get(), o.get(), veto ? HV_VARIANT_MODIFIED : variant_from(variant), &raw, nullptr));
      const Json doc = take_json(raw);
      if (csv) {
        emit_state_csv(doc.at("state"));
      }
      emit(doc, json_path, csv);
      return kExitOk;
    }

    if (*verify_cmd) {
      std::ifstream in(state_path);
      Json doc = Json::parse(in);
      const Json state_doc = doc.contains("state") ? doc.at("state") : doc;
      hv_state* raw_state = nullptr;
      check(hv_state_from_json(state_doc.dump().c_str(), &raw_state));
      StatePtr s(raw_state);
      const size_t n = hv_state_parties(s.get());
      hv_observables* raw_obs = nullptr;
      if (alpha_text.empty()) {
        check(hv_observables_protocol(n, &raw_obs));
      } else {
        const std::vector<double> a = parse_list(alpha_text);
        if (a.size() != n) throw CliError{HV_ERR_INVALID_ARGUMENT, "--alpha needs one value per party"};
        check(hv_observables_qubit(a.data(), nullptr, nullptr, nullptr, n, &raw_obs));
      }
      ObsPtr o(raw_obs);
      char* raw = nullptr;
      int pass = 0;
      check(hv_hardy_report(s.get(), o.get(), variant_from(variant), &raw, &pass));
      const Json report = take_json(raw);
      if (csv) {
        emit_conditions_csv(report.at("conditions").at("conditions"));
      }
      emit(report, json_path, csv);
      return pass ? kExitOk : kExitFailure;
    }

    if (*bound_cmd) {
      char* raw = nullptr;
      check(hv_bound(bound_n, bound_d, variant_from(variant), &raw));
      const Json doc = take_json(raw);
      if (csv) {
        std::cout << "variant,n,d,lhv_max,ns_max,quantum_q\n"
                  << csv_value(doc.at("variant")) << ',' << bound_n << ',' << bound_d << ','
                  << csv_value(doc.at("lhv_max")) << ',' << csv_value(doc.at("ns_max")) << ','
                  << csv_value(doc.at("quantum_q")) << '\n';
      }
      emit(doc, json_path, csv);
      return kExitOk;
    }

    if (*sim_cmd) {
      const hv_protocol_params p = sim_flags.params(sim_flags.jury_for(votes));
      hv_simulation* raw_sim = nullptr;
      check(hv_simulate(&p, votes.c_str(), &raw_sim));
      SimPtr sim(raw_sim);
      char* raw = nullptr;
      check(hv_simulation_to_json(sim.get(), &raw));
      const Json doc = take_json(raw);
      if (csv) {
        std::cout << "key,value\n";
        for (const char* key : {"vote_rounds", "aborted", "common_count", "count_plus", "count_minus", "tau_plus",
                                "tau_minus", "verdict"}) {
          std::cout << key << ',' << csv_value(doc.at(key)) << '\n';
        }
        std::cout << "test_status," << csv_value(doc.at("test_check").at("status")) << '\n';
      }
      emit(doc, json_path, csv);
      if (hv_simulation_aborted(sim.get())) {
        std::cerr << "protocol aborted: test rounds rejected the source\n";
        return kExitAbort;
      }
      return kExitOk;
    }

    if (*audit_cmd) {
      const int jury = audit_flags.n ? *audit_flags.n : (base_votes.empty() ? 3 : static_cast<int>(base_votes.size()));
      if (base_votes.empty()) base_votes.assign(static_cast<std::size_t>(jury), 'F');
      hv_protocol_params p = audit_flags.params(audit_flags.jury_for(base_votes));
      p.sifting = no_sift ? 0 : 1;
      char* raw = nullptr;
      int pass = 0;
      check(hv_audit(&p, base_votes.c_str(), member, runs, alpha, &raw, &pass));
      const Json doc = take_json(raw);
      if (csv) {
        std::cout << "test,statistic,df,p_value,pass\n";
        for (const auto& t : doc.at("tests")) {
          std::cout << csv_field(t.at("name").get<std::string>()) << ',' << t.at("statistic").dump() << ','
                    << t.at("df").dump() << ',' << t.at("p_value").dump() << ',' << t.at("pass").dump() << '\n';
        }
      }
      emit(doc, json_path, csv);
      return pass ? kExitOk : kExitFailure;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << hv_status_name(e.status) << ": " << e.message << '\n';
    return exit_code_for(e.status);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: PARSE: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitFailure;
}
