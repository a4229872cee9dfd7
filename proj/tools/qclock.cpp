// qclock: command-line front end for the clock analysis library.
//
// stdout carries exactly one result document (JSON, or CSV for sweeps);
// diagnostics go to stderr. Exit codes: 0 success, 2 invalid input or failed
// validation (an error object {code, message, detail} is printed on stdout),
// 1 internal error, 64 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qclock/qclock.hpp"

namespace {

using qclock::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;

struct Output {
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qclock::Error(qclock::ErrorCode::validation, "cannot open output file", path);
    out << text;
  }
  void write(const Json& doc) const { write(doc.dump(2) + "\n"); }
};

qclock::ClockSystem load_clock(const std::string& path) {
  return qclock::io::clock_from_json(qclock::io::read_json_file(path));
}
qclock::QuantumChannel load_channel(const std::string& path) {
  return qclock::io::channel_from_json(qclock::io::read_json_file(path));
}
qclock::Hamiltonian load_hamiltonian(const std::string& path) {
  return qclock::Hamiltonian(qclock::io::matrix_from_json(qclock::io::read_json_file(path), path));
}
qclock::DensityMatrix load_state(const std::string& path) {
  return qclock::DensityMatrix::from_matrix(qclock::io::matrix_from_json(qclock::io::read_json_file(path), path));
}

Json error_document(std::string_view code, const std::string& message, const std::string& detail) {
  return Json{{"error", {{"code", code}, {"message", message}, {"detail", detail}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum clock analysis: Fisher timing information, covariant channels, copy bounds"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Output output;
  std::function<void()> action;

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", output.path, "Write the result document to this file instead of stdout");
  };

  // qfi
  struct {
    std::string clock;
    double cutoff = 1e-12;
    bool variational = false;
    int restarts = 8;
    int iterations = 200;
    std::optional<qclock::Seed> seed;
  } qfi_opts;
  {
    auto* sub = app.add_subcommand("qfi", "Quantum Fisher timing information of a clock");
    sub->add_option("--clock", qfi_opts.clock, "Clock JSON file")->required();
    sub->add_option("--cutoff", qfi_opts.cutoff, "Pseudo-inverse cutoff on p_k + p_l");
    sub->add_flag("--variational", qfi_opts.variational, "Also run the variational search");
    sub->add_option("--restarts", qfi_opts.restarts, "Random restarts for the variational search");
    sub->add_option("--iterations", qfi_opts.iterations, "Ascent iterations per restart");
    sub->add_option("--seed", qfi_opts.seed, "Seed (required with --variational)");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        const auto clock = load_clock(qfi_opts.clock);
        const auto r = qclock::qfi(clock, qfi_opts.cutoff);
        Json doc = qclock::io::to_json(r);
        doc["rho_dot"] = qclock::io::to_json(qclock::rho_dot(clock));
        if (qfi_opts.variational) {
          if (!qfi_opts.seed) throw qclock::Error(qclock::ErrorCode::validation, "--variational requires --seed");
          const auto v = qclock::variational_qfi(clock, qfi_opts.restarts, qfi_opts.iterations, *qfi_opts.seed);
          doc["variational"] = {{"value", v.value}, {"argmax", qclock::io::to_json(v.argmax)}};
        }
        output.write(doc);
      };
    });
  }

  // evolve
  struct {
    std::string clock;
    double time = 0.0;
  } evolve_opts;
  {
    auto* sub = app.add_subcommand("evolve", "Evolve a clock state for a time t");
    sub->add_option("--clock", evolve_opts.clock, "Clock JSON file")->required();
    sub->add_option("--time", evolve_opts.time, "Evolution time")->required();
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        const auto clock = load_clock(evolve_opts.clock);
        output.write(qclock::io::to_json(qclock::evolve(clock, evolve_opts.time)));
      };
    });
  }

  // moments
  std::string moments_clock;
  {
    auto* sub = app.add_subcommand("moments", "Energy mean, second moment and standard deviation");
    sub->add_option("--clock", moments_clock, "Clock JSON file")->required();
    add_output(sub);
    sub->callback([&] {
      action = [&] { output.write(qclock::io::to_json(qclock::energy_moments(load_clock(moments_clock)))); };
    });
  }

  // make-state
  struct {
    std::string kind;
    qclock::Index dim = 2;
    qclock::Index rank = 1;
    double mean = 0.0;
    double sigma = 1.0;
    double energy = 1.0;
    std::string hamiltonian;
    std::optional<qclock::Seed> seed;
  } make_opts;
  {
    auto* sub = app.add_subcommand("make-state", "Build a clock file (gaussian, equal-superposition, random)");
    sub->add_option("--kind", make_opts.kind, "gaussian | equal-superposition | random")
        ->required()
        ->check(CLI::IsMember({"gaussian", "equal-superposition", "random"}));
    sub->add_option("--dim", make_opts.dim, "Dimension (levels n for equal-superposition)");
    sub->add_option("--rank", make_opts.rank, "Rank of a random state");
    sub->add_option("--mean", make_opts.mean, "Gaussian energy mean");
    sub->add_option("--sigma", make_opts.sigma, "Gaussian energy width");
    sub->add_option("--energy", make_opts.energy, "Energy quantum E of the equal superposition");
    sub->add_option("--hamiltonian", make_opts.hamiltonian, "Hamiltonian matrix file (default: ladder 0..dim-1)");
    sub->add_option("--seed", make_opts.seed, "Seed (required for random)");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        auto ham = [&] {
          return make_opts.hamiltonian.empty() ? qclock::Hamiltonian::ladder(make_opts.dim)
                                               : load_hamiltonian(make_opts.hamiltonian);
        };
        std::optional<qclock::ClockSystem> clock;
        if (make_opts.kind == "gaussian") {
          const auto h = ham();
          clock.emplace(qclock::gaussian_energy_pure_state(h, make_opts.mean, make_opts.sigma), h);
        } else if (make_opts.kind == "equal-superposition") {
          clock.emplace(qclock::equal_superposition_clock(make_opts.dim, make_opts.energy));
        } else {
          if (!make_opts.seed) throw qclock::Error(qclock::ErrorCode::validation, "random states require --seed");
          const auto h = make_opts.hamiltonian.empty()
                             ? qclock::random_hamiltonian(make_opts.dim, qclock::derive_seed(*make_opts.seed, 1))
                             : load_hamiltonian(make_opts.hamiltonian);
          clock.emplace(qclock::random_density(h.dim(), make_opts.rank, *make_opts.seed), h);
        }
        Json doc = qclock::io::to_json(*clock);
        doc["moments"] = qclock::io::to_json(qclock::energy_moments(*clock));
        output.write(doc);
      };
    });
  }

  // check-channel
  struct {
    std::string channel;
    double tol = 1e-9;
    std::string h_in;
    std::string h_out;
    double cov_tol = 1e-9;
  } check_opts;
  {
    auto* sub = app.add_subcommand("check-channel", "CPTP validation, plus covariance when Hamiltonians are given");
    sub->add_option("--channel", check_opts.channel, "Channel JSON file")->required();
    sub->add_option("--tol", check_opts.tol, "CPTP tolerance");
    auto* hin = sub->add_option("--h-in", check_opts.h_in, "Input Hamiltonian matrix file");
    auto* hout = sub->add_option("--h-out", check_opts.h_out, "Output Hamiltonian matrix file");
    hin->needs(hout);
    hout->needs(hin);
    sub->add_option("--cov-tol", check_opts.cov_tol, "Covariance tolerance");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        const auto ch = load_channel(check_opts.channel);
        Json doc{{"cptp", qclock::io::to_json(qclock::validate_cptp(ch, check_opts.tol))}};
        if (!check_opts.h_in.empty()) {
          doc["covariance"] = qclock::io::to_json(qclock::is_covariant(
              ch, load_hamiltonian(check_opts.h_in), load_hamiltonian(check_opts.h_out), check_opts.cov_tol));
        }
        output.write(doc);
      };
    });
  }

  // twirl
  struct {
    std::string channel;
    std::string h_in;
    std::string h_out;
    double freq_tol = 1e-9;
  } twirl_opts;
  {
    auto* sub = app.add_subcommand("twirl", "Project a channel onto covariant channels");
    sub->add_option("--channel", twirl_opts.channel, "Channel JSON file")->required();
    sub->add_option("--h-in", twirl_opts.h_in, "Input Hamiltonian matrix file")->required();
    sub->add_option("--h-out", twirl_opts.h_out, "Output Hamiltonian matrix file")->required();
    sub->add_option("--freq-tol", twirl_opts.freq_tol, "Bohr frequency matching tolerance");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        output.write(qclock::io::to_json(qclock::covariant_twirl(load_channel(twirl_opts.channel),
                                                                 load_hamiltonian(twirl_opts.h_in),
                                                                 load_hamiltonian(twirl_opts.h_out),
                                                                 twirl_opts.freq_tol)));
      };
    });
  }

  // apply
  struct {
    std::string channel;
    std::string state;
  } apply_opts;
  {
    auto* sub = app.add_subcommand("apply", "Apply a channel to a state");
    sub->add_option("--channel", apply_opts.channel, "Channel JSON file")->required();
    sub->add_option("--state", apply_opts.state, "State matrix file")->required();
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        output.write(qclock::io::to_json(qclock::apply(load_channel(apply_opts.channel), load_state(apply_opts.state))));
      };
    });
  }

  // decompose
  struct {
    std::string a;
    std::string b;
    double tol = 1e-9;
    qclock::Seed seed = 0;
  } dec_opts;
  {
    auto* sub = app.add_subcommand("decompose", "Common invariant subspaces and non-disturbing distinguishability");
    sub->add_option("--state-a", dec_opts.a, "First state matrix file")->required();
    sub->add_option("--state-b", dec_opts.b, "Second state matrix file")->required();
    sub->add_option("--tol", dec_opts.tol, "Invariance and trace-gap tolerance");
    sub->add_option("--seed", dec_opts.seed, "Seed for the random commutant element")->required();
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        const auto r = qclock::nondisturbing_distinguishable(load_state(dec_opts.a), load_state(dec_opts.b),
                                                             dec_opts.tol, dec_opts.seed);
        Json doc = qclock::io::to_json(r.decomposition);
        doc["witness_projector"] = r.witness_projector ? qclock::io::to_json(*r.witness_projector) : Json(nullptr);
        output.write(doc);
      };
    });
  }

  // broadcastable
  struct {
    std::vector<std::string> states;
    double tol = 1e-10;
  } bc_opts;
  {
    auto* sub = app.add_subcommand("broadcastable", "Whether a family of states pairwise commutes");
    sub->add_option("--state", bc_opts.states, "State matrix files (two or more)")->required()->expected(2, -1);
    sub->add_option("--tol", bc_opts.tol, "Commutator tolerance");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        std::vector<qclock::DensityMatrix> states;
        for (const auto& p : bc_opts.states) states.push_back(load_state(p));
        output.write(Json{{"pairwise_commuting", qclock::pairwise_commuting(states, bc_opts.tol)},
                          {"max_commutator", qclock::max_pairwise_commutator(states)}});
      };
    });
  }

  // orthogonal-times
  struct {
    qclock::Index n = 2;
    double energy = 1.0;
  } ot_opts;
  {
    auto* sub = app.add_subcommand("orthogonal-times", "Times of mutually orthogonal equal-superposition states");
    sub->add_option("--n", ot_opts.n, "Number of levels")->required();
    sub->add_option("--energy", ot_opts.energy, "Energy quantum E")->required();
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        const auto times = qclock::orthogonal_times(ot_opts.n, ot_opts.energy);
        const auto clock = qclock::equal_superposition_clock(ot_opts.n, ot_opts.energy);
        const double overlap =
            qclock::max_pairwise_overlap(qclock::equal_superposition_vector(ot_opts.n), clock.hamiltonian(), times);
        output.write(Json{{"times", times}, {"max_overlap", overlap}});
      };
    });
  }

  // copy-bound
  struct {
    std::string clock;
    std::string channel;
    std::string h1;
    std::string h2;
    double cov_tol = 1e-8;
  } cb_opts;
  {
    auto* sub = app.add_subcommand("copy-bound", "Check the timing-information copy inequality for a broadcast");
    sub->add_option("--clock", cb_opts.clock, "Input clock JSON file")->required();
    sub->add_option("--channel", cb_opts.channel, "Broadcast channel JSON file")->required();
    sub->add_option("--h1", cb_opts.h1, "First output Hamiltonian matrix file")->required();
    sub->add_option("--h2", cb_opts.h2, "Second output Hamiltonian matrix file")->required();
    sub->add_option("--cov-tol", cb_opts.cov_tol, "Covariance precondition tolerance");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        qclock::BoundTolerances tol;
        tol.covariance = cb_opts.cov_tol;
        const auto r = qclock::copy_bound_check(load_clock(cb_opts.clock), load_channel(cb_opts.channel),
                                                load_hamiltonian(cb_opts.h1), load_hamiltonian(cb_opts.h2), tol);
        output.write(Json{{"copy_bound", qclock::io::to_json(r)},
                          {"time_uncertainty", qclock::io::to_json(qclock::time_uncertainty_check(r))}});
      };
    });
  }

  // monotonicity
  struct {
    std::string clock;
    std::string channel;
    std::string h_out;
    double cov_tol = 1e-8;
  } mono_opts;
  {
    auto* sub = app.add_subcommand("monotonicity", "Compare F before and after a covariant channel");
    sub->add_option("--clock", mono_opts.clock, "Input clock JSON file")->required();
    sub->add_option("--channel", mono_opts.channel, "Channel JSON file")->required();
    sub->add_option("--h-out", mono_opts.h_out, "Output Hamiltonian matrix file")->required();
    sub->add_option("--cov-tol", mono_opts.cov_tol, "Covariance precondition tolerance");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        qclock::BoundTolerances tol;
        tol.covariance = mono_opts.cov_tol;
        output.write(qclock::io::to_json(qclock::monotonicity_check(
            load_clock(mono_opts.clock), load_channel(mono_opts.channel), load_hamiltonian(mono_opts.h_out), tol)));
      };
    });
  }

  // sweep
  struct {
    std::string config;
    qclock::Seed seed = 0;
    std::string format = "csv";
    std::optional<unsigned> threads;
  } sweep_opts;
  {
    auto* sub = app.add_subcommand("sweep", "Seeded Monte-Carlo batch of copy-bound or monotonicity checks");
    sub->add_option("--config", sweep_opts.config, "Sweep config JSON file")->required();
    sub->add_option("--seed", sweep_opts.seed, "Base seed (overrides the config)")->required();
    sub->add_option("--format", sweep_opts.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", sweep_opts.threads, "Worker threads (overrides the config)");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        auto cfg = qclock::sweep_config_from_json(qclock::io::read_json_file(sweep_opts.config), sweep_opts.seed);
        if (sweep_opts.threads) {
          if (*sweep_opts.threads < 1) throw qclock::Error(qclock::ErrorCode::config, "threads must be >= 1", "threads");
          cfg.threads = *sweep_opts.threads;
        }
        const auto result = qclock::run_sweep(cfg);
        if (sweep_opts.format == "csv") {
          output.write(qclock::to_csv(result));
        } else {
          output.write(qclock::to_json(result));
        }
      };
    });
  }

  // classical-fisher
  struct {
    std::string family;
    double time = 0.0;
    double dt = 1e-4;
  } cf_opts;
  {
    auto* sub = app.add_subcommand("classical-fisher", "Fisher timing information of a classical signal family");
    sub->add_option("--family", cf_opts.family, "Signal family JSON file")->required();
    sub->add_option("--time", cf_opts.time, "Time at which F is evaluated");
    sub->add_option("--dt", cf_opts.dt, "Central-difference step");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        const auto fam = qclock::io::family_from_json(qclock::io::read_json_file(cf_opts.family));
        const double f = qclock::classical_fisher(fam, cf_opts.time, cf_opts.dt);
        output.write(Json{{"family", fam.name()},
                          {"fisher_info", f},
                          {"time_uncertainty", qclock::io::number(f > 0.0 ? 1.0 / std::sqrt(f) : qclock::kInfinity)}});
      };
    });
  }

  // block-traces
  struct {
    std::string clock;
    std::vector<double> times;
    double tol = 1e-9;
  } bt_opts;
  {
    auto* sub = app.add_subcommand("block-traces", "Energy-block traces of a clock along its orbit");
    sub->add_option("--clock", bt_opts.clock, "Clock JSON file")->required();
    sub->add_option("--times", bt_opts.times, "Times to sample")->required()->expected(1, -1);
    sub->add_option("--tol", bt_opts.tol, "Eigenvalue grouping tolerance");
    add_output(sub);
    sub->callback([&] {
      action = [&] {
        output.write(qclock::io::to_json(qclock::conserved_block_traces(load_clock(bt_opts.clock), bt_opts.times,
                                                                        bt_opts.tol)));
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const qclock::Error& e) {
    Output{}.write(error_document(qclock::to_string(e.code()), e.what(), e.detail()));
    std::cerr << "qclock: " << e.what() << (e.detail().empty() ? "" : " (" + e.detail() + ")") << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    Output{}.write(error_document("validation_error", "malformed input document", e.what()));
    std::cerr << "qclock: malformed input document: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    Output{}.write(error_document("internal_error", e.what(), ""));
    std::cerr << "qclock: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
