// csq: contextual-subspace quantum eigensolver toolkit.
//
// Subcommands: taper, noncon, csvqe, circuit, sample, adapt. File formats are JSON
// (Hamiltonians, states, sidecars) and CSV (traces, error tables); see README.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "csq/io.hpp"
#include "csq/pipeline.hpp"
#include "csq/vqe.hpp"

namespace {

std::string default_sidecar(const std::string& out) { return out + ".sidecar.json"; }

std::string csv_path_for(const std::string& out) {
  const auto dot = out.rfind('.');
  return (dot == std::string::npos ? out : out.substr(0, dot)) + "_errors.csv";
}

void check_ref_bits(const std::string& bits, std::size_t n) {
  if (bits.size() != n) {
    throw std::runtime_error("reference length " + std::to_string(bits.size()) +
                             " does not match n_qubits " + std::to_string(n));
  }
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::runtime_error("reference must be a 0/1 string");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contextual-subspace VQE toolkit"};
  app.require_subcommand(1);

  // --- taper -------------------------------------------------------------------
  std::string taper_h, taper_ref, taper_out, taper_sidecar;
  std::string taper_pauli = "Z";
  auto* taper = app.add_subcommand("taper", "taper Z2 symmetries out of a Hamiltonian");
  taper->add_option("--hamiltonian", taper_h, "Hamiltonian JSON")->required();
  taper->add_option("--ref", taper_ref, "reference basis state, e.g. 0110")->required();
  taper->add_option("--out", taper_out, "reduced Hamiltonian JSON")->required();
  taper->add_option("--sidecar", taper_sidecar, "sidecar JSON (default <out>.sidecar.json)");
  taper->add_option("--target-pauli", taper_pauli, "single-qubit image: X, Y or Z");

  // --- noncon ------------------------------------------------------------------
  std::string nc_h, nc_out, nc_strategy = "diag-greedy";
  auto* noncon = app.add_subcommand("noncon", "noncontextual split, decomposition and optimum");
  noncon->add_option("--hamiltonian", nc_h, "Hamiltonian JSON")->required();
  noncon->add_option("--strategy", nc_strategy, "diag-greedy | magnitude-greedy");
  noncon->add_option("--out", nc_out, "model JSON")->required();

  // --- csvqe -------------------------------------------------------------------
  std::string cs_h, cs_ref, cs_out;
  std::size_t cs_qubits = 0, cs_depth = 1;
  std::string cs_strategy = "diag-greedy";
  auto* csvqe = app.add_subcommand("csvqe", "contextual subspace search (taper + relaxation)");
  csvqe->add_option("--hamiltonian", cs_h, "Hamiltonian JSON")->required();
  csvqe->add_option("--ref", cs_ref, "reference basis state for the taper sector")->required();
  csvqe->add_option("--qubits", cs_qubits, "target number of simulated qubits")->required();
  csvqe->add_option("--depth", cs_depth, "greedy relaxation depth d");
  csvqe->add_option("--strategy", cs_strategy, "noncontextual selection strategy");
  csvqe->add_option("--out", cs_out, "report JSON (error table lands next to it)")->required();

  // --- circuit -----------------------------------------------------------------
  std::string circ_op, circ_format = "openqasm2", circ_out;
  int circ_trotter = 1;
  bool circ_cancel = false;
  auto* circuit = app.add_subcommand("circuit", "emit a Trotterized exponential circuit");
  circuit->add_option("--op", circ_op, "operator JSON (coefficients are the angles)")->required();
  circuit->add_option("--trotter", circ_trotter, "Trotter number");
  circuit->add_option("--format", circ_format, "openqasm2 | json");
  circuit->add_option("--out", circ_out, "output path (default stdout)");
  circuit->add_flag("--cancel", circ_cancel, "cancel adjacent inverse gate pairs");

  // --- sample ------------------------------------------------------------------
  std::string smp_h, smp_state, smp_out;
  std::size_t smp_shots = 1 << 14, smp_real = 20;
  std::uint64_t smp_seed = 7;
  auto* sample = app.add_subcommand("sample", "shot-noise RMSE scan over QWC groups");
  sample->add_option("--hamiltonian", smp_h, "Hamiltonian JSON")->required();
  sample->add_option("--state", smp_state, "statevector JSON")->required();
  sample->add_option("--shots", smp_shots, "maximum shots per group (scan runs 1..max)");
  sample->add_option("--realizations", smp_real, "independent realizations per point");
  sample->add_option("--seed", smp_seed, "master seed");
  sample->add_option("--out", smp_out, "RMSE CSV")->required();

  // --- adapt -------------------------------------------------------------------
  std::string ad_h, ad_pool, ad_ref, ad_out;
  double ad_target = std::numeric_limits<double>::quiet_NaN();
  double ad_grad = 1e-3;
  int ad_cycles = 50;
  auto* adapt = app.add_subcommand("adapt", "qubit-ADAPT-VQE on a statevector backend");
  adapt->add_option("--hamiltonian", ad_h, "Hamiltonian JSON")->required();
  adapt->add_option("--pool", ad_pool, "operator pool JSON (Hamiltonian schema)")->required();
  adapt->add_option("--ref", ad_ref, "reference basis state")->required();
  adapt->add_option("--target-energy", ad_target, "stop at |E - target| < 1.6e-3");
  adapt->add_option("--grad-threshold", ad_grad, "pool-gradient stopping threshold");
  adapt->add_option("--max-cycles", ad_cycles, "cycle cap");
  adapt->add_option("--out", ad_out, "trace CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*taper) {
      const csq::PauliSum h = csq::hamiltonian_from_json(csq::read_json_file(taper_h));
      check_ref_bits(taper_ref, h.n_qubits());
      if (taper_pauli.size() != 1) throw std::runtime_error("--target-pauli must be X, Y or Z");
      const auto result = csq::taper_hamiltonian(h, taper_ref, taper_pauli[0]);
      csq::write_json_file(taper_out, csq::hamiltonian_to_json(result.reduced));
      const std::string sidecar = taper_sidecar.empty() ? default_sidecar(taper_out) : taper_sidecar;
      csq::write_json_file(sidecar, csq::taper_sidecar_to_json(result.map, result.sector));
      std::printf("tapered %zu -> %zu qubits (%zu generators)\n", h.n_qubits(),
                  result.reduced.n_qubits(), result.map.generators.size());
    } else if (*noncon) {
      const csq::PauliSum h = csq::hamiltonian_from_json(csq::read_json_file(nc_h));
      const csq::NcStrategy strategy = nc_strategy == "magnitude-greedy"
                                           ? csq::NcStrategy::MagnitudeGreedy
                                           : csq::NcStrategy::DiagGreedy;
      if (nc_strategy != "magnitude-greedy" && nc_strategy != "diag-greedy") {
        throw std::runtime_error("unknown strategy: " + nc_strategy);
      }
      const auto split = csq::select_noncontextual_subset(h, strategy);
      const auto model = csq::decompose(csq::real_terms(split.noncontextual));
      const auto opt = csq::optimize(model);
      csq::json out = csq::noncontextual_report_to_json(model, opt.state, opt.energy);
      out["noncontextual_hamiltonian"] = csq::hamiltonian_to_json(split.noncontextual);
      out["contextual_hamiltonian"] = csq::hamiltonian_to_json(split.contextual);
      csq::write_json_file(nc_out, out);
      std::printf("noncontextual terms: %zu of %zu, eps0_nc = %.12f\n",
                  split.noncontextual.size(), h.simplified().size(), opt.energy);
    } else if (*csvqe) {
      const csq::PauliSum h = csq::hamiltonian_from_json(csq::read_json_file(cs_h));
      check_ref_bits(cs_ref, h.n_qubits());
      csq::CsvqeOptions opts;
      opts.depth = cs_depth;
      opts.strategy = cs_strategy == "magnitude-greedy" ? csq::NcStrategy::MagnitudeGreedy
                                                        : csq::NcStrategy::DiagGreedy;
      const auto res = csq::run_csvqe_pipeline(h, cs_ref, opts);
      csq::write_json_file(cs_out, csq::csvqe_report_to_json(res, cs_qubits));
      csq::write_text_file(csv_path_for(cs_out), csq::csvqe_table_to_csv(res));
      if (const auto* step = csq::find_step_with_sim_qubits(res, cs_qubits)) {
        std::printf("chosen |F| = %zu, %zu simulated qubits, energy %.12f\n",
                    step->subset.size(), step->n_sim, step->energy);
      } else {
        std::printf("no chain step with exactly %zu simulated qubits; see %s\n", cs_qubits,
                    csv_path_for(cs_out).c_str());
      }
    } else if (*circuit) {
      const auto terms = csq::angled_terms_from_json(csq::read_json_file(circ_op));
      csq::Circuit c = csq::trotter_circuit(terms, circ_trotter);
      if (circ_cancel) c = csq::cancel_adjacent(c);
      std::string text;
      if (circ_format == "openqasm2") {
        text = csq::to_openqasm2(c);
      } else if (circ_format == "json") {
        text = csq::circuit_to_json(c).dump(2) + "\n";
      } else {
        throw std::runtime_error("unknown format: " + circ_format);
      }
      if (circ_out.empty()) {
        std::cout << text;
      } else {
        csq::write_text_file(circ_out, text);
      }
    } else if (*sample) {
      const csq::PauliSum h = csq::hamiltonian_from_json(csq::read_json_file(smp_h));
      const csq::StateVector s = csq::state_from_json(csq::read_json_file(smp_state));
      std::size_t max_pow = 0;
      while ((std::size_t{1} << (max_pow + 1)) <= smp_shots) ++max_pow;
      const auto scan = csq::shot_noise_scan(h, s, max_pow, smp_real, smp_seed);
      std::ostringstream os;
      os.precision(12);
      os << "shots,rmse\n";
      for (const auto& p : scan) os << p.shots << "," << p.rmse << "\n";
      csq::write_text_file(smp_out, os.str());
      std::printf("fitted log-log slope m = %.4f over %zu points\n",
                  csq::fit_loglog_slope(scan), scan.size());
    } else if (*adapt) {
      const csq::PauliSum h = csq::hamiltonian_from_json(csq::read_json_file(ad_h));
      const auto pool_terms = csq::angled_terms_from_json(csq::read_json_file(ad_pool));
      std::vector<csq::PauliTerm> ops;
      for (const auto& [t, c] : pool_terms) ops.push_back(t);
      const auto pool = csq::OperatorPool::from_terms(h.n_qubits(), ops);
      check_ref_bits(ad_ref, h.n_qubits());
      csq::AdaptConfig cfg;
      cfg.gradient_threshold = ad_grad;
      cfg.max_cycles = ad_cycles;
      if (!std::isnan(ad_target)) cfg.target_energy = ad_target;
      const auto res = csq::adapt_vqe(h, pool, ad_ref, cfg);
      std::ostringstream os;
      os.precision(12);
      os << "cycle,nfev,energy,abs_error\n";
      for (const auto& pt : res.trace) {
        os << pt.cycle << "," << pt.nfev << "," << pt.energy << ",";
        if (!std::isnan(pt.abs_error)) os << pt.abs_error;
        os << "\n";
      }
      csq::write_text_file(ad_out, os.str());
      std::printf("adapt stopped (%s) after %zu cycles, energy %.12f\n", res.stop_reason.c_str(),
                  res.trace.size(), res.energy);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "csq: %s\n", e.what());
    return 1;
  }
  return 0;
}
