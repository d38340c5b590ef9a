#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csq/contextual.hpp"
#include "csq/dense.hpp"
#include "csq/io.hpp"
#include "csq/noncontextual.hpp"
#include "csq/tapering.hpp"

namespace csq {

/// End-to-end CS-VQE search: taper physical symmetries, split off a noncontextual
/// sub-Hamiltonian, solve it classically, then relax stabilizers greedily and report
/// every step of the chain. Used by the CLI and by the fixture tests unchanged.
struct CsvqeOptions {
  char target_pauli = 'Z';
  NcStrategy strategy = NcStrategy::DiagGreedy;
  std::size_t depth = 1;
  std::size_t dense_cap = kDenseQubitCap;
};

struct CsvqeStepReport {
  GeneratorSubset subset;
  std::size_t n_sim = 0;
  double energy = 0.0;                // evaluator estimate for this subset
  double eps_nc_f = 0.0;              // scalar part of the projected noncontextual sum
  std::optional<double> delta_c;      // |energy - eps0(full)| when diagonalizable
};

struct CsvqeResult {
  TaperResult taper;
  NoncontextualSplit split;  // on the tapered Hamiltonian
  NoncontextualModel model;
  NoncontextualOptimum optimum;
  ContextualFrame frame;
  std::vector<CsvqeStepReport> chain;
  std::optional<double> eps0_full;  // tapered-Hamiltonian ground energy when feasible
};

inline CsvqeResult run_csvqe_pipeline(const PauliSum& h, const std::string& ref_bits,
                                      const CsvqeOptions& opts = {}) {
  CsvqeResult res;
  res.taper = taper_hamiltonian(h, ref_bits, opts.target_pauli);
  const PauliSum& reduced = res.taper.reduced;
  if (reduced.n_qubits() == 0) {
    throw std::runtime_error("csvqe: Hamiltonian tapers to a scalar, nothing to search");
  }

  res.split = select_noncontextual_subset(reduced, opts.strategy);
  res.model = decompose(real_terms(res.split.noncontextual));
  res.optimum = optimize(res.model);
  res.frame = make_contextual_frame(reduced, res.model, res.optimum.state);

  if (reduced.n_qubits() <= opts.dense_cap) {
    res.eps0_full = dense_ground_energy(reduced, opts.dense_cap);
  }

  const auto chain =
      relaxation_order(res.frame, opts.depth, exact_diagonalization_evaluator(res.frame, opts.dense_cap));
  for (const auto& step : chain) {
    CsvqeStepReport report;
    report.subset = step.subset;
    report.energy = step.energy;
    const auto problem = make_contextual_problem(res.frame, step.subset);
    report.n_sim = problem.n_sim();
    const PauliSum nc_proj = project(res.split.noncontextual, problem.map, problem.sector);
    report.eps_nc_f = nc_proj.coefficient(PauliTerm::identity(nc_proj.n_qubits())).real();
    if (res.eps0_full) report.delta_c = std::abs(step.energy - *res.eps0_full);
    res.chain.push_back(std::move(report));
  }
  return res;
}

inline const CsvqeStepReport* find_step_with_sim_qubits(const CsvqeResult& res, std::size_t k) {
  for (const auto& step : res.chain) {
    if (step.n_sim == k) return &step;
  }
  return nullptr;
}

inline json csvqe_report_to_json(const CsvqeResult& res, std::optional<std::size_t> target_k) {
  json steps = json::array();
  for (const auto& s : res.chain) {
    json js{{"fixed_generators", s.subset.gen_indices},
            {"includes_anticommuting_combination", s.subset.include_cr},
            {"n_sim_qubits", s.n_sim},
            {"energy", s.energy},
            {"eps_nc_f", s.eps_nc_f}};
    if (s.delta_c) js["delta_c"] = *s.delta_c;
    steps.push_back(js);
  }
  json out{{"taper", taper_sidecar_to_json(res.taper.map, res.taper.sector)},
           {"tapered_hamiltonian", hamiltonian_to_json(res.taper.reduced)},
           {"noncontextual",
            noncontextual_report_to_json(res.model, res.optimum.state, res.optimum.energy)},
           {"chain", steps}};
  if (res.eps0_full) out["eps0_tapered"] = *res.eps0_full;
  if (target_k) {
    const CsvqeStepReport* chosen = find_step_with_sim_qubits(res, *target_k);
    if (chosen) {
      const auto problem = make_contextual_problem(res.frame, chosen->subset);
      out["chosen"] = {{"n_sim_qubits", chosen->n_sim},
                       {"fixed_generators", chosen->subset.gen_indices},
                       {"includes_anticommuting_combination", chosen->subset.include_cr},
                       {"eps_nc_f", chosen->eps_nc_f},
                       {"energy", chosen->energy},
                       {"reduced_hamiltonian",
                        hamiltonian_to_json(build_contextual_hamiltonian(res.frame, problem))},
                       {"reference_bits", noncontextual_reference_bits(res.frame, problem)}};
      if (chosen->delta_c) out["chosen"]["delta_c"] = *chosen->delta_c;
    }
  }
  return out;
}

/// Per-size error table (CSV): one row per relaxation step.
inline std::string csvqe_table_to_csv(const CsvqeResult& res) {
  std::ostringstream os;
  os.precision(12);
  os << "n_sim_qubits,n_fixed,energy,eps_nc_f,delta_c\n";
  for (const auto& s : res.chain) {
    os << s.n_sim << "," << s.subset.size() << "," << s.energy << "," << s.eps_nc_f << ",";
    if (s.delta_c) os << *s.delta_c;
    os << "\n";
  }
  return os.str();
}

}  // namespace csq
