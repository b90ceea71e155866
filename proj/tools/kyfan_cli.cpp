// Command-line front end: one subcommand per library operation, JSON on stdout,
// diagnostics on stderr.  Exit codes: 0 success, 2 usage or input error, 3 solver
// did not reach its tolerance (the JSON is still printed).

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "kyfan/approx.hpp"
#include "kyfan/io.hpp"
#include "kyfan/lab.hpp"
#include "kyfan/norms.hpp"
#include "kyfan/ortho.hpp"
#include "kyfan/subdiff.hpp"

using namespace kyfan;
using io::json;
using io::to_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitUnconverged = 3;

struct Globals {
  std::uint64_t seed = 42;
  double tol = 1e-8;
  int indent = 2;
  std::string out;
};

struct PK {
  double p;
  Index k;
};

PK resolve_pk(const NormSpec& spec, const CMatrix& A)
{
  const Index n0 = std::min(A.rows(), A.cols());
  spec.validate(n0);
  return {spec.p(), spec.k_for(n0)};
}

json blocks_json(const SpectrumBlocks& b)
{
  return {{"values", b.values}, {"multiplicities", b.multiplicities}, {"tolerance", b.tolerance}};
}

json approx_json(const ApproximationResult& r, const NormSpec& spec)
{
  json j{{"norm", spec.to_string()},
         {"value", r.value},
         {"coefficients", to_json(r.coefficients)},
         {"orthoCoefficients", to_json(r.ortho_coefficients)},
         {"Y", to_json(r.Y)},
         {"R", to_json(r.R)},
         {"sigmaR", to_json(r.sigmaR)},
         {"converged", r.converged},
         {"solverTrace",
          {{"starts", r.trace.starts},
           {"iterations", r.trace.iterations},
           {"evaluations", r.trace.evaluations},
           {"startSpread", r.trace.start_spread},
           {"gapBound", r.trace.gap_bound}}}};
  j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  return j;
}

json strict_json(const StrictResult& s)
{
  json stages = json::array();
  for (const StageRecord& st : s.stages)
    stages.push_back({{"k", st.k},
                      {"minimum", st.minimum},
                      {"active", st.active},
                      {"gapBound", st.gap_bound},
                      {"converged", st.converged}});
  return {{"Y", to_json(s.Y)},
          {"coefficients", to_json(s.coefficients)},
          {"R", to_json(s.R)},
          {"sigmaR", to_json(s.sigmaR)},
          {"rho", s.rho},
          {"multiplicities", s.multiplicities},
          {"stageTol", s.stage_tol},
          {"stages", stages},
          {"converged", s.converged}};
}

json sweep_json(const std::vector<SweepRecord>& recs)
{
  json arr = json::array();
  for (const SweepRecord& r : recs)
    arr.push_back({{"p", r.p},
                   {"coefficients", to_json(r.coefficients)},
                   {"sigmaR", to_json(r.sigmaR)},
                   {"valueP", r.value_p},
                   {"valueInf", r.value_inf},
                   {"distToStrict", r.dist_to_strict},
                   {"converged", r.converged},
                   {"warmColdDisagree", r.warm_cold_disagree}});
  return arr;
}

json convergence_json(const ConvergenceReport& rep)
{
  json idx = json::array();
  for (const IndexConvergence& ic : rep.indices)
    idx.push_back({{"index", ic.index},
                   {"gap", ic.gap},
                   {"slope", ic.slope},
                   {"verdict", to_string(ic.verdict)},
                   {"theoremBacked", ic.theorem_backed}});
  return {{"indices", idx},
          {"firstBlock", rep.first_block},
          {"finalDistance", rep.final_distance},
          {"overall", to_string(rep.overall)}};
}

bool sweep_converged(const std::vector<SweepRecord>& recs)
{
  for (const SweepRecord& r : recs)
    if (!r.converged) return false;
  return true;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Ky Fan p-k norms: best approximation, subdifferentials and orthogonality"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->default_val(42);
  app.add_option("--tol", g.tol, "decision and convergence tolerance")->default_val(1e-8)->check(CLI::PositiveNumber);
  app.add_option("--json-indent", g.indent, "JSON indentation, negative for one line")->default_val(2);
  app.add_option("--out", g.out, "CSV output path (sweep, counterexample)");

  std::string matrix_path, other_path, subspace_path, direction_path;
  std::string norm_text = "spectral";
  int samples = 3;
  int starts = 50;
  int max_iter = 5000;
  double eps = 0.0;
  std::string mode = "complex";
  bool certify = false;
  double pmax = 1024.0;
  double group_tol = kGroupingTol;

  auto add_matrix = [&](CLI::App* sc) { sc->add_option("--matrix", matrix_path, "matrix JSON file")->required(); };
  auto add_norm = [&](CLI::App* sc, const char* def) {
    sc->add_option("--norm", norm_text, "kyfan:p=P,k=K | spectral | schatten:p=P | trace")->default_val(def);
  };

  CLI::App* c_norm = app.add_subcommand("norm", "evaluate a norm");
  add_matrix(c_norm);
  add_norm(c_norm, "spectral");

  CLI::App* c_dual = app.add_subcommand("dual", "evaluate a dual norm");
  add_matrix(c_dual);
  add_norm(c_dual, "spectral");

  CLI::App* c_sub = app.add_subcommand("subdiff", "describe the subdifferential (p >= 2)");
  add_matrix(c_sub);
  add_norm(c_sub, "kyfan:p=2,k=1");
  c_sub->add_option("--samples", samples, "sampled extreme points")->default_val(3)->check(CLI::NonNegativeNumber);
  c_sub->add_option("--group-tol", group_tol, "singular value grouping tolerance")->default_val(kGroupingTol);

  CLI::App* c_dir = app.add_subcommand("dirderiv", "right-hand directional derivative (p >= 2)");
  add_matrix(c_dir);
  c_dir->add_option("--direction", direction_path, "direction matrix JSON file")->required();
  add_norm(c_dir, "kyfan:p=2,k=1");

  CLI::App* c_ortho = app.add_subcommand("ortho", "orthogonality and parallelism decisions");
  c_ortho->require_subcommand(1);
  CLI::App* o_bj = c_ortho->add_subcommand("bj", "Birkhoff-James orthogonality of A to B");
  CLI::App* o_eps = c_ortho->add_subcommand("eps", "eps-Birkhoff-James orthogonality");
  CLI::App* o_par = c_ortho->add_subcommand("parallel", "norm parallelism");
  CLI::App* o_sub = c_ortho->add_subcommand("subspace", "orthogonality to a subspace with a density certificate");
  for (CLI::App* sc : {o_bj, o_eps, o_par, o_sub}) {
    add_matrix(sc);
    add_norm(sc, "kyfan:p=2,k=1");
  }
  for (CLI::App* sc : {o_bj, o_eps, o_par}) sc->add_option("--other", other_path, "matrix B JSON file")->required();
  o_eps->add_option("--eps", eps, "eps in [0, 1)")->required();
  o_eps->add_option("--mode", mode, "complex | real")->default_val("complex")->check(CLI::IsMember({"complex", "real"}));
  o_sub->add_option("--subspace", subspace_path, "subspace JSON file")->required();
  o_sub->add_option("--max-iter", max_iter, "alternating projection budget")->default_val(5000)->check(CLI::PositiveNumber);

  CLI::App* c_approx = app.add_subcommand("approx", "best approximation from a subspace");
  add_matrix(c_approx);
  c_approx->add_option("--subspace", subspace_path, "subspace JSON file")->required();
  add_norm(c_approx, "spectral");
  c_approx->add_option("--starts", starts, "multi-start count")->default_val(50)->check(CLI::PositiveNumber);
  c_approx->add_option("--max-iter", max_iter, "iteration budget")->default_val(5000)->check(CLI::PositiveNumber);
  c_approx->add_flag("--certify", certify, "search for an optimality certificate (p >= 2)");

  CLI::App* c_strict = app.add_subcommand("strict", "strict spectral approximation");
  add_matrix(c_strict);
  c_strict->add_option("--subspace", subspace_path, "subspace JSON file")->required();
  c_strict->add_option("--max-iter", max_iter, "per-stage iteration budget")->default_val(6000)->check(CLI::PositiveNumber);

  CLI::App* c_sweep = app.add_subcommand("sweep", "Schatten-p sweep towards the strict approximation");
  add_matrix(c_sweep);
  c_sweep->add_option("--subspace", subspace_path, "subspace JSON file")->required();
  c_sweep->add_option("--pmax", pmax, "largest exponent of the grid 2, 4, ..., pmax")->default_val(1024.0)->check(CLI::Range(2.0, 1e6));
  c_sweep->add_option("--starts", starts, "multi-start count per exponent")->default_val(12)->check(CLI::PositiveNumber);

  CLI::App* c_ce = app.add_subcommand("counterexample", "the fixed 3x3 counterexample instance");
  c_ce->add_option("--pmax", pmax, "largest exponent of the grid 2, 4, ..., pmax")->default_val(16.0)->check(CLI::Range(2.0, 1e6));
  c_ce->add_option("--starts", starts, "multi-start count per exponent")->default_val(12)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  json result;
  bool unconverged = false;
  try {
    if (*c_norm) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const NormSpec spec = NormSpec::parse(norm_text);
      const RVector sigma = svd(A).sigma;
      result = {{"norm", spec.to_string()}, {"value", norm_of_sigma(sigma, spec)}, {"sigma", to_json(sigma)}};
    } else if (*c_dual) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const NormSpec spec = NormSpec::parse(norm_text);
      result = {{"norm", spec.to_string()}, {"value", dual_norm(A, spec)}};
      if (!spec.is_spectral()) {
        const Index n0 = std::min(A.rows(), A.cols());
        result["ascentValue"] = dual_gauge_ascent(svd(A).sigma, spec.p(), spec.k_for(n0));
      }
    } else if (*c_sub) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const NormSpec spec = NormSpec::parse(norm_text);
      const SubdiffDescriptor d = descriptor(A, spec, group_tol);
      json pts = json::array();
      for (int s = 0; s < samples; ++s) pts.push_back(to_json(sample_extreme(d, g.seed + static_cast<std::uint64_t>(s))));
      json boundary = nullptr;
      if (d.boundary)
        boundary = {{"start", d.boundary->start},
                    {"dim", d.boundary->dim},
                    {"required", d.boundary->required},
                    {"value", d.boundary->value}};
      result = {{"norm", spec.to_string()},
                {"p", d.p},
                {"k", d.k},
                {"kind", d.kind == SubdiffKind::DualUnitBall ? "DualUnitBall" : "ExtremeFamily"},
                {"normValue", d.norm_value},
                {"prefactor", to_json(d.prefactor)},
                {"blocks", blocks_json(d.blocks)},
                {"fullBlocks", d.full_blocks},
                {"boundaryBlock", boundary},
                {"singleton", d.singleton()},
                {"rankDeficient", d.rank_deficient},
                {"extremePoints", pts}};
    } else if (*c_dir) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const CMatrix X = io::parse_matrix_file(direction_path);
      const NormSpec spec = NormSpec::parse(norm_text);
      const PK pk = resolve_pk(spec, A);
      result = {{"norm", spec.to_string()}, {"value", dir_derivative(A, X, pk.p, pk.k)}};
    } else if (*c_ortho) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const NormSpec spec = NormSpec::parse(norm_text);
      const PK pk = resolve_pk(spec, A);
      if (*o_bj) {
        const CMatrix B = io::parse_matrix_file(other_path);
        const BjResult r = check_bj(A, B, pk.p, pk.k, g.tol);
        result = {{"orthogonal", r.orthogonal}, {"minAbs", r.min_abs}, {"normA", r.norm_a}, {"rankDeficient", r.rank_deficient}};
        result["witnessBasis"] = r.witness_basis ? to_json(*r.witness_basis) : json(nullptr);
        result["witnessResidual"] = r.witness_residual;
        result["refutingLambda"] = r.refuting_lambda ? to_json(*r.refuting_lambda) : json(nullptr);
        if (r.refuting_lambda) result["refutedNorm"] = r.refuted_norm;
      } else if (*o_eps) {
        const CMatrix B = io::parse_matrix_file(other_path);
        const EpsBjResult r = check_eps_bj(A, B, pk.p, pk.k, eps, mode == "real" ? EpsMode::Real : EpsMode::Complex, g.tol);
        result = {{"orthogonal", r.orthogonal}, {"mode", mode}, {"eps", eps}, {"distance", r.distance}, {"threshold", r.threshold}};
        result["z0"] = r.z0 ? to_json(*r.z0) : json(nullptr);
      } else if (*o_par) {
        const CMatrix B = io::parse_matrix_file(other_path);
        const ParallelResult r = check_parallel(A, B, pk.p, pk.k, g.tol);
        result = {{"parallel", r.parallel},
                  {"maxAbs", r.max_abs},
                  {"normB", r.norm_b},
                  {"lambda", to_json(r.lambda)},
                  {"additivityDefect", r.additivity_defect},
                  {"rankDeficient", r.rank_deficient},
                  {"criterion", r.rank_deficient ? "Undefined-at-rank-deficiency" : "Defined"}};
      } else {
        const MatrixSubspace M = io::parse_subspace_file(subspace_path);
        CertificateOptions co;
        co.tol = g.tol;
        co.max_iter = max_iter;
        const CertificateOutcome c = subspace_certificate(A, M, pk.p, pk.k, co);
        json T = json::array();
        for (const CMatrix& t : c.certificate.T) T.push_back(to_json(t));
        result = {{"feasible", c.feasible},
                  {"T", T},
                  {"F", to_json(c.certificate.F)},
                  {"residualEig", c.certificate.residual_eig},
                  {"residualPerp", c.certificate.residual_perp},
                  {"dualNormBound", c.certificate.dual_norm_bound},
                  {"iterations", c.certificate.iterations}};
        if (c.feasible) {
          const CertificateCheck chk = verify_certificate(A, M, pk.p, pk.k, c.certificate, g.tol, g.seed);
          result["verified"] = chk.accepted;
          result["worstSampledExcess"] = chk.worst_sampled_excess;
        }
      }
    } else if (*c_approx) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const MatrixSubspace M = io::parse_subspace_file(subspace_path);
      const NormSpec spec = NormSpec::parse(norm_text);
      ApproxOptions o;
      o.starts = starts;
      o.max_iter = max_iter;
      o.tol = g.tol;
      o.seed = g.seed;
      ApproximationResult r = best_approx(A, M, spec, o);
      json cert = nullptr;
      if (certify) {
        const CertifyOutcome c = certify_best(A, r, M, spec);
        cert = {{"certified", c.certified}, {"trivial", c.trivial}, {"residualPerp", c.residual_perp}};
      }
      result = approx_json(r, spec);
      if (certify) result["certification"] = cert;
      unconverged = !r.converged;
    } else if (*c_strict) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const MatrixSubspace M = io::parse_subspace_file(subspace_path);
      StrictOptions so;
      so.max_iter = max_iter;
      so.seed = g.seed;
      const StrictResult s = strict_spectral(A, M, so);
      result = strict_json(s);
      unconverged = !s.converged;
    } else if (*c_sweep) {
      const CMatrix A = io::parse_matrix_file(matrix_path);
      const MatrixSubspace M = io::parse_subspace_file(subspace_path);
      SweepOptions so;
      so.starts = starts;
      so.seed = g.seed;
      StrictOptions st;
      st.seed = g.seed;
      const StrictResult strict = strict_spectral(A, M, st);
      const auto recs = p_sweep(A, M, geometric_grid(pmax), strict, so);
      if (!g.out.empty()) emit_csv(recs, g.out);
      result = {{"strict", strict_json(strict)},
                {"records", sweep_json(recs)},
                {"convergence", convergence_json(convergence_checks(recs, strict))}};
      unconverged = !strict.converged || !sweep_converged(recs);
    } else if (*c_ce) {
      SweepOptions so;
      so.starts = starts;
      so.seed = g.seed;
      const CounterexampleReport rep = counterexample_run(geometric_grid(pmax), so);
      if (!g.out.empty()) emit_csv(rep.per_p, g.out);
      json chain = json::array();
      bool ok = rep.strict.converged;
      for (const ChainRecord& c : rep.chain) {
        chain.push_back({{"p", c.p},
                         {"sigma3Schatten", c.sigma3_schatten},
                         {"sigma3KyFan", c.sigma3_kyfan},
                         {"kyfanOptimality", c.kyfan_optimality},
                         {"schattenOptimality", c.schatten_optimality},
                         {"sigma3Order", c.sigma3_order},
                         {"uniquenessSpread", c.spread},
                         {"converged", c.converged}});
        ok = ok && c.converged;
      }
      result = {{"A", to_json(rep.A)},
                {"X", to_json(rep.X)},
                {"strict", strict_json(rep.strict)},
                {"perP", sweep_json(rep.per_p)},
                {"inequalityChain", chain},
                {"contradiction", rep.contradiction}};
      unconverged = !ok;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::cout << result.dump(g.indent) << "\n";
  if (unconverged) {
    std::cerr << "warning: solver did not reach the requested tolerance\n";
    return kExitUnconverged;
  }
  return kExitOk;
}
