#include "kyfan/lab.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kyfan {

std::vector<double> geometric_grid(double p_max)
{
  require(p_max >= 2.0, "p_max must be at least 2");
  std::vector<double> grid;
  for (double p = 2.0; p <= p_max * (1.0 + 1e-12); p *= 2.0) grid.push_back(p);
  return grid;
}

std::vector<SweepRecord> p_sweep(const CMatrix& A, const MatrixSubspace& M, const std::vector<double>& p_grid,
                                 const StrictResult& strict, const SweepOptions& opts)
{
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    require(p_grid[i] >= 2.0, "sweep exponents must be at least 2");
    if (i > 0) require(p_grid[i] > p_grid[i - 1], "sweep grid must be strictly increasing");
  }
  std::vector<SweepRecord> out;
  std::optional<CVector> warm;
  for (double p : p_grid) {
    ApproxOptions o;
    o.starts = opts.starts;
    o.max_iter = opts.max_iter;
    o.seed = opts.seed;
    o.initial = warm;
    const NormSpec spec = NormSpec::schatten(p);
    const ApproximationResult r = best_approx(A, M, spec, o);

    SweepRecord rec;
    rec.p = p;
    rec.coefficients = r.coefficients;
    rec.sigmaR = r.sigmaR;
    rec.value_p = r.value;
    rec.value_inf = r.sigmaR.size() ? r.sigmaR[0] : 0.0;
    rec.dist_to_strict = (r.Y - strict.Y).norm();
    rec.converged = r.converged;
    if (warm && r.trace.start_values.size() >= 2)
      rec.warm_cold_disagree = std::abs(r.trace.start_values[0] - r.trace.start_values[1]) > 1e-6;
    out.push_back(rec);
    warm = r.coefficients;
  }
  return out;
}

std::vector<SweepRecord> p_sweep(const CMatrix& A, const MatrixSubspace& M, const std::vector<double>& p_grid,
                                 const SweepOptions& opts)
{
  StrictOptions so;
  so.seed = opts.seed;
  so.max_iter = std::max(opts.max_iter, 1);
  return p_sweep(A, M, p_grid, strict_spectral(A, M, so), opts);
}

const char* to_string(Verdict v)
{
  switch (v) {
  case Verdict::ConvergesWithinTol: return "ConvergesWithinTol";
  case Verdict::Inconclusive: return "Inconclusive";
  case Verdict::Diverging: return "Diverging";
  }
  return "?";
}

ConvergenceReport convergence_checks(const std::vector<SweepRecord>& sweep, const StrictResult& strict, double tol,
                                     int window)
{
  require(!sweep.empty(), "convergence checks need a non-empty sweep");
  require(window >= 2, "trend window must hold at least two records");
  ConvergenceReport rep;
  const Index n0 = strict.sigmaR.size();
  rep.first_block = strict.multiplicities.empty() ? 0 : strict.multiplicities[0];
  const Index second = strict.multiplicities.size() > 1 ? strict.multiplicities[1] : 0;
  const bool two_rows = std::min(strict.R.rows(), strict.R.cols()) <= 2;
  rep.final_distance = sweep.back().dist_to_strict;

  const std::size_t used = std::min<std::size_t>(sweep.size(), static_cast<std::size_t>(window));
  const std::size_t first = sweep.size() - used;
  bool all_converge = true;
  bool any_diverge = false;
  for (Index i = 0; i < n0; ++i) {
    IndexConvergence ic;
    ic.index = i + 1;
    ic.theorem_backed = i < rep.first_block || (rep.first_block == 1 && i < 1 + second) || two_rows;
    auto gap_at = [&](std::size_t r) { return std::abs(sweep[r].sigmaR[i] - strict.sigmaR[i]); };
    ic.gap = gap_at(sweep.size() - 1);

    if (used >= 2) {
      double mx = 0.0, my = 0.0;
      for (std::size_t r = first; r < sweep.size(); ++r) {
        mx += std::log2(sweep[r].p);
        my += gap_at(r);
      }
      mx /= static_cast<double>(used);
      my /= static_cast<double>(used);
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t r = first; r < sweep.size(); ++r) {
        const double dx = std::log2(sweep[r].p) - mx;
        sxy += dx * (gap_at(r) - my);
        sxx += dx * dx;
      }
      ic.slope = sxx > 0.0 ? sxy / sxx : 0.0;
      if (ic.gap <= tol && ic.slope <= 0.5 * tol) ic.verdict = Verdict::ConvergesWithinTol;
      else if (ic.gap > tol && ic.slope > 1e-3 * tol) ic.verdict = Verdict::Diverging;
    }
    all_converge = all_converge && ic.verdict == Verdict::ConvergesWithinTol;
    any_diverge = any_diverge || ic.verdict == Verdict::Diverging;
    rep.indices.push_back(ic);
  }

  if (all_converge && rep.final_distance <= tol) rep.overall = Verdict::ConvergesWithinTol;
  else if (any_diverge) rep.overall = Verdict::Diverging;
  return rep;
}

CounterexampleReport counterexample_run(const std::vector<double>& p_list, const SweepOptions& opts)
{
  CounterexampleReport rep;
  rep.A = diag_matrix({0.5, 2.0, 0.0});
  rep.X = diag_matrix({0.0, 1.0, 1.0});
  const MatrixSubspace M(3, 3, {rep.X}, Field::Complex);
  StrictOptions so;
  so.seed = opts.seed;
  rep.strict = strict_spectral(rep.A, M, so);
  rep.per_p = p_sweep(rep.A, M, p_list, rep.strict, opts);

  rep.contradiction = !p_list.empty();
  for (const SweepRecord& rec : rep.per_p) {
    ChainRecord c;
    c.p = rec.p;
    const CMatrix Rp = rep.A - rec.coefficients[0] * rep.X;
    ApproxOptions o;
    o.starts = opts.starts;
    o.max_iter = opts.max_iter;
    o.seed = opts.seed;
    const NormSpec pk = NormSpec::kyfan(rec.p, 2);
    const NormSpec sp = NormSpec::schatten(rec.p);
    const ApproximationResult r2 = best_approx(rep.A, M, pk, o);
    const double slack = 1e-9 * (1.0 + norm(rep.A, sp));
    c.kyfan_optimality = norm(r2.R, pk) <= norm(Rp, pk) + slack;
    c.schatten_optimality = norm(Rp, sp) <= norm(r2.R, sp) + slack;
    c.sigma3_schatten = rec.sigmaR[2];
    c.sigma3_kyfan = r2.sigmaR[2];
    c.sigma3_order = c.sigma3_schatten <= c.sigma3_kyfan + 1e-8;
    c.spread = unique_1d_probe(rep.A, rep.X, rec.p, 2, 6, opts.seed).empirical_spread;
    c.converged = rec.converged && r2.converged;
    rep.contradiction = rep.contradiction && c.sigma3_order;
    rep.chain.push_back(c);
  }
  return rep;
}

std::string csv_quote(const std::string& field)
{
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

std::string num(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string csv_text(const std::vector<SweepRecord>& records)
{
  std::vector<std::string> header{"p"};
  const Index nc = records.empty() ? 0 : records.front().coefficients.size();
  const Index ns = records.empty() ? 0 : records.front().sigmaR.size();
  for (Index j = 1; j <= nc; ++j) {
    header.push_back("coef" + std::to_string(j) + "_re");
    header.push_back("coef" + std::to_string(j) + "_im");
  }
  for (Index j = 1; j <= ns; ++j) header.push_back("sigma" + std::to_string(j));
  for (const char* h : {"value_p", "value_inf", "distToStrict"}) header.emplace_back(h);

  std::ostringstream os;
  auto row = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_quote(fields[i]);
    os << "\r\n";
  };
  row(header);
  for (const SweepRecord& r : records) {
    require(r.coefficients.size() == nc && r.sigmaR.size() == ns, "sweep records must share one shape");
    std::vector<std::string> f{num(r.p)};
    for (Index j = 0; j < nc; ++j) {
      f.push_back(num(r.coefficients[j].real()));
      f.push_back(num(r.coefficients[j].imag()));
    }
    for (Index j = 0; j < ns; ++j) f.push_back(num(r.sigmaR[j]));
    f.push_back(num(r.value_p));
    f.push_back(num(r.value_inf));
    f.push_back(num(r.dist_to_strict));
    row(f);
  }
  return os.str();
}

void emit_csv(const std::vector<SweepRecord>& records, const std::string& path)
{
  const std::string text = csv_text(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

} // namespace kyfan
