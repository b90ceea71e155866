#include "kyfan/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace kyfan {

NormSpec NormSpec::kyfan(double p, Index k)
{
  require(std::isfinite(p) && p >= 1.0, "Ky Fan norm needs 1 <= p < inf");
  require(p <= kMaxP, "p above 1e6 is not supported; use the spectral norm");
  require(k >= 1, "Ky Fan norm needs k >= 1");
  return NormSpec(Family::KyFan, p, k);
}

NormSpec NormSpec::schatten(double p)
{
  NormSpec s = kyfan(p, 1);
  s.k_ = 0;
  return s;
}

NormSpec NormSpec::spectral() { return NormSpec(Family::Spectral, 2.0, 1); }

Index NormSpec::k_for(Index n0) const
{
  if (family_ == Family::Spectral) return 1;
  return k_ == 0 ? n0 : k_;
}

void NormSpec::validate(Index n0) const
{
  if (family_ == Family::Spectral) return;
  if (k_ > n0)
    fail(ErrorCode::InvalidInput,
         "k = " + std::to_string(k_) + " exceeds min(m, n) = " + std::to_string(n0));
}

std::string NormSpec::to_string() const
{
  std::ostringstream os;
  if (family_ == Family::Spectral) return "spectral";
  if (k_ == 0) {
    if (p_ == 1.0) return "trace";
    os << "schatten:p=" << p_;
  } else {
    os << "kyfan:p=" << p_ << ",k=" << k_;
  }
  return os.str();
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& body)
{
  std::map<std::string, std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidInput, "norm parameter '" + item + "' is not key=value");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double parse_number(const std::string& s, const char* what)
{
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) fail(ErrorCode::InvalidInput, std::string("bad value for ") + what + ": '" + s + "'");
  return v;
}

} // namespace

NormSpec NormSpec::parse(const std::string& text)
{
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto params = parse_params(body);
  auto get = [&](const char* key) -> double {
    const auto it = params.find(key);
    if (it == params.end()) fail(ErrorCode::InvalidInput, std::string("norm '") + text + "' is missing " + key);
    return parse_number(it->second, key);
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : params) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) fail(ErrorCode::InvalidInput, "unknown norm parameter '" + key + "'");
    }
  };

  if (head == "spectral") {
    only({});
    return spectral();
  }
  if (head == "trace") {
    only({});
    return trace();
  }
  if (head == "schatten") {
    only({"p"});
    return schatten(get("p"));
  }
  if (head == "kyfan") {
    only({"p", "k"});
    const double k = get("k");
    require(k == std::floor(k), "k must be an integer");
    return kyfan(get("p"), static_cast<Index>(k));
  }
  fail(ErrorCode::InvalidInput, "unknown norm family '" + head + "'");
}

double kyfan_value(const RVector& sigma, double p, Index k)
{
  k = std::min<Index>(k, sigma.size());
  if (k == 0 || sigma[0] <= 0.0) return 0.0;
  const double top = sigma[0];
  if (p == 1.0) return sigma.head(k).sum();
  double acc = 0.0;
  for (Index i = 0; i < k; ++i) acc += std::pow(sigma[i] / top, p);
  return top * std::pow(acc, 1.0 / p);
}

double norm_of_sigma(const RVector& sigma, const NormSpec& spec)
{
  if (spec.is_spectral()) return sigma.size() ? sigma[0] : 0.0;
  spec.validate(sigma.size());
  return kyfan_value(sigma, spec.p(), spec.k_for(sigma.size()));
}

double norm(const CMatrix& A, const NormSpec& spec) { return norm_of_sigma(svd(A).sigma, spec); }

double dual_gauge(const RVector& d, double p, Index k)
{
  const Index n = d.size();
  require(k >= 1 && k <= n, "dual gauge needs 1 <= k <= n0");

  // fold the tail: the optimal x is constant from index k on
  std::vector<double> folded(static_cast<std::size_t>(k));
  for (Index i = 0; i + 1 < k; ++i) folded[static_cast<std::size_t>(i)] = d[i];
  folded.back() = d.tail(n - k + 1).sum();

  // pool adjacent violators into non-increasing block means
  std::vector<std::pair<double, double>> blocks; // (sum, count)
  for (double v : folded) {
    blocks.emplace_back(v, 1.0);
    while (blocks.size() >= 2) {
      const auto& last = blocks[blocks.size() - 1];
      const auto& prev = blocks[blocks.size() - 2];
      if (prev.first / prev.second >= last.first / last.second) break;
      const std::pair<double, double> merged{prev.first + last.first, prev.second + last.second};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }

  const double top = blocks.front().first / blocks.front().second;
  if (top <= 0.0) return 0.0;
  if (p == 1.0) return top; // q = infinity
  const double q = p / (p - 1.0);
  double acc = 0.0;
  for (const auto& [sum, count] : blocks) acc += count * std::pow((sum / count) / top, q);
  return top * std::pow(acc, 1.0 / q);
}

double dual_gauge_ascent(const RVector& d, double p, Index k)
{
  const Index n = d.size();
  require(k >= 1 && k <= n, "dual gauge needs 1 <= k <= n0");
  RVector dk(k);
  for (Index i = 0; i + 1 < k; ++i) dk[i] = d[i];
  dk[k - 1] = d.tail(n - k + 1).sum();
  const double scale = std::max(dk.cwiseAbs().maxCoeff(), 1e-300);
  dk /= scale;

  // x_i = w_i + ... + w_{k-1} keeps x non-increasing whenever w >= 0
  auto to_x = [&](const RVector& w) {
    RVector x(k);
    double acc = 0.0;
    for (Index i = k - 1; i >= 0; --i) {
      acc += w[i];
      x[i] = acc;
    }
    return x;
  };
  auto pnorm = [&](const RVector& x) {
    if (p == 1.0) return x.sum();
    double m = x.maxCoeff();
    if (m <= 0.0) return 0.0;
    return m * std::pow((x / m).array().pow(p).sum(), 1.0 / p);
  };
  auto ratio = [&](const RVector& w) {
    const RVector x = to_x(w);
    const double nrm = pnorm(x);
    return nrm > 0.0 ? dk.dot(x) / nrm : -std::numeric_limits<double>::infinity();
  };
  auto gradient = [&](const RVector& w) {
    const RVector x = to_x(w);
    const double nrm = pnorm(x);
    RVector dn(k);
    for (Index i = 0; i < k; ++i) dn[i] = p == 1.0 ? 1.0 : std::pow(x[i] / nrm, p - 1.0);
    const RVector gx = dk / nrm - (dk.dot(x) / (nrm * nrm)) * dn;
    RVector gw(k);
    double acc = 0.0;
    for (Index j = 0; j < k; ++j) {
      acc += gx[j];
      gw[j] = acc;
    }
    return gw;
  };

  std::vector<RVector> starts;
  for (Index j = 0; j < k; ++j) {
    RVector w = RVector::Zero(k);
    w[j] = 1.0;
    starts.push_back(w);
  }
  starts.push_back(RVector::Constant(k, 1.0 / static_cast<double>(k)));

  double best = -std::numeric_limits<double>::infinity();
  for (RVector w : starts) {
    double f = ratio(w);
    double step = 1.0;
    for (int it = 0; it < 5000 && step > 1e-16; ++it) {
      const RVector g = gradient(w);
      bool moved = false;
      while (step > 1e-16) {
        RVector cand = (w + step * g).cwiseMax(0.0);
        if (cand.sum() <= 0.0) {
          step *= 0.5;
          continue;
        }
        cand /= pnorm(to_x(cand));
        const double fc = ratio(cand);
        if (fc > f) {
          moved = fc - f > 1e-17;
          w = cand;
          f = fc;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::max(best, f);
  }
  return best * scale;
}

double dual_norm(const CMatrix& G, const NormSpec& spec)
{
  const RVector d = svd(G).sigma;
  if (spec.is_spectral()) return d.sum();
  spec.validate(d.size());
  return dual_gauge(d, spec.p(), spec.k_for(d.size()));
}

CMatrix norm_subgradient(const SvdFactors& f, Index rows, Index cols, const NormSpec& spec)
{
  const Index n0 = f.sigma.size();
  spec.validate(n0);
  CMatrix G = CMatrix::Zero(rows, cols);
  if (n0 == 0 || f.sigma[0] <= 0.0) return G;
  const Index k = spec.k_for(n0);
  const double nrm = norm_of_sigma(f.sigma, spec);
  const double floor = kSigmaClamp * f.sigma[0];
  for (Index i = 0; i < k; ++i) {
    const double s = f.sigma[i];
    if (s <= floor) break;
    double w = 1.0;
    if (!spec.is_spectral() && spec.p() != 1.0) w = std::pow(s / nrm, spec.p() - 1.0);
    G += w * f.left.col(i) * f.right.col(i).adjoint();
  }
  return G;
}

CMatrix norm_subgradient(const CMatrix& A, const NormSpec& spec)
{
  return norm_subgradient(svd(A), A.rows(), A.cols(), spec);
}

double variational_norm_check(const CMatrix& A, double p, Index k, int trials, std::uint64_t seed)
{
  require(p >= 1.0, "variational check needs p >= 1");
  const SvdFactors f = svd(A);
  const Index n = A.cols();
  require(k >= 1 && k <= f.sigma.size(), "variational check needs 1 <= k <= n0");
  if (f.sigma[0] <= 0.0) return 0.0;

  const double top = f.sigma[0];
  RVector powered(f.sigma.size());
  for (Index i = 0; i < f.sigma.size(); ++i) powered[i] = std::pow(f.sigma[i] / top, p);
  const CMatrix H = f.right * powered.cast<cplx>().asDiagonal() * f.right.adjoint();

  auto value = [&](const CMatrix& U) {
    const double t = (U.adjoint() * H * U).trace().real();
    return top * std::pow(std::max(t, 0.0), 1.0 / p);
  };

  double best = value(f.right.leftCols(k));
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) best = std::max(best, value(haar_isometry(n, k, rng)));
  return best;
}

} // namespace kyfan
