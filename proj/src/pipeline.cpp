#include "tgraph/pipeline.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "tgraph/clime.hpp"
#include "tgraph/glasso.hpp"
#include "tgraph/neighborhood.hpp"
#include "tgraph/select.hpp"

namespace tgraph {

namespace {

constexpr std::size_t kNoCount = std::numeric_limits<std::size_t>::max();

struct Named {
  Method method;
  std::string_view name;
};
constexpr Named kMethods[] = {
    {Method::kGlasso, "glasso"}, {Method::kTglasso, "tglasso"}, {Method::kNbsel, "nbsel"},
    {Method::kTnbsel, "tnbsel"}, {Method::kClime, "clime"},     {Method::kTclime, "tclime"},
    {Method::kLvglasso, "lvglasso"},
};

Method base_of(Method m) {
  switch (m) {
    case Method::kTglasso: return Method::kGlasso;
    case Method::kTnbsel: return Method::kNbsel;
    case Method::kTclime: return Method::kClime;
    default: return m;
  }
}

double max_offdiag(const SymMat& m) { return std::max(m.max_abs_offdiag(), 1e-12); }

// glasso and lvglasso penalise on the covariance scale, the others on the
// correlation scale.
double default_lambda_max(Method base, const SymMat& cov) {
  if (base == Method::kGlasso || base == Method::kLvglasso) return max_offdiag(cov);
  return max_offdiag(to_correlation(cov));
}

std::vector<double> geometric(double hi, double lo, std::size_t count) {
  std::vector<double> out;
  if (count == 1) return {hi};
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(hi * std::pow(lo / hi, t));
  }
  return out;
}

// One tuning candidate: the selected structure plus the matrix the
// likelihood is evaluated at.
struct Candidate {
  MethodResult result;
  SymMat score_theta;
  std::size_t extra_df = 0;
};

// A base fit at one lambda, reduced to what the tuners need.
struct BaseFit {
  PrecisionEstimate estimate;
  EdgeSet edges;
  std::optional<double> gamma;
  /// Free parameters of the low-rank part: r p - r (r - 1) / 2 for rank r.
  std::size_t extra_df = 0;
};

class Fitter {
 public:
  Fitter(const DataMatrix& data, const SymMat& cov, const TuningConfig& tuning)
      : data_(data), cov_(cov), tuning_(tuning),
        lambda0_(default_lambda0(static_cast<long>(data.n()), static_cast<long>(data.p()), tuning.lambda0_c)) {}

  double lambda0() const { return lambda0_; }

  BaseFit fit_base(Method base, double lambda, double gamma = 1.0) {
    BaseFit out;
    switch (base) {
      case Method::kGlasso:
        out.estimate = fit_glasso(cov_, lambda, tuning_.solver);
        out.edges = edge_set(out.estimate.theta);
        break;
      case Method::kNbsel: {
        LassoOptions lo;
        lo.max_iter = tuning_.solver.inner_max_iter;
        const NeighborhoodFit nf = fit_neighborhood(data_, lambda, CombineRule::kAnd, lo);
        out.estimate = neighborhood_estimate(nf);
        out.estimate.lambda = lambda;
        out.estimate.converged = nf.converged;
        out.edges = nf.edges;
        break;
      }
      case Method::kClime:
        out.estimate = fit_clime(cov_, lambda, tuning_.solver);
        out.edges = edge_set(out.estimate.theta);
        break;
      case Method::kLvglasso: {
        const LvglassoState* warm = lv_warm_.s.rows() == cov_.dim() ? &lv_warm_ : nullptr;
        const LatentDecomposition lv = fit_lvglasso(cov_, lambda, gamma, tuning_.lvglasso, warm);
        lv_warm_ = lv.state;
        out.estimate.theta = lv.s_hat;
        out.estimate.lambda = lambda;
        out.estimate.method = EstimateMethod::kLvglassoSparse;
        out.estimate.iterations = lv.iterations;
        out.estimate.converged = lv.converged;
        out.estimate.objective = lv.objective;
        out.edges = lv_edge_set(lv);
        out.gamma = gamma;
        {
          const auto r = static_cast<std::size_t>(latent_rank(lv));
          const auto p = static_cast<std::size_t>(cov_.dim());
          out.extra_df = r * p - r * (r - 1) / 2;
        }
        lv_marginal_ = SymMat::symmetrized(lv.s_hat.matrix() - lv.l_hat.matrix());
        break;
      }
      default:
        throw std::logic_error("fit_base: not a base method");
    }
    return out;
  }

  // Matrix scored by the likelihood for a structure chosen by `method`.
  SymMat score_theta(Method method, const BaseFit& fit) {
    if (method == Method::kGlasso) return fit.estimate.theta;
    if (method == Method::kLvglasso) return lv_marginal_;
    return fit_glasso_on_support(cov_, lambda0_, fit.edges, tuning_.solver).theta;
  }

  void reset_warm() { lv_warm_ = {}; }

 private:
  const DataMatrix& data_;
  const SymMat& cov_;
  const TuningConfig& tuning_;
  double lambda0_;
  LvglassoState lv_warm_;
  SymMat lv_marginal_;
};

MethodResult to_result(const BaseFit& f) {
  MethodResult r;
  r.edges = f.edges;
  r.estimate = f.estimate.theta;
  r.lambda = f.estimate.lambda;
  r.gamma = f.gamma;
  r.converged = f.estimate.converged;
  return r;
}

MethodResult thresholded(const BaseFit& base, const ThresholdedEstimate& t) {
  MethodResult r;
  r.edges = t.edges;
  r.estimate = t.theta_tilde;
  r.lambda = base.estimate.lambda;
  r.tau = t.tau;
  r.converged = base.estimate.converged;
  return r;
}

struct SearchPoint {
  BaseFit fit;
  double lambda = 0.0;
  bool ok = false;
};

// Largest edge count not above target along lambda; ties go to larger lambda.
SearchPoint search_lambda(Fitter& fitter, Method base, double gamma, double hi, std::size_t target,
                          int steps) {
  SearchPoint best;
  auto consider = [&](double lambda) -> std::size_t {
    try {
      BaseFit f = fitter.fit_base(base, lambda, gamma);
      const std::size_t count = f.edges.size();
      if (count <= target) {
        const bool better = !best.ok || count > best.fit.edges.size() ||
                            (count == best.fit.edges.size() && lambda > best.lambda);
        if (better) best = {std::move(f), lambda, true};
      }
      return count;
    } catch (const NumericError&) {
      return kNoCount;
    }
  };
  std::size_t top = consider(hi);
  for (int i = 0; i < 20 && top != kNoCount && top > target; ++i) {
    hi *= 2.0;
    top = consider(hi);
  }
  double lo = hi * 1e-3;
  const std::size_t bottom = consider(lo);
  if (bottom != kNoCount && bottom <= target) return best;
  fitter.reset_warm();
  for (int i = 0; i < steps; ++i) {
    if (best.ok && best.fit.edges.size() == target) break;
    const double mid = std::sqrt(lo * hi);
    const std::size_t count = consider(mid);
    if (count == kNoCount || count > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

MethodResult oracle_fit(Method method, Fitter& fitter, const SymMat& cov, const TuningConfig& t,
                        std::size_t target) {
  const Method base = base_of(method);
  if (is_thresholded(method)) {
    const BaseFit f = fitter.fit_base(base, fitter.lambda0());
    return thresholded(f, threshold_for_edge_count(f.estimate, target).result);
  }
  std::vector<double> gammas{1.0};
  if (method == Method::kLvglasso) gammas = t.gamma_grid;
  std::optional<SearchPoint> best;
  for (double g : gammas) {
    fitter.reset_warm();
    const double hi = default_lambda_max(base, cov) / (method == Method::kLvglasso ? g : 1.0);
    SearchPoint sp = search_lambda(fitter, base, g, hi, target, t.search_steps);
    if (!sp.ok) continue;
    const auto gap = [&](const SearchPoint& p) { return target - p.fit.edges.size(); };
    if (!best || gap(sp) < gap(*best) || (gap(sp) == gap(*best) && sp.lambda > best->lambda)) {
      best = std::move(sp);
    }
  }
  if (!best) throw NumericError(fmt::format("{}: no lambda reached {} edges", method_name(method), target));
  return to_result(best->fit);
}

struct Grid {
  std::vector<double> lambdas;       // descending
  std::vector<double> gammas;
  std::vector<std::size_t> counts;   // descending
};

Grid make_grid(Method method, const SymMat& cov, const TuningConfig& t) {
  Grid g;
  const Method base = base_of(method);
  if (is_thresholded(method)) {
    const std::size_t max_pairs = static_cast<std::size_t>(cov.dim() * (cov.dim() - 1) / 2);
    std::set<std::size_t, std::greater<>> counts{0};
    const std::size_t steps = std::max<std::size_t>(t.edge_grid_size, 2);
    for (std::size_t i = 0; i < steps; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(steps - 1);
      counts.insert(static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(max_pairs), frac))));
    }
    g.counts.assign(counts.begin(), counts.end());
    return g;
  }
  if (!t.lambda_grid.empty()) {
    g.lambdas = t.lambda_grid;
  } else {
    const double hi = default_lambda_max(base, cov);
    g.lambdas = geometric(hi, hi * t.lambda_min_ratio, t.lambda_grid_size);
  }
  std::sort(g.lambdas.begin(), g.lambdas.end(), std::greater<>());
  g.gammas = method == Method::kLvglasso ? t.gamma_grid : std::vector<double>{1.0};
  return g;
}

// Candidates in a fixed order (dense to sparse within each gamma). A failed
// fit leaves an empty slot so that indices line up across folds.
std::vector<std::optional<Candidate>> candidates(Method method, const DataMatrix& data, const SymMat& cov,
                                                 const TuningConfig& t, const Grid& grid) {
  Fitter fitter(data, cov, t);
  std::vector<std::optional<Candidate>> out;
  const Method base = base_of(method);
  if (is_thresholded(method)) {
    std::optional<BaseFit> f;
    try {
      f = fitter.fit_base(base, fitter.lambda0());
    } catch (const NumericError&) {
    }
    for (std::size_t count : grid.counts) {
      if (!f) {
        out.emplace_back();
        continue;
      }
      try {
        const auto ec = threshold_for_edge_count(f->estimate, count);
        BaseFit sub = *f;
        sub.edges = ec.result.edges;
        out.push_back(Candidate{thresholded(*f, ec.result), fitter.score_theta(method, sub)});
      } catch (const NumericError&) {
        out.emplace_back();
      }
    }
    return out;
  }
  for (double g : grid.gammas) {
    fitter.reset_warm();
    for (auto it = grid.lambdas.rbegin(); it != grid.lambdas.rend(); ++it) {
      try {
        const double lambda = method == Method::kLvglasso && t.lambda_grid.empty() ? *it / g : *it;
        const BaseFit f = fitter.fit_base(base, lambda, g);
        out.push_back(Candidate{to_result(f), fitter.score_theta(method, f), f.extra_df});
      } catch (const NumericError&) {
        out.emplace_back();
      }
    }
  }
  return out;
}

MethodResult ebic_fit(Method method, const DataMatrix& data, const SymMat& cov, const TuningConfig& t) {
  const Grid grid = make_grid(method, cov, t);
  const auto cands = candidates(method, data, cov, t, grid);
  std::vector<EbicCandidate> scored;
  std::vector<const Candidate*> back;
  for (const auto& c : cands) {
    if (!c) continue;
    scored.push_back({c->result.lambda, c->result.tau.value_or(0.0), c->result.edges, c->score_theta, c->extra_df});
    back.push_back(&*c);
  }
  if (scored.empty()) throw NumericError(fmt::format("{}: every ebic candidate failed", method_name(method)));
  const EbicChoice choice = select_by_ebic(scored, cov, static_cast<long>(data.n()), t.gamma_ebic);
  return back[choice.index]->result;
}

MethodResult cv_fit(Method method, const DataMatrix& data, const SymMat& cov, const TuningConfig& t,
                    std::uint64_t seed) {
  const Grid grid = make_grid(method, cov, t);
  const auto split = kfold_split(data.n(), t.folds, seed);
  std::vector<double> scores;
  for (std::size_t f = 0; f < split.size(); ++f) {
    if (split[f].size() < 2) throw std::invalid_argument("cv: a fold has fewer than 2 rows");
    std::vector<Index> train;
    for (std::size_t h = 0; h < split.size(); ++h) {
      if (h != f) train.insert(train.end(), split[h].begin(), split[h].end());
    }
    std::sort(train.begin(), train.end());
    std::vector<Index> test = split[f];
    std::sort(test.begin(), test.end());
    const DataMatrix train_data = data.rows(train);
    const SymMat train_cov = sample_covariance(train_data);
    const SymMat test_cov = sample_covariance(data.rows(test));
    const auto cands = candidates(method, train_data, train_cov, t, grid);
    if (scores.empty()) scores.assign(cands.size(), 0.0);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      double loss = std::numeric_limits<double>::infinity();
      if (cands[c]) {
        try {
          loss = trace_product(test_cov, cands[c]->score_theta) - log_det(cands[c]->score_theta);
        } catch (const NumericError&) {
        }
      }
      scores[c] += loss / static_cast<double>(split.size());
    }
  }
  const auto full = candidates(method, data, cov, t, grid);
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (!full[c] || !std::isfinite(scores[c])) continue;
    if (!best || scores[c] <= scores[*best]) best = c;
  }
  if (!best) throw NumericError(fmt::format("{}: every cv candidate failed", method_name(method)));
  return full[*best]->result;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& n : kMethods) {
    if (n.method == m) return n.name;
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  for (const auto& n : kMethods) {
    if (n.name == s) return n.method;
  }
  return std::nullopt;
}

std::string_view tuning_name(TuningMode m) {
  switch (m) {
    case TuningMode::kOracleCount: return "oracle_count";
    case TuningMode::kEbic: return "ebic";
    case TuningMode::kCv: return "cv";
    case TuningMode::kLambda0: return "lambda0";
  }
  return "?";
}

std::optional<TuningMode> parse_tuning(std::string_view s) {
  for (TuningMode m : {TuningMode::kOracleCount, TuningMode::kEbic, TuningMode::kCv, TuningMode::kLambda0}) {
    if (tuning_name(m) == s) return m;
  }
  return std::nullopt;
}

bool is_thresholded(Method m) {
  return m == Method::kTglasso || m == Method::kTnbsel || m == Method::kTclime;
}

MethodResult fit_method(Method method, const DataMatrix& data, const SymMat& cov,
                        const TuningConfig& tuning, std::optional<std::size_t> oracle_edges,
                        std::uint64_t cv_seed) {
  if (cov.dim() != data.p()) throw std::invalid_argument("fit_method: covariance and data disagree");
  switch (tuning.mode) {
    case TuningMode::kOracleCount: {
      if (!oracle_edges) throw ConfigError("oracle_count tuning needs the true edge count");
      Fitter fitter(data, cov, tuning);
      return oracle_fit(method, fitter, cov, tuning, *oracle_edges);
    }
    case TuningMode::kEbic:
      return ebic_fit(method, data, cov, tuning);
    case TuningMode::kCv:
      return cv_fit(method, data, cov, tuning, cv_seed);
    case TuningMode::kLambda0: {
      Fitter fitter(data, cov, tuning);
      const double g = tuning.gamma_grid.empty() ? 1.0 : tuning.gamma_grid.front();
      const BaseFit f = fitter.fit_base(base_of(method), fitter.lambda0(), g);
      if (is_thresholded(method)) return thresholded(f, hard_threshold(f.estimate, 0.0));
      return to_result(f);
    }
  }
  throw std::logic_error("fit_method: unknown tuning mode");
}

}  // namespace tgraph
