#include "glb/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "glb/errors.hpp"

namespace glb {

namespace {

// Configuration sum without the resolved-range warning of bubble();
// optimizers are allowed to wander outside it.
RadialField config_field(const GridPtr& grid, const std::vector<double>& theta,
                         const std::vector<double>& lambda) {
  const int D = grid->dimension;
  RadialField out(grid, "config");
  for (size_t j = 0; j < lambda.size(); ++j) {
    const cplx phase = std::polar(std::pow(lambda[j], -0.5 * (D - 2)), theta[j]);
    for (int i = 0; i < out.size(); ++i)
      out.values[i] += phase * w_profile(D, grid->nodes[i] / lambda[j]);
  }
  return out;
}

RadialField residual_field(const RadialField& u, const RadialField* bg,
                           const std::vector<double>& theta,
                           const std::vector<double>& lambda) {
  RadialField g = u;
  if (bg)
    for (int i = 0; i < g.size(); ++i) g.values[i] -= bg->values[i];
  const RadialField W = config_field(u.grid, theta, lambda);
  for (int i = 0; i < g.size(); ++i) g.values[i] -= W.values[i];
  return g;
}

// the 2N orthogonality pairings
std::vector<double> ortho_residuals(const RadialField& g, const TestProfiles& tp,
                                    const std::vector<double>& theta,
                                    const std::vector<double>& lambda) {
  const int N = static_cast<int>(lambda.size());
  const GridPtr& grid = g.grid;
  std::vector<double> F(2 * N);
  for (int j = 0; j < N; ++j) {
    const RadialField Z1 = tp.z1_scaled(lambda[j], grid);
    const RadialField Z2 = tp.z2_scaled(lambda[j], grid);
    const cplx ph = std::polar(1.0, theta[j]);
    // <i e^{i th} Z1 | g> and <e^{i th} Z2 | g>, Z real
    double s1 = 0.0, s2 = 0.0;
    const auto& w = grid->quad_weights;
    for (int i = 0; i < g.size(); ++i) {
      const cplx gz = std::conj(ph) * g.values[i];
      s1 += w[i] * Z1.values[i].real() * (std::conj(cplx{0.0, 1.0}) * gz).real();
      s2 += w[i] * Z2.values[i].real() * gz.real();
    }
    F[2 * j] = s1;
    F[2 * j + 1] = s2;
  }
  return F;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// dense Gaussian elimination with partial pivoting (2N x 2N, N small)
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A[i * n + k]) > std::abs(A[piv * n + k])) piv = i;
    if (std::abs(A[piv * n + k]) < 1e-300)
      throw FitError("fit_decomposition: singular Jacobian", 0.0);
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double m = A[i * n + k] / A[k * n + k];
      for (int j = k; j < n; ++j) A[i * n + j] -= m * A[k * n + j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A[i * n + j] * x[j];
    x[i] = s / A[i * n + i];
  }
  return x;
}

double ratio_sum_of(const std::vector<double>& lambda, int D, double top_scale) {
  double s = 0.0;
  for (size_t j = 0; j + 1 < lambda.size(); ++j)
    s += std::pow(lambda[j] / lambda[j + 1], 0.5 * (D - 2));
  if (!lambda.empty() && std::isfinite(top_scale) && top_scale > 0.0)
    s += std::pow(lambda.back() / top_scale, 0.5 * (D - 2));
  return s;
}

// ---- Nelder-Mead on (theta_j, log lambda_j) ---------------------------------

double nelder_mead(std::vector<double>& x,
                   const std::function<double(const std::vector<double>&)>& f,
                   int max_iter, double tol) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> simplex(n + 1, x);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i)
    simplex[i + 1][i] += (i % 2 == 0) ? 0.1 : 0.1;  // theta and log-lambda steps
  for (int i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  for (int it = 0; it < max_iter; ++it) {
    // order
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (int i = 0; i <= n; ++i) {
        s2[i] = simplex[idx[i]];
        f2[i] = fv[idx[i]];
      }
      simplex = std::move(s2);
      fv = std::move(f2);
    }
    if (std::abs(fv[n] - fv[0]) < tol * (std::abs(fv[0]) + tol)) break;

    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

    auto blend = [&](double a) {
      std::vector<double> p(n);
      for (int j = 0; j < n; ++j) p[j] = centroid[j] + a * (simplex[n][j] - centroid[j]);
      return p;
    };
    std::vector<double> xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      std::vector<double> xc = blend(0.5);
      const double fc = f(xc);
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = f(simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  x = simplex[best];
  return fv[best];
}

}  // namespace

double Regime::top_scale() const {
  if (kind == blowup) {
    if (!(T_plus > t)) throw ConfigError("Regime: need t < T_plus in the blow-up regime");
    return std::sqrt(T_plus - t);
  }
  return t > 0.0 ? std::sqrt(t) : std::numeric_limits<double>::infinity();
}

DecompositionResult fit_decomposition(const RadialField& u, int N, const BubbleParams& guess,
                                      const TestProfiles& profiles, const RadialField* bg,
                                      double ortho_tol) {
  if (N < 1) throw ConfigError("fit_decomposition: need N >= 1");
  if (guess.count() != N) throw ConfigError("fit_decomposition: guess size != N");
  const int D = u.grid->dimension;

  std::vector<double> theta = guess.theta;
  std::vector<double> loglam(N);
  for (int j = 0; j < N; ++j) loglam[j] = std::log(guess.lambda[j]);

  auto eval_F = [&](const std::vector<double>& th, const std::vector<double>& ll) {
    std::vector<double> lam(N);
    for (int j = 0; j < N; ++j) lam[j] = std::exp(ll[j]);
    const RadialField g = residual_field(u, bg, th, lam);
    return ortho_residuals(g, profiles, th, lam);
  };

  std::vector<double> F = eval_F(theta, loglam);
  double Fnorm = max_abs(F);
  const int max_iter = 60;
  int it = 0;
  for (; it < max_iter && Fnorm > 1e-12; ++it) {
    // finite-difference Jacobian, columns ordered (th_1, ll_1, th_2, ll_2, ...)
    const int n = 2 * N;
    std::vector<double> J(n * n);
    const double h = 1e-7;
    for (int j = 0; j < N; ++j) {
      {
        auto th = theta;
        th[j] += h;
        const auto Fp = eval_F(th, loglam);
        for (int i = 0; i < n; ++i) J[i * n + 2 * j] = (Fp[i] - F[i]) / h;
      }
      {
        auto ll = loglam;
        ll[j] += h;
        const auto Fp = eval_F(theta, ll);
        for (int i = 0; i < n; ++i) J[i * n + 2 * j + 1] = (Fp[i] - F[i]) / h;
      }
    }
    std::vector<double> rhs(F);
    for (auto& v : rhs) v = -v;
    const std::vector<double> dx = solve_dense(J, rhs);

    // damped update with step halving
    double s = 1.0;
    bool accepted = false;
    for (int half = 0; half < 10; ++half, s *= 0.5) {
      auto th = theta;
      auto ll = loglam;
      for (int j = 0; j < N; ++j) {
        th[j] += s * dx[2 * j];
        ll[j] += s * dx[2 * j + 1];
      }
      const auto Ft = eval_F(th, ll);
      if (max_abs(Ft) < Fnorm) {
        theta = th;
        loglam = ll;
        F = Ft;
        Fnorm = max_abs(F);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  DecompositionResult res;
  std::vector<double> lam(N);
  for (int j = 0; j < N; ++j) lam[j] = std::exp(loglam[j]);
  res.params = BubbleParams(theta, lam);
  res.g = residual_field(u, bg, res.params.theta, res.params.lambda);
  res.ortho_residuals = ortho_residuals(res.g, profiles, res.params.theta, res.params.lambda);
  res.g_norm = std::sqrt(norm_E(res.g, 0.0, u.grid->r_max));
  res.ratio_sum = ratio_sum_of(res.params.lambda, D,
                               std::numeric_limits<double>::infinity());
  res.converged = max_abs(res.ortho_residuals) < ortho_tol;
  res.iterations = it;
  if (!res.converged && Fnorm > 1e-2)
    throw FitError("fit_decomposition: Newton did not converge", Fnorm);
  return res;
}

namespace {

ProximityValue proximity_impl(const RadialField& u, int K, int N, double rho,
                              const TestProfiles& profiles, const Regime& regime,
                              const RadialField* bg) {
  const int D = u.grid->dimension;
  const double top = regime.top_scale();
  const int nfit = N - K;  // bubbles being fitted (exterior ones for K > 0)
  const double rmax = u.grid->r_max;

  auto objective_lam = [&](const std::vector<double>& th, const std::vector<double>& lam) {
    const RadialField g = residual_field(u, bg, th, lam);
    double phi = norm_E(g, rho, rmax);
    // ratio chain lambda_K = rho, ..., lambda_{N+1} = top scale
    std::vector<double> chain;
    if (rho > 0.0) chain.push_back(rho);
    for (double l : lam) chain.push_back(l);
    phi += ratio_sum_of(chain, D, top);
    return phi;
  };

  ProximityValue out;
  out.K = K;
  out.rho = rho;
  out.top_scale = top;

  if (nfit == 0) {
    out.value = std::sqrt(objective_lam({}, {}));
    out.starts_used = 1;
    return out;
  }

  // seeds: detected bubbles, plus a Newton fit when it converges
  std::vector<std::pair<std::vector<double>, std::vector<double>>> seeds;
  const BubbleParams det = detect_bubbles(u, N);
  {
    std::vector<double> th(det.theta), la(det.lambda);
    // keep the nfit largest detected scales for an exterior fit
    while (static_cast<int>(la.size()) > nfit) {
      th.erase(th.begin());
      la.erase(la.begin());
    }
    while (static_cast<int>(la.size()) < nfit) {
      th.push_back(0.0);
      la.push_back(la.empty() ? 1.0 : la.back() * 10.0);
    }
    seeds.push_back({th, la});
    if (K == 0 && static_cast<int>(det.lambda.size()) == N) {
      try {
        const auto fit = fit_decomposition(u, N, det, profiles, bg);
        seeds.push_back({fit.params.theta, fit.params.lambda});
      } catch (const FitError&) {
      }
    }
  }
  // deterministic perturbations of the first seed
  const double dth[] = {0.5, -0.5, 0.0, 0.0};
  const double dll[] = {0.0, 0.0, 0.4, -0.4};
  for (int p = 0; p < 4; ++p) {
    auto th = seeds[0].first;
    auto la = seeds[0].second;
    for (int j = 0; j < nfit; ++j) {
      th[j] += dth[p];
      la[j] *= std::exp(dll[p]);
    }
    seeds.push_back({th, la});
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_th, best_la;
  for (auto& [th0, la0] : seeds) {
    std::vector<double> x(2 * nfit);
    for (int j = 0; j < nfit; ++j) {
      x[2 * j] = th0[j];
      x[2 * j + 1] = std::log(la0[j]);
    }
    auto fwrap = [&](const std::vector<double>& xv) {
      std::vector<double> th(nfit), la(nfit);
      for (int j = 0; j < nfit; ++j) {
        th[j] = xv[2 * j];
        la[j] = std::exp(xv[2 * j + 1]);
      }
      std::sort(la.begin(), la.end());
      return objective_lam(th, la);
    };
    const double fmin = nelder_mead(x, fwrap, 400, 1e-12);
    if (fmin < best) {
      best = fmin;
      best_th.resize(nfit);
      best_la.resize(nfit);
      for (int j = 0; j < nfit; ++j) {
        best_th[j] = x[2 * j];
        best_la[j] = std::exp(x[2 * j + 1]);
      }
    }
  }
  out.starts_used = static_cast<int>(seeds.size());
  out.value = std::sqrt(std::max(0.0, best));
  out.argmin_params = BubbleParams(best_th, best_la);
  return out;
}

}  // namespace

ProximityValue proximity_d(const RadialField& u, int N, const TestProfiles& profiles,
                           const Regime& regime, const RadialField* bg) {
  if (N < 0) throw ConfigError("proximity_d: need N >= 0");
  return proximity_impl(u, 0, N, 0.0, profiles, regime, bg);
}

ProximityValue proximity_dK(const RadialField& u, int K, int N, double rho,
                            const TestProfiles& profiles, const Regime& regime,
                            const RadialField* bg) {
  if (K < 0 || K > N) throw ConfigError("proximity_dK: need 0 <= K <= N");
  if (!(rho > 0.0)) throw ConfigError("proximity_dK: need rho > 0");
  return proximity_impl(u, K, N, rho, profiles, regime, bg);
}

DeltaRResult delta_R(const RadialField& u, double R, int M_max,
                     const TestProfiles& profiles) {
  if (!(R > 0.0)) throw ConfigError("delta_R: need R > 0");
  DeltaRResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int M = 0; M <= M_max; ++M) {
    // last scale pinned to R via a pseudo-regime with top scale R
    Regime reg = Regime::make_global(R * R);
    const ProximityValue pv = proximity_impl(u, 0, M, 0.0, profiles, reg, nullptr);
    if (pv.value < best.value) {
      best.value = pv.value;
      best.best_M = M;
      best.params = pv.argmin_params;
    }
  }
  return best;
}

BubbleParams detect_bubbles(const RadialField& u, int N_max) {
  const int D = u.grid->dimension;
  const auto& r = u.grid->nodes;
  const int M = u.size();
  const double rstar = std::sqrt(static_cast<double>(D) * (D - 2));
  const double peak_const = std::pow(0.5 * rstar, 0.5 * (D - 2));

  std::vector<double> ind(M);
  for (int i = 0; i < M; ++i)
    ind[i] = std::pow(r[i], 0.5 * (D - 2)) * std::abs(u.values[i]);

  struct Cand {
    double lambda, theta, height;
  };
  std::vector<Cand> cands;
  for (int i = 1; i + 1 < M; ++i) {
    if (ind[i] >= ind[i - 1] && ind[i] > ind[i + 1] && ind[i] > 0.25 * peak_const) {
      cands.push_back({r[i] / rstar, std::arg(u.values[i]), ind[i]});
    }
  }
  // merge peaks within a factor 2 in scale; keep the taller one
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.lambda < b.lambda; });
  std::vector<Cand> merged;
  for (const auto& c : cands) {
    if (!merged.empty() && c.lambda < 2.0 * merged.back().lambda) {
      if (c.height > merged.back().height) merged.back() = c;
    } else {
      merged.push_back(c);
    }
  }
  if (static_cast<int>(merged.size()) > N_max) {
    std::sort(merged.begin(), merged.end(),
              [](const Cand& a, const Cand& b) { return a.height > b.height; });
    merged.resize(N_max);
    std::sort(merged.begin(), merged.end(),
              [](const Cand& a, const Cand& b) { return a.lambda < b.lambda; });
  }
  std::vector<double> th, la;
  for (const auto& c : merged) {
    th.push_back(c.theta);
    la.push_back(c.lambda);
  }
  return BubbleParams(th, la);
}

ModulationSeries track_modulation(const TrajectoryRecord& traj, int N,
                                  const TestProfiles& profiles, const Regime::Kind kind,
                                  double T_plus) {
  ModulationSeries series;
  if (traj.snapshots.empty()) return series;
  const int D = traj.snapshots.front().u.grid->dimension;

  BubbleParams guess = detect_bubbles(traj.snapshots.front().u, N);
  if (guess.count() != N)
    throw FitError("track_modulation: initial detection found " +
                       std::to_string(guess.count()) + " bubbles, expected " +
                       std::to_string(N),
                   0.0);

  for (size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& snap = traj.snapshots[k];
    DecompositionResult fit;
    try {
      fit = fit_decomposition(snap.u, N, guess, profiles);
    } catch (const FitError&) {
      series.failure_index = static_cast<int>(k);
      break;
    }
    if (!fit.converged) {
      series.failure_index = static_cast<int>(k);
      break;
    }
    guess = fit.params;
    const Regime reg = kind == Regime::blowup ? Regime::make_blowup(T_plus, snap.t)
                                              : Regime::make_global(snap.t);
    const double top = reg.top_scale();
    const double dval = std::sqrt(fit.g_norm * fit.g_norm +
                                  ratio_sum_of(fit.params.lambda, D, top));
    series.times.push_back(snap.t);
    series.fits.push_back(fit);
    series.d.push_back(dval);
  }

  // |lambda_j'| lambda_j / d by centered differences
  const int S = static_cast<int>(series.times.size());
  series.dlam_ratio.assign(S, 0.0);
  for (int k = 0; k < S; ++k) {
    const int ka = std::max(0, k - 1), kb = std::min(S - 1, k + 1);
    if (ka == kb) continue;
    const double dt = series.times[kb] - series.times[ka];
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
      const double dl =
          (series.fits[kb].params.lambda[j] - series.fits[ka].params.lambda[j]) / dt;
      worst = std::max(worst,
                       std::abs(dl) * series.fits[k].params.lambda[j] /
                           std::max(series.d[k], 1e-14));
    }
    series.dlam_ratio[k] = worst;
  }
  return series;
}

}  // namespace glb
